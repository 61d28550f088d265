#pragma once

#include <cstdint>

#include "toggleflow/graph.hpp"
#include "toggleflow/rng.hpp"
#include "toggleflow/trace.hpp"
#include "toggleflow/tree.hpp"
#include "toggleflow/treeflow.hpp"

namespace toggleflow {

struct SolveOptions {
  bool record_trace = false;
  bool naive_cutflow = false;   // force the reference cut-flow structure
  long long max_iters = 0;      // 0 = run the full computed budget
};

struct DualSolveResult {
  Potentials x;
  Flow f;
  SolverTrace trace;
};

struct PrimalSolveResult {
  Flow f;
  Potentials x;
  SolverTrace trace;
};

// Cut-toggling solver: repairs the flow across one sampled fundamental cut per
// iteration by shifting the potential of the subtree below it.
[[nodiscard]] DualSolveResult dual_kosz(const Graph& g, const Supply& b, double eps, Rng& rng,
                                        const SolveOptions& opts = {});

// Cycle-toggling solver: cancels the resistive slack around one sampled
// fundamental cycle per iteration.
[[nodiscard]] PrimalSolveResult kosz(const Graph& g, const Supply& b, double eps, Rng& rng,
                                     const SolveOptions& opts = {});

// One cut toggle against any structure exposing findflow/addvalue.
template <class TF>
double cut_toggle_step(TF& state, const CutTable& cuts, int cut_vertex) {
  const double delta = state.findflow(cut_vertex) * cuts.R_C[cut_vertex];
  state.addvalue(cut_vertex, delta);
  return delta;
}

// Flow that satisfies the supply exactly: potential-defined off the tree,
// completed on tree arcs by a leaf-to-root sweep.
[[nodiscard]] Flow tree_defined_flow(const Graph& g, const RootedTree& t, const Potentials& x,
                                     const Supply& b);

// x(root) = 0 and x(tail) - x(head) = r f on tree arcs; f need not be f*.
[[nodiscard]] Potentials tree_defined_potentials(const Graph& g, const RootedTree& t,
                                                 const Flow& f);

// Shared helper: assign the given off-tree flows, then route the remainder of
// b through the tree (exactly feasible by construction).
[[nodiscard]] Flow complete_tree_flow(const Graph& g, const RootedTree& t, const Flow& off_tree,
                                      const Supply& b);

// Tree potentials for general voltage functions: x(tail)-x(head) = voltage[e].
[[nodiscard]] Potentials potentials_from_tree_voltages(const Graph& g, const RootedTree& t,
                                                       const std::vector<double>& voltage);

// Net flow across every fundamental cut for the potential-defined flow of x.
[[nodiscard]] std::vector<double> cut_flows_from_potentials(const Graph& g, const RootedTree& t,
                                                            const Potentials& x);

}  // namespace toggleflow
