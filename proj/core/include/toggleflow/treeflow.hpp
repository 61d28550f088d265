#pragma once

#include <vector>

#include "toggleflow/graph.hpp"
#include "toggleflow/tree.hpp"

namespace toggleflow {

// Maintains vertex potentials under subtree-additive updates and answers
// "net flow into the fundamental cut of v" queries for the potential-defined
// flow. Two implementations with identical semantics: a brute-force one used
// as a correctness reference and an interaction-table one used by the solver.

class TreeFlowNaive {
 public:
  TreeFlowNaive(const Graph& g, const RootedTree& t, const Supply& b);

  void addvalue(int v, double x);
  [[nodiscard]] double findflow(int v) const;
  [[nodiscard]] const Potentials& values() const { return x_; }
  [[nodiscard]] double cut_flow(int v) const;

 private:
  const Graph* g_;
  const RootedTree* t_;
  Supply b_c_;      // b summed over subtrees
  Potentials x_;
};

class TreeFlowTable {
 public:
  TreeFlowTable(const Graph& g, const RootedTree& t, const Supply& b);

  void addvalue(int v, double x);
  [[nodiscard]] double findflow(int v) const;
  [[nodiscard]] const Potentials& values();
  [[nodiscard]] double cut_flow(int v) const { return f_c_[v]; }
  void recompute_all_cut_flows();
  [[nodiscard]] double table(int cv1, int cv2) const;

 private:
  const Graph* g_;
  const RootedTree* t_;
  std::vector<double> h_;  // row-major n*n interaction table
  Supply b_c_;
  std::vector<double> f_c_;
  std::vector<double> lazy_;
  Potentials x_;
  bool dirty_ = false;

  void materialize();
};

// h[a*n + c] = change in the flow across cut(c) when the potential of every
// vertex in subtree(a) rises by one. Rows for the root are zero.
std::vector<double> precompute_interaction_table(const Graph& g, const RootedTree& t);

}  // namespace toggleflow
