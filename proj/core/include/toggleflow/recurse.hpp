#pragma once

#include <functional>

#include "toggleflow/solvers.hpp"

namespace toggleflow {

struct LapEdge {
  int u, v;
  double c;  // conductance
};

struct WeightedLaplacian {
  int n = 0;
  std::vector<LapEdge> edges;
};

// Vertex partition together with the quotient system it induces.
struct ContractedSystem {
  int parts = 0;
  std::vector<int> part_of;
  WeightedLaplacian L_H;
  Supply b_H;
};

using Sparsifier = std::function<WeightedLaplacian(const WeightedLaplacian&, double, Rng&)>;

struct RecursionParams {
  int n0 = 10;                // base-case size
  double gamma = 0.01;        // sparsifier quality
  double eps_prime = 0.01;    // accuracy requested from recursive calls
  double delta = 0.5;         // batch-size schedule exponent
  double c3 = 0.25;           // batch-size schedule constant
  int d_override = 0;         // force the batch size when positive
  bool bypass_sparsify = false;
  Sparsifier sparsifier;      // empty -> spectral_sparsify
};

// Quotient of the residual system b - Lx under the given partition. Merged
// conductances are accumulated deterministically in arc order.
[[nodiscard]] ContractedSystem contract_partition(const Graph& g, const Potentials& x,
                                                  const std::vector<int>& part_of, int parts,
                                                  const Supply& b);

// Minimum-norm solution of L delta = b (dense). Returns zeros when the system
// is inconsistent (e.g. a disconnected sparsifier output).
[[nodiscard]] std::vector<double> optimal_batch_delta(const WeightedLaplacian& l,
                                                      const std::vector<double>& b);

// Multinomial resampling by effective resistance.
[[nodiscard]] WeightedLaplacian spectral_sparsify(const WeightedLaplacian& l, double gamma,
                                                  Rng& rng);

// True iff (1-gamma) A <= B <= (1+gamma) A on the space orthogonal to the
// all-ones vector. Throws if A is not positive definite there.
[[nodiscard]] bool spectral_approx_check(const WeightedLaplacian& a, const WeightedLaplacian& b,
                                         double gamma);

[[nodiscard]] WeightedLaplacian graph_laplacian(const Graph& g);

// Batch-size schedule for the current level.
[[nodiscard]] int batch_schedule(int m_level, int m_top, int n_level,
                                 const RecursionParams& params);

[[nodiscard]] inline double sparsify_h(double gamma) {
  const double t = gamma / (1.0 - gamma);
  return t * t;
}

// Expected one-step gap contraction factor is 1 - beta + beta e^{-d/tau}.
[[nodiscard]] double recursion_beta(const RecursionParams& params);

struct OuterStepResult {
  Potentials x;
  bool accepted = false;
  double increase = 0.0;
  int parts = 0;
};

// One outer iteration: sample d cuts, contract, (optionally) sparsify, lift
// the optimal per-part shift, and keep it only if the objective improves.
[[nodiscard]] OuterStepResult recursive_outer_step(const Graph& g, const Supply& b,
                                                   const Potentials& x, const RootedTree& t,
                                                   const CutTable& cuts, int d, Rng& rng,
                                                   const RecursionParams& params);

[[nodiscard]] DualSolveResult recursive_solve(const Graph& g, const Supply& b, double eps,
                                              Rng& rng, const RecursionParams& params = {},
                                              const SolveOptions& opts = {});

}  // namespace toggleflow
