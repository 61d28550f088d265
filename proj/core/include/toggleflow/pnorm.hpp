#pragma once

#include "toggleflow/solvers.hpp"

namespace toggleflow {

// Accuracy that the quadratic machinery must reach so that one conversion
// round meets eps for the p-norm objective. Kept exactly in the stated form;
// it underflows for all but toy parameters and is exercised only numerically.
struct ConversionParams {
  double eps = 0.0;
  double eps_prime = 0.0;
  double r_ratio = 1.0;
  double q = 2.0;
  int n = 0;
  int m = 0;

  [[nodiscard]] static ConversionParams make(const Graph& g, double p, double eps);
};

struct PNormOptions {
  long long max_iters = 1'000'000;
  long long tree_refresh = 1;  // rebuild the tree every this many iterations
  bool record_trace = false;
};

struct PNormResult {
  Flow f;
  Potentials x;
  SolverTrace trace;
  bool converged = false;
  double final_energy = 0.0;
  double final_dual = 0.0;
};

// Weighted p-norm flow by cycle toggling, p >= 2.
[[nodiscard]] PNormResult pnorm_cycle_solve(const Graph& g, const Supply& b, double p, double eps,
                                            Rng& rng, const PNormOptions& opts = {});

// Weighted p-norm flow by cut toggling on the dual, 1 < p <= 2.
[[nodiscard]] PNormResult pnorm_cut_solve(const Graph& g, const Supply& b, double p, double eps,
                                          Rng& rng, const PNormOptions& opts = {});

// Root of sum_i r_i (f_i + d) |f_i + d|^{p-2} = 0 over the cycle segments.
[[nodiscard]] double cycle_delta_root(const std::vector<std::pair<double, double>>& seg_r_f,
                                      double p);

// Root of sum_i w_i (a_i + d) |a_i + d|^{q-2} = b_c over the boundary items.
[[nodiscard]] double cut_delta_root(const std::vector<std::pair<double, double>>& items_w_a,
                                    double b_c, double q);

// Potential-defined flow for general p, completed to exact feasibility.
[[nodiscard]] Flow dual_to_flow(const Graph& g, const RootedTree& t, const Potentials& x,
                                const Supply& b, double p);

// max |r f |f|^{p-2} - (x_tail - x_head)| + max |Af - b|
[[nodiscard]] double kkt_residual(const Graph& g, const Flow& f, const Potentials& x, double p,
                                  const Supply& b);

// Magnitudes floored at 1e-12 of the largest entry (all ones when everything
// is zero) so degenerate reweightings stay finite.
[[nodiscard]] std::vector<double> clamped_magnitudes(const std::vector<double>& values);

}  // namespace toggleflow
