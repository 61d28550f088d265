#pragma once

#include "toggleflow/graph.hpp"

namespace toggleflow {

// Direct dense solve of Lx = b with mean-zero normalization; refined until
// the residual is at most 1e-9 times the supply scale.
[[nodiscard]] Potentials solve_laplacian_dense(const Graph& g, const Supply& b);

struct PNormOracleResult {
  Flow f;
  Potentials x;
  double energy = 0.0;
  double dual = 0.0;
  double kkt = 0.0;
  int newton_iters = 0;
};

// High-accuracy reference for small instances (n <= 50, 1 < p <= 8): smoothed
// Newton in cycle space with a graded smoothing schedule, then certified
// against the first-order conditions. Throws if certification fails.
[[nodiscard]] PNormOracleResult pnorm_oracle(const Graph& g, const Supply& b, double p,
                                             double tol = 1e-7);

}  // namespace toggleflow
