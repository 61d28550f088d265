#include "toggleflow/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toggleflow/pnorm.hpp"
#include "toggleflow/solvers.hpp"
#include "toggleflow/tree.hpp"

namespace toggleflow {

Potentials solve_laplacian_dense(const Graph& g, const Supply& b) {
  const int n = g.n();
  if (n > 2000) throw std::invalid_argument("dense solve limited to n <= 2000");
  validate_supply(b);

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    const double c = 1.0 / a.r;
    lap(a.tail, a.tail) += c;
    lap(a.head, a.head) += c;
    lap(a.tail, a.head) -= c;
    lap(a.head, a.tail) -= c;
  }
  Eigen::MatrixXd pinned = lap;
  pinned.array() += 1.0 / n;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(pinned);

  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = b[i];
  Eigen::VectorXd x = ldlt.solve(rhs);
  x.array() -= x.mean();

  double bscale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  for (int round = 0; round < 4; ++round) {
    Eigen::VectorXd resid = rhs - lap * x;
    if (resid.lpNorm<Eigen::Infinity>() <= 1e-9 * bscale) break;
    Eigen::VectorXd corr = ldlt.solve(resid);
    corr.array() -= corr.mean();
    x += corr;
  }
  if (((rhs - lap * x).lpNorm<Eigen::Infinity>()) > 1e-9 * bscale)
    throw std::runtime_error("dense solve failed to reach target residual");

  Potentials out(n);
  for (int i = 0; i < n; ++i) out[i] = x(i);
  return out;
}

namespace {

struct CycleBasis {
  Eigen::MatrixXd b;        // m x k signed incidence of fundamental cycles
  std::vector<int> nontree;
};

CycleBasis cycle_basis(const Graph& g, const RootedTree& t) {
  CycleBasis cb;
  for (int e = 0; e < g.m(); ++e)
    if (!t.is_tree_arc[e]) cb.nontree.push_back(e);
  const int k = static_cast<int>(cb.nontree.size());
  cb.b = Eigen::MatrixXd::Zero(g.m(), k);
  for (int j = 0; j < k; ++j)
    for (const CycleArc& c : fundamental_cycle(g, t, cb.nontree[j])) cb.b(c.arc, j) = c.sign;
  return cb;
}

double smoothed_energy(const Graph& g, const Eigen::VectorXd& f, double p, double mu) {
  double e = 0.0;
  for (int i = 0; i < g.m(); ++i)
    e += g.arc(i).r * std::pow(f(i) * f(i) + mu * mu, p / 2.0) / p;
  return e;
}

}  // namespace

PNormOracleResult pnorm_oracle(const Graph& g, const Supply& b, double p, double tol) {
  if (g.n() > 50) throw std::invalid_argument("oracle limited to n <= 50");
  if (!(p > 1.0) || !(p <= 8.0)) throw std::invalid_argument("oracle needs p in (1, 8]");
  validate_supply(b);

  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, r);
  const Flow f0v = complete_tree_flow(g, t, Flow(g.m(), 0.0), b);

  Eigen::VectorXd f0(g.m());
  for (int e = 0; e < g.m(); ++e) f0(e) = f0v[e];
  const CycleBasis cb = cycle_basis(g, t);
  const int k = static_cast<int>(cb.nontree.size());

  double scale = 1.0;
  for (int e = 0; e < g.m(); ++e) scale = std::max(scale, std::abs(f0(e)));

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd f = f0;
  int total_iters = 0;

  const double stage_mu[] = {1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 0.0};
  for (double mu_rel : stage_mu) {
    const double mu = mu_rel * scale;
    if (k == 0) break;
    if (mu == 0.0) {
      // the exact map is safe only away from zero flow
      double fmin = std::abs(f(0));
      for (int e = 1; e < g.m(); ++e) fmin = std::min(fmin, std::abs(f(e)));
      if (fmin < 1e-8 * scale) break;
    }
    const double stage_tol = (mu_rel <= 1e-10 ? 1e-13 : 1e-10) * std::max(1.0, scale);

    for (int it = 0; it < 300; ++it) {
      if (++total_iters > 100000) throw std::runtime_error("oracle iteration cap exceeded");
      Eigen::VectorXd u(g.m()), d(g.m());
      for (int e = 0; e < g.m(); ++e) {
        const double s2 = f(e) * f(e) + mu * mu;
        u(e) = r[e] * f(e) * std::pow(s2, (p - 2.0) / 2.0);
        d(e) = r[e] * std::pow(s2, (p - 4.0) / 2.0) * ((p - 1.0) * f(e) * f(e) + mu * mu);
      }
      const Eigen::VectorXd grad = cb.b.transpose() * u;
      if (grad.lpNorm<Eigen::Infinity>() <= stage_tol) break;

      const Eigen::MatrixXd h = cb.b.transpose() * d.asDiagonal() * cb.b;
      Eigen::VectorXd step = h.ldlt().solve(-grad);
      double slope = grad.dot(step);
      if (!(slope < 0.0) || !step.allFinite()) {
        step = -grad;
        slope = grad.dot(step);
      }

      const double e_here = smoothed_energy(g, f, p, mu);
      double alpha = 1.0;
      bool moved = false;
      for (int h2 = 0; h2 < 60; ++h2) {
        const Eigen::VectorXd cand = theta + alpha * step;
        const Eigen::VectorXd fc = f0 + cb.b * cand;
        if (smoothed_energy(g, fc, p, mu) <= e_here + 1e-4 * alpha * slope) {
          theta = cand;
          f = fc;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
  }

  PNormOracleResult out;
  out.f.assign(g.m(), 0.0);
  for (int e = 0; e < g.m(); ++e) out.f[e] = f(e);
  out.newton_iters = total_iters;

  std::vector<double> voltage(g.m(), 0.0);
  for (int e : t.tree_arcs) voltage[e] = r[e] * out.f[e] * powx(std::abs(out.f[e]), p - 2.0);
  out.x = potentials_from_tree_voltages(g, t, voltage);

  out.energy = primal_energy(g, out.f, p);
  out.dual = dual_objective(g, out.x, b, PNormParams::make(g, p));
  out.kkt = kkt_residual(g, out.f, out.x, p, b);
  if (!(out.kkt <= 10.0 * tol))
    throw std::runtime_error("oracle failed to certify first-order conditions");
  return out;
}

}  // namespace toggleflow
