#include "toggleflow/recurse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "toggleflow/batched.hpp"

namespace toggleflow {

namespace {

Eigen::MatrixXd dense_laplacian(const WeightedLaplacian& l) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(l.n, l.n);
  for (const LapEdge& e : l.edges) {
    m(e.u, e.u) += e.c;
    m(e.v, e.v) += e.c;
    m(e.u, e.v) -= e.c;
    m(e.v, e.u) -= e.c;
  }
  return m;
}

// orthonormal basis of the space orthogonal to the all-ones vector
Eigen::MatrixXd helmert_basis(int n) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) q(i, k - 1) = 1.0 / norm;
    q(k, k - 1) = -static_cast<double>(k) / norm;
  }
  return q;
}

}  // namespace

WeightedLaplacian graph_laplacian(const Graph& g) {
  WeightedLaplacian l;
  l.n = g.n();
  l.edges.reserve(g.m());
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    l.edges.push_back({a.tail, a.head, 1.0 / a.r});
  }
  return l;
}

ContractedSystem contract_partition(const Graph& g, const Potentials& x,
                                    const std::vector<int>& part_of, int parts, const Supply& b) {
  if (static_cast<int>(part_of.size()) != g.n())
    throw std::invalid_argument("partition size mismatch");
  std::vector<int> count(parts, 0);
  for (int p : part_of) {
    if (p < 0 || p >= parts) throw std::invalid_argument("part id out of range");
    ++count[p];
  }
  for (int p = 0; p < parts; ++p)
    if (count[p] == 0) throw std::invalid_argument("empty part " + std::to_string(p));

  ContractedSystem sys;
  sys.parts = parts;
  sys.part_of = part_of;
  sys.L_H.n = parts;

  const std::vector<double> lx = apply_laplacian(g, x);
  sys.b_H.assign(parts, 0.0);
  for (int v = 0; v < g.n(); ++v) sys.b_H[part_of[v]] += b[v] - lx[v];

  std::vector<std::pair<std::pair<int, int>, double>> raw;
  raw.reserve(g.m());
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    int p = part_of[a.tail], q = part_of[a.head];
    if (p == q) continue;  // self-loops vanish
    if (p > q) std::swap(p, q);
    raw.push_back({{p, q}, 1.0 / a.r});
  }
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < raw.size();) {
    double c = 0.0;
    std::size_t j = i;
    while (j < raw.size() && raw[j].first == raw[i].first) c += raw[j++].second;
    sys.L_H.edges.push_back({raw[i].first.first, raw[i].first.second, c});
    i = j;
  }
  return sys;
}

std::vector<double> optimal_batch_delta(const WeightedLaplacian& l, const std::vector<double>& b) {
  if (static_cast<int>(b.size()) != l.n) throw std::invalid_argument("rhs size mismatch");
  double sum = 0.0, abs_sum = 0.0;
  for (double v : b) {
    sum += v;
    abs_sum += std::abs(v);
  }
  if (std::abs(sum) > 1e-9 * std::max(1.0, abs_sum))
    throw std::invalid_argument("rhs must sum to zero");
  if (l.n == 1) return {0.0};

  const int n = l.n;
  Eigen::MatrixXd a = dense_laplacian(l);
  // L + J/n is positive definite iff the graph is connected; its solution is
  // the min-norm pseudoinverse action because b is orthogonal to ones
  a.array() += 1.0 / n;
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = b[i];
  Eigen::VectorXd d = a.ldlt().solve(rhs);
  const double mean = d.mean();
  d.array() -= mean;

  // verify L d = b; an inconsistent system (disconnected input) yields zeros
  Eigen::MatrixXd lap = dense_laplacian(l);
  const double resid = (lap * d - rhs).lpNorm<Eigen::Infinity>();
  double bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  if (!(resid <= 1e-6 * std::max(1.0, bmax))) return std::vector<double>(n, 0.0);

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = d(i);
  return out;
}

WeightedLaplacian spectral_sparsify(const WeightedLaplacian& l, double gamma, Rng& rng) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
  if (l.n < 20 || l.edges.empty()) return l;

  const int n = l.n;
  Eigen::MatrixXd lap = dense_laplacian(l);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, ev(n - 1));
  Eigen::VectorXd inv = ev;
  for (int i = 0; i < n; ++i) inv(i) = ev(i) > cutoff ? 1.0 / ev(i) : 0.0;
  const Eigen::MatrixXd pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();

  const std::size_t m = l.edges.size();
  std::vector<double> p(m), cum(m);
  double total = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const LapEdge& le = l.edges[e];
    const double reff = pinv(le.u, le.u) + pinv(le.v, le.v) - 2.0 * pinv(le.u, le.v);
    p[e] = std::max(le.c * reff, 0.0);
    total += p[e];
    cum[e] = total;
  }
  for (std::size_t e = 0; e < m; ++e) p[e] /= total;

  const long long q =
      static_cast<long long>(std::ceil(9.0 * n * std::log(static_cast<double>(n)) /
                                       (gamma * gamma)));
  std::vector<long long> counts(m, 0);
  if (q > 100000) {
    // conditional binomials realize one multinomial draw without q iterations
    long long remaining = q;
    double p_rest = 1.0;
    for (std::size_t e = 0; e + 1 < m && remaining > 0; ++e) {
      const double pe = std::min(1.0, std::max(0.0, p[e] / p_rest));
      std::binomial_distribution<long long> bin(remaining, pe);
      counts[e] = bin(rng.engine());
      remaining -= counts[e];
      p_rest -= p[e];
      if (p_rest <= 0.0) break;
    }
    counts[m - 1] += remaining;
  } else {
    for (long long i = 0; i < q; ++i) ++counts[rng.pick(cum)];
  }

  WeightedLaplacian out;
  out.n = n;
  for (std::size_t e = 0; e < m; ++e) {
    if (counts[e] == 0) continue;
    const double w = static_cast<double>(counts[e]) * l.edges[e].c / (q * p[e]);
    out.edges.push_back({l.edges[e].u, l.edges[e].v, w});
  }
  return out;
}

bool spectral_approx_check(const WeightedLaplacian& a, const WeightedLaplacian& b, double gamma) {
  if (a.n != b.n) throw std::invalid_argument("dimension mismatch");
  const int n = a.n;
  if (n < 2) return true;
  const Eigen::MatrixXd q = helmert_basis(n);
  const Eigen::MatrixXd ar = q.transpose() * dense_laplacian(a) * q;
  const Eigen::MatrixXd br = q.transpose() * dense_laplacian(b) * q;

  Eigen::LLT<Eigen::MatrixXd> llt(ar);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("reference operator is singular on ones-perp");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(br, ar);
  if (ges.info() != Eigen::Success) return false;
  const double lo = ges.eigenvalues().minCoeff();
  const double hi = ges.eigenvalues().maxCoeff();
  return lo >= 1.0 - gamma - 1e-9 && hi <= 1.0 + gamma + 1e-9;
}

int batch_schedule(int m_level, int m_top, int n_level, const RecursionParams& params) {
  int d = params.d_override;
  if (d <= 0)
    d = std::max(
        1, static_cast<int>(std::ceil(params.c3 * m_level * std::pow(m_top, -params.delta))));
  return std::clamp(d, 1, std::max(1, n_level - 1));
}

double recursion_beta(const RecursionParams& params) {
  const double h = sparsify_h(params.gamma);
  const double alpha =
      4.0 * params.eps_prime * (1.0 + params.gamma) / (1.0 - params.gamma) * (1.0 + h) + 2.0 * h;
  return (1.0 - 1.0 / (static_cast<double>(params.n0) * params.n0)) * (1.0 - alpha);
}

namespace {

// Draw d cuts, dedup, and return the partition of the tree minus those arcs.
BlockContraction sample_partition(const CutTable& cuts, const Graph& g, const RootedTree& t,
                                  int d, Rng& rng) {
  std::vector<int> picked;
  picked.reserve(d);
  std::vector<char> seen(g.n(), 0);
  for (int i = 0; i < d; ++i) {
    const int v = cuts.verts[rng.pick(cuts.cum)];
    if (!seen[v]) {
      seen[v] = 1;
      picked.push_back(v);
    }
  }
  return contract_block(g, t, picked);
}

WeightedLaplacian run_sparsifier(const WeightedLaplacian& l, const RecursionParams& params,
                                 Rng& rng) {
  if (params.bypass_sparsify) return l;
  if (params.sparsifier) return params.sparsifier(l, params.gamma, rng);
  return spectral_sparsify(l, params.gamma, rng);
}

Potentials rec_impl(const Graph& g, const Supply& b, double eps, std::uint64_t seed, int m_top,
                    int depth, const RecursionParams& params, const SolveOptions& opts,
                    SolverTrace* trace);

Potentials base_case(const Graph& g, const Supply& b) {
  return optimal_batch_delta(graph_laplacian(g), b);
}

std::vector<double> aux_solve(const WeightedLaplacian& l, const Supply& b_h, std::uint64_t seed,
                              int m_top, int depth, int n_parent,
                              const RecursionParams& params, const SolveOptions& opts) {
  if (l.n <= params.n0 || l.n >= n_parent) return optimal_batch_delta(l, b_h);
  // recurse on the contracted graph
  std::vector<Arc> arcs;
  arcs.reserve(l.edges.size());
  for (const LapEdge& e : l.edges) arcs.push_back({e.u, e.v, 1.0 / e.c});
  try {
    Graph h(l.n, std::move(arcs));
    return rec_impl(h, b_h, params.eps_prime, seed, m_top, depth + 1, params, opts, nullptr);
  } catch (const std::invalid_argument&) {
    return std::vector<double>(l.n, 0.0);  // disconnected sparsifier output
  }
}

Potentials rec_impl(const Graph& g, const Supply& b, double eps, std::uint64_t seed, int m_top,
                    int depth, const RecursionParams& params, const SolveOptions& opts,
                    SolverTrace* trace) {
  if (g.n() <= params.n0 || depth > 60) {
    if (trace) {
      trace->tau = 0.0;
      trace->K = 0;
      trace->iterations_run = 0;
    }
    return base_case(g, b);
  }

  Rng rng(seed);
  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, r);
  const CutTable cuts = build_cut_table(g, t, b);
  const int d = batch_schedule(g.m(), m_top, g.n(), params);

  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  long long budget = std::max(
      1LL, static_cast<long long>(std::ceil(5.0 * cuts.tau / d * std::log(1.0 / eps))));
  const long long iters =
      opts.max_iters > 0 && opts.max_iters < budget ? opts.max_iters : budget;

  if (trace) {
    trace->tau = cuts.tau;
    trace->K = budget;
    trace->iterations_run = iters;
  }

  const PNormParams quad = PNormParams::make(g, 2.0);
  Potentials x(g.n(), 0.0);
  double objective = 0.0;
  std::uint64_t child_counter = 0;

  for (long long it = 1; it <= iters; ++it) {
    const BlockContraction bc = sample_partition(cuts, g, t, d, rng);
    const ContractedSystem sys = contract_partition(g, x, bc.part_of, bc.parts, b);
    const WeightedLaplacian lt = run_sparsifier(sys.L_H, params, rng);
    const std::vector<double> delta =
        aux_solve(lt, sys.b_H, Rng::derive(seed, ++child_counter), m_top, depth, g.n(), params,
                  opts);

    Potentials cand = x;
    for (int v = 0; v < g.n(); ++v) cand[v] += delta[bc.part_of[v]];
    const double cand_obj = dual_objective(g, cand, b, quad);
    double gain = 0.0;
    if (cand_obj > objective) {
      x = std::move(cand);
      gain = cand_obj - objective;
      objective = cand_obj;
    }
    if (trace) trace->add(it, d, gain, objective);
  }
  return x;
}

}  // namespace

OuterStepResult recursive_outer_step(const Graph& g, const Supply& b, const Potentials& x,
                                     const RootedTree& t, const CutTable& cuts, int d, Rng& rng,
                                     const RecursionParams& params) {
  const BlockContraction bc = sample_partition(cuts, g, t, d, rng);
  const ContractedSystem sys = contract_partition(g, x, bc.part_of, bc.parts, b);
  const WeightedLaplacian lt = run_sparsifier(sys.L_H, params, rng);
  const std::vector<double> delta = optimal_batch_delta(lt, sys.b_H);

  OuterStepResult out;
  out.parts = bc.parts;
  out.x = x;
  for (int v = 0; v < g.n(); ++v) out.x[v] += delta[bc.part_of[v]];

  const PNormParams quad = PNormParams::make(g, 2.0);
  const double before = dual_objective(g, x, b, quad);
  const double after = dual_objective(g, out.x, b, quad);
  if (after > before) {
    out.accepted = true;
    out.increase = after - before;
  } else {
    out.x = x;
  }
  return out;
}

DualSolveResult recursive_solve(const Graph& g, const Supply& b, double eps, Rng& rng,
                                const RecursionParams& params, const SolveOptions& opts) {
  validate_supply(b);
  if (static_cast<int>(b.size()) != g.n()) throw std::invalid_argument("supply size mismatch");

  DualSolveResult out;
  out.trace.recording = opts.record_trace;
  out.trace.algo = "recursive";
  out.trace.eps = eps;

  const std::uint64_t seed0 = rng.next_u64();
  out.x = rec_impl(g, b, eps, seed0, std::max(1, g.m()), 0, params, opts, &out.trace);

  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, r);
  out.f = tree_defined_flow(g, t, out.x, b);
  return out;
}

}  // namespace toggleflow
