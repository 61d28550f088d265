#include "toggleflow/pnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toggleflow {

ConversionParams ConversionParams::make(const Graph& g, double p, double eps) {
  ConversionParams cp;
  cp.eps = eps;
  cp.q = p / (p - 1.0);
  cp.r_ratio = g.r_ratio();
  cp.n = g.n();
  cp.m = g.m();
  const double n = cp.n, m = cp.m, r = cp.r_ratio, q = cp.q;
  const double denom = 2.0 * std::pow(n, 4) * std::pow(m * r, 1.0 / p) *
                       std::pow(q * std::pow(2.0, q), 1.0 + 1.0 / q) * std::pow(n * r, 1.0 / p);
  cp.eps_prime = std::pow(std::min(eps / 3.0, 1.0) / denom, q);
  return cp;
}

std::vector<double> clamped_magnitudes(const std::vector<double>& values) {
  double biggest = 0.0;
  for (double v : values) biggest = std::max(biggest, std::abs(v));
  if (biggest == 0.0) return std::vector<double>(values.size(), 1.0);
  const double floor_at = 1e-12 * biggest;
  std::vector<double> mag(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    mag[i] = std::max(std::abs(values[i]), floor_at);
  return mag;
}

namespace {

// Monotone scalar root finder: bisection with a safeguarded Newton step.
template <class Fn, class Dfn>
double monotone_root(Fn phi, Dfn dphi, double lo, double hi, double scale) {
  double flo = phi(lo);
  double fhi = phi(hi);
  if (flo > 0.0 || fhi < 0.0) {
    // the bracket construction guarantees a sign change up to rounding
    if (std::abs(flo) <= std::abs(fhi)) return lo;
    return hi;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = phi(x);
    if (std::abs(fx) <= 1e-12 * scale) return x;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    const double d = dphi(x);
    double next = d > 0.0 ? x - fx / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * (1.0 + std::abs(x))) return x;
    x = next;
  }
  return x;
}

long long budget_from_double(double k) {
  if (!(k > 0.0)) return 1;
  if (k > 9.0e17) return 900'000'000'000'000'000LL;
  return static_cast<long long>(std::ceil(k));
}

}  // namespace

double cycle_delta_root(const std::vector<std::pair<double, double>>& seg, double p) {
  if (p == 2.0) {
    double num = 0.0, den = 0.0;
    for (const auto& [r, f] : seg) {
      num += r * f;
      den += r;
    }
    return -num / den;
  }
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  for (const auto& [r, f] : seg) {
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
  }
  const double lo = -fmax - 1.0;
  const double hi = -fmin + 1.0;
  auto phi = [&](double d) {
    double s = 0.0;
    for (const auto& [r, f] : seg) s += r * (f + d) * powx(std::abs(f + d), p - 2.0);
    return s;
  };
  auto dphi = [&](double d) {
    double s = 0.0;
    for (const auto& [r, f] : seg) s += r * (p - 1.0) * powx(std::abs(f + d), p - 2.0);
    return s;
  };
  double scale = 0.0;
  const double span = std::max(std::abs(lo), std::abs(hi));
  for (const auto& [r, f] : seg) scale += r * powx(std::abs(f) + span, p - 1.0);
  return monotone_root(phi, dphi, lo, hi, std::max(scale, 1e-300));
}

double cut_delta_root(const std::vector<std::pair<double, double>>& items, double b_c, double q) {
  if (q == 2.0) {
    double num = 0.0, den = 0.0;
    for (const auto& [w, a] : items) {
      num += w * a;
      den += w;
    }
    return (b_c - num) / den;
  }
  auto phi = [&](double d) {
    double s = 0.0;
    for (const auto& [w, a] : items) s += w * (a + d) * powx(std::abs(a + d), q - 2.0);
    return s - b_c;
  };
  auto dphi = [&](double d) {
    double s = 0.0;
    for (const auto& [w, a] : items) s += w * (q - 1.0) * powx(std::abs(a + d), q - 2.0);
    return s;
  };
  double amax = 0.0;
  for (const auto& [w, a] : items) amax = std::max(amax, std::abs(a));
  double span = 1.0 + amax;
  double lo = -span, hi = span;
  for (int it = 0; it < 200 && (phi(lo) > 0.0 || phi(hi) < 0.0); ++it) {
    span *= 2.0;
    lo = -span;
    hi = span;
  }
  double scale = std::abs(b_c);
  for (const auto& [w, a] : items) scale += w * powx(std::abs(a) + span, q - 1.0);
  return monotone_root(phi, dphi, lo, hi, std::max(scale, 1e-300));
}

Flow dual_to_flow(const Graph& g, const RootedTree& t, const Potentials& x, const Supply& b,
                  double p) {
  const PNormParams params = PNormParams::make(g, p);
  Flow off(g.m(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    if (t.is_tree_arc[e]) continue;
    const Arc& a = g.arc(e);
    const double dx = x[a.tail] - x[a.head];
    off[e] = params.w[e] * dx * powx(std::abs(dx), params.q - 2.0);
  }
  return complete_tree_flow(g, t, off, b);
}

double kkt_residual(const Graph& g, const Flow& f, const Potentials& x, double p,
                    const Supply& b) {
  double ohm = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    const double v = a.r * f[e] * powx(std::abs(f[e]), p - 2.0);
    ohm = std::max(ohm, std::abs(v - (x[a.tail] - x[a.head])));
  }
  const std::vector<double> div = flow_divergence(g, f);
  double feas = 0.0;
  for (int v = 0; v < g.n(); ++v) feas = std::max(feas, std::abs(div[v] - b[v]));
  return ohm + feas;
}

PNormResult pnorm_cycle_solve(const Graph& g, const Supply& b, double p, double eps, Rng& rng,
                              const PNormOptions& opts) {
  if (!(p >= 2.0)) throw std::invalid_argument("cycle toggling needs p >= 2");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
  if (opts.tree_refresh < 1) throw std::invalid_argument("tree_refresh must be positive");
  validate_supply(b);
  if (static_cast<int>(b.size()) != g.n()) throw std::invalid_argument("supply size mismatch");

  const int m = g.m();
  std::vector<double> r(m);
  for (int e = 0; e < m; ++e) r[e] = g.arc(e).r;

  PNormResult out;
  RootedTree t = low_stretch_tree(g, r);
  out.f = complete_tree_flow(g, t, Flow(m, 0.0), b);

  const double st0 = total_stretch(g, t, r);
  const double big_r = g.r_ratio();
  const double c2 = p * std::pow(2.0, 2.0 * p - 1.0);
  const double n = g.n();
  const long long budget = budget_from_double(
      (c2 * st0 + m * std::pow(n * big_r, 1.0 / (p - 1.0))) * std::log(1.0 / eps) *
      (p * std::log(n) + std::log(big_r)));
  const long long iters = std::min(budget, opts.max_iters);

  out.trace.recording = opts.record_trace;
  out.trace.algo = "pnorm-cycle";
  out.trace.eps = eps;
  out.trace.tau = st0;
  out.trace.K = budget;

  std::vector<int> nontree;
  std::vector<double> cum;
  nontree.reserve(m);
  cum.reserve(m);

  double energy = primal_energy(g, out.f, p);
  const long long window = 10LL * std::max(1, m);
  double window_energy = energy;
  bool stalled = false;
  long long it = 0;

  while (it < iters && m > g.n() - 1) {
    if (it % opts.tree_refresh == 0) {
      const std::vector<double> mag = clamped_magnitudes(out.f);
      std::vector<double> wts(m);
      for (int e = 0; e < m; ++e) wts[e] = r[e] * powx(mag[e], p - 2.0);
      t = low_stretch_tree(g, wts);
      nontree.clear();
      cum.clear();
      double running = 0.0;
      for (int e = 0; e < m; ++e) {
        if (t.is_tree_arc[e]) continue;
        const Arc& a = g.arc(e);
        const double t1 = c2 * ((tree_path_sum(t, wts, a.tail, a.head) + wts[e]) / wts[e]);
        const double t2 =
            powx(c2 * ((tree_path_sum(t, r, a.tail, a.head) + r[e]) / r[e]), 1.0 / (p - 1.0));
        nontree.push_back(e);
        running += std::max(t1, t2);
        cum.push_back(running);
      }
    }

    ++it;
    const int e = nontree[rng.pick(cum)];
    const std::vector<CycleArc> cycle = fundamental_cycle(g, t, e);
    std::vector<std::pair<double, double>> seg;
    seg.reserve(cycle.size());
    for (const CycleArc& c : cycle) seg.push_back({r[c.arc], c.sign * out.f[c.arc]});
    const double delta = cycle_delta_root(seg, p);

    double before = 0.0, after = 0.0;
    for (const auto& [rr, ff] : seg) {
      before += rr * powx(std::abs(ff), p) / p;
      after += rr * powx(std::abs(ff + delta), p) / p;
    }
    if (after <= before) {
      for (const CycleArc& c : cycle) out.f[c.arc] += c.sign * delta;
      energy += after - before;
      out.trace.add(it, e, delta, energy);
    } else {
      out.trace.add(it, e, 0.0, energy);
    }

    if (it % window == 0) {
      if (std::abs(window_energy - energy) < 1e-12 * std::max(1.0, std::abs(energy))) {
        stalled = true;
        break;
      }
      window_energy = energy;
    }
  }

  out.trace.iterations_run = it;
  out.converged = stalled || it >= budget || m == g.n() - 1;
  out.x = potentials_from_tree_voltages(g, t, [&] {
    std::vector<double> vol(m, 0.0);
    for (int e : t.tree_arcs) vol[e] = r[e] * out.f[e] * powx(std::abs(out.f[e]), p - 2.0);
    return vol;
  }());
  out.final_energy = primal_energy(g, out.f, p);
  out.final_dual = dual_objective(g, out.x, b, PNormParams::make(g, p));
  return out;
}

PNormResult pnorm_cut_solve(const Graph& g, const Supply& b, double p, double eps, Rng& rng,
                            const PNormOptions& opts) {
  if (!(p > 1.0) || !(p <= 2.0)) throw std::invalid_argument("cut toggling needs 1 < p <= 2");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
  if (opts.tree_refresh < 1) throw std::invalid_argument("tree_refresh must be positive");
  validate_supply(b);
  if (static_cast<int>(b.size()) != g.n()) throw std::invalid_argument("supply size mismatch");

  const int m = g.m();
  const int nv = g.n();
  const PNormParams params = PNormParams::make(g, p);
  const double q = params.q;
  const double c2 = q * std::pow(2.0, 2.0 * q - 1.0);

  std::vector<double> r(m);
  for (int e = 0; e < m; ++e) r[e] = g.arc(e).r;

  PNormResult out;
  out.x.assign(nv, 0.0);

  RootedTree t = low_stretch_tree(g, r);
  const double st0 = total_stretch(g, t, r);
  const double big_r = g.r_ratio();
  const long long budget = budget_from_double(
      (c2 * st0 + nv * big_r * std::pow(static_cast<double>(m), 1.0 / (q - 1.0))) *
      std::log(1.0 / eps));
  const long long iters = std::min(budget, opts.max_iters);

  out.trace.recording = opts.record_trace;
  out.trace.algo = "pnorm-cut";
  out.trace.eps = eps;
  out.trace.tau = st0;
  out.trace.K = budget;

  std::vector<double> cum;
  std::vector<double> b_c;
  double objective = 0.0;
  const long long window = 10LL * std::max(1, m);
  double window_obj = 0.0;
  bool stalled = false;
  long long it = 0;

  std::vector<double> dx(m), v_wt(m);
  while (it < iters && nv > 1) {
    if (it % opts.tree_refresh == 0) {
      for (int e = 0; e < m; ++e) {
        const Arc& a = g.arc(e);
        dx[e] = out.x[a.tail] - out.x[a.head];
      }
      const std::vector<double> mag = clamped_magnitudes(dx);
      std::vector<double> u(m);
      for (int e = 0; e < m; ++e) {
        // q == 2 keeps the resistances exactly, avoiding the double
        // inversion 1/w that can reorder equal-weight comparisons
        u[e] = q == 2.0 ? r[e] : powx(mag[e], 2.0 - q) / params.w[e];
        v_wt[e] = params.w[e] * powx(mag[e], q - 2.0);
      }
      t = low_stretch_tree(g, u);
      b_c = subtree_sums(t, b);
      const std::vector<double> sv = accumulate_cut_boundaries(g, t, v_wt);
      const std::vector<double> sw = accumulate_cut_boundaries(g, t, params.w);
      cum.clear();
      double running = 0.0;
      for (std::size_t i = 1; i < t.order.size(); ++i) {
        const int v = t.order[i];
        const int arc = t.parent_arc[v];
        const double t1 = c2 * (sv[v] / v_wt[arc]);
        const double t2 = powx(c2 * (sw[v] / params.w[arc]), 1.0 / (q - 1.0));
        running += std::max(t1, t2);
        cum.push_back(running);
      }
    }

    ++it;
    const int v = t.order[rng.pick(cum) + 1];
    std::vector<std::pair<double, double>> items;
    for (int e = 0; e < m; ++e) {
      const Arc& a = g.arc(e);
      const bool tin = t.in_subtree(a.tail, v);
      if (tin == t.in_subtree(a.head, v)) continue;
      const double aval = tin ? out.x[a.tail] - out.x[a.head] : out.x[a.head] - out.x[a.tail];
      items.push_back({params.w[e], aval});
    }
    const double delta = cut_delta_root(items, b_c[v], q);

    double gain = b_c[v] * delta;
    for (const auto& [w, a] : items)
      gain -= (powx(std::abs(a + delta), q) - powx(std::abs(a), q)) * w / q;
    if (gain >= 0.0) {
      for (int i = t.tin[v]; i <= t.tout[v]; ++i) out.x[t.order[i]] += delta;
      objective += gain;
      out.trace.add(it, t.parent_arc[v], delta, objective);
    } else {
      out.trace.add(it, t.parent_arc[v], 0.0, objective);
    }

    if (it % window == 0) {
      if (std::abs(window_obj - objective) < 1e-12 * std::max(1.0, std::abs(objective))) {
        stalled = true;
        break;
      }
      window_obj = objective;
    }
  }

  out.trace.iterations_run = it;
  out.converged = stalled || it >= budget;
  out.f = dual_to_flow(g, t, out.x, b, p);
  out.final_energy = primal_energy(g, out.f, p);
  out.final_dual = dual_objective(g, out.x, b, params);
  return out;
}

}  // namespace toggleflow
