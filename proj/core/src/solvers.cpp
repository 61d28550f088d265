#include "toggleflow/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace toggleflow {

namespace {

long long toggle_budget(double tau, double eps) {
  if (tau <= 0.0) return 0;
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double k = tau * std::log(tau / eps);
  if (k <= 0.0) return 0;
  return static_cast<long long>(std::ceil(k));
}

long long apply_cap(long long k, long long cap) { return cap > 0 && cap < k ? cap : k; }

}  // namespace

Flow complete_tree_flow(const Graph& g, const RootedTree& t, const Flow& off_tree,
                        const Supply& b) {
  Flow f(g.m(), 0.0);
  std::vector<double> residual = b;
  for (int e = 0; e < g.m(); ++e) {
    if (t.is_tree_arc[e]) continue;
    const Arc& a = g.arc(e);
    f[e] = off_tree[e];
    residual[a.tail] -= f[e];
    residual[a.head] += f[e];
  }
  std::vector<double> acc = subtree_sums(t, residual);
  for (std::size_t i = 1; i < t.order.size(); ++i) {
    const int v = t.order[i];
    const int e = t.parent_arc[v];
    f[e] = g.arc(e).tail == v ? acc[v] : -acc[v];
  }
  return f;
}

Flow tree_defined_flow(const Graph& g, const RootedTree& t, const Potentials& x, const Supply& b) {
  Flow off(g.m(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    if (t.is_tree_arc[e]) continue;
    const Arc& a = g.arc(e);
    off[e] = (x[a.tail] - x[a.head]) / a.r;
  }
  return complete_tree_flow(g, t, off, b);
}

Potentials potentials_from_tree_voltages(const Graph& g, const RootedTree& t,
                                         const std::vector<double>& voltage) {
  Potentials x(g.n(), 0.0);
  for (std::size_t i = 1; i < t.order.size(); ++i) {
    const int v = t.order[i];
    const int e = t.parent_arc[v];
    x[v] = g.arc(e).tail == v ? x[t.parent[v]] + voltage[e] : x[t.parent[v]] - voltage[e];
  }
  return x;
}

Potentials tree_defined_potentials(const Graph& g, const RootedTree& t, const Flow& f) {
  std::vector<double> voltage(g.m(), 0.0);
  for (int e : t.tree_arcs) voltage[e] = g.arc(e).r * f[e];
  return potentials_from_tree_voltages(g, t, voltage);
}

std::vector<double> cut_flows_from_potentials(const Graph& g, const RootedTree& t,
                                              const Potentials& x) {
  std::vector<double> local(g.n(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    const double ohmic = (x[a.tail] - x[a.head]) / a.r;
    local[a.tail] += ohmic;
    local[a.head] -= ohmic;
  }
  std::vector<double> acc = subtree_sums(t, local);
  acc[t.root] = 0.0;
  return acc;
}

DualSolveResult dual_kosz(const Graph& g, const Supply& b, double eps, Rng& rng,
                          const SolveOptions& opts) {
  validate_supply(b);
  if (static_cast<int>(b.size()) != g.n()) throw std::invalid_argument("supply size mismatch");

  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, r);
  const CutTable cuts = build_cut_table(g, t, b);

  const long long budget = toggle_budget(cuts.tau, eps);
  const long long iters = apply_cap(budget, opts.max_iters);

  DualSolveResult out;
  out.trace.recording = opts.record_trace;
  out.trace.algo = "dual-kosz";
  out.trace.eps = eps;
  out.trace.tau = cuts.tau;
  out.trace.K = budget;
  out.trace.iterations_run = iters;

  // the interaction table costs n^2 doubles; fall back to the O(m) reference
  // structure when that footprint is unreasonable
  const bool use_table =
      !opts.naive_cutflow &&
      static_cast<std::size_t>(g.n()) * static_cast<std::size_t>(g.n()) * 8 <= (1u << 28);

  double objective = 0.0;
  auto run = [&](auto& state) {
    for (long long it = 1; it <= iters; ++it) {
      const int idx = rng.pick(cuts.cum);
      const int v = cuts.verts[idx];
      const double delta = cut_toggle_step(state, cuts, v);
      objective += delta * delta / (2.0 * cuts.R_C[v]);
      out.trace.add(it, cuts.vert_arc[idx], delta, objective);
    }
    out.x = state.values();
  };
  if (use_table) {
    TreeFlowTable state(g, t, b);
    run(state);
  } else {
    TreeFlowNaive state(g, t, b);
    run(state);
  }

  out.f = tree_defined_flow(g, t, out.x, b);
  return out;
}

PrimalSolveResult kosz(const Graph& g, const Supply& b, double eps, Rng& rng,
                       const SolveOptions& opts) {
  validate_supply(b);
  if (static_cast<int>(b.size()) != g.n()) throw std::invalid_argument("supply size mismatch");

  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, r);

  PrimalSolveResult out;
  out.f = complete_tree_flow(g, t, Flow(g.m(), 0.0), b);

  std::vector<int> nontree;
  std::vector<double> cum;
  double tau = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    if (t.is_tree_arc[e]) continue;
    const Arc& a = g.arc(e);
    const double w = (tree_path_sum(t, r, a.tail, a.head) + a.r) / a.r;
    nontree.push_back(e);
    tau += w;
    cum.push_back(tau);
  }

  const long long budget = toggle_budget(tau, eps);
  const long long iters = apply_cap(budget, opts.max_iters);

  out.trace.recording = opts.record_trace;
  out.trace.algo = "kosz";
  out.trace.eps = eps;
  out.trace.tau = tau;
  out.trace.K = budget;
  out.trace.iterations_run = iters;

  double energy = primal_energy(g, out.f, 2.0);
  for (long long it = 1; it <= iters; ++it) {
    const int e = nontree[rng.pick(cum)];
    const std::vector<CycleArc> cycle = fundamental_cycle(g, t, e);
    double num = 0.0, den = 0.0;
    for (const CycleArc& c : cycle) {
      num += c.sign * g.arc(c.arc).r * out.f[c.arc];
      den += g.arc(c.arc).r;
    }
    const double delta = -num / den;
    for (const CycleArc& c : cycle) out.f[c.arc] += c.sign * delta;
    energy -= num * num / (2.0 * den);
    out.trace.add(it, e, delta, energy);
  }

  out.x = tree_defined_potentials(g, t, out.f);
  return out;
}

}  // namespace toggleflow
