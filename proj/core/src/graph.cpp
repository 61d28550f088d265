#include "toggleflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace toggleflow {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

Graph::Graph(int n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {
  if (n_ <= 0) throw std::invalid_argument("graph needs at least one vertex");
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (std::size_t e = 0; e < arcs_.size(); ++e) {
    const Arc& a = arcs_[e];
    if (a.tail < 0 || a.tail >= n_ || a.head < 0 || a.head >= n_)
      throw std::invalid_argument("arc " + std::to_string(e) + " references a vertex out of range");
    if (a.tail == a.head)
      throw std::invalid_argument("arc " + std::to_string(e) + " is a self-loop");
    if (!(a.r > 0.0) || !std::isfinite(a.r))
      throw std::invalid_argument("arc " + std::to_string(e) + " has non-positive resistance");
    rmin = std::min(rmin, a.r);
    rmax = std::max(rmax, a.r);
  }
  r_ratio_ = arcs_.empty() ? 1.0 : rmax / rmin;

  adj_.assign(n_, {});
  for (std::size_t e = 0; e < arcs_.size(); ++e) {
    adj_[arcs_[e].tail].push_back({static_cast<int>(e), +1});
    adj_[arcs_[e].head].push_back({static_cast<int>(e), -1});
  }

  // Connectivity: BFS from 0, and if anything is unreached, report one
  // vertex from each side so the caller can see the two components.
  std::vector<char> seen(n_, 0);
  std::vector<int> queue = {0};
  seen[0] = 1;
  std::size_t head = 0;
  int reached = 1;
  while (head < queue.size()) {
    int v = queue[head++];
    for (const Incidence& inc : adj_[v]) {
      const Arc& a = arcs_[inc.arc];
      int u = inc.sign > 0 ? a.head : a.tail;
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        queue.push_back(u);
      }
    }
  }
  if (reached != n_) {
    int missing = -1;
    for (int v = 0; v < n_; ++v)
      if (!seen[v]) {
        missing = v;
        break;
      }
    throw std::invalid_argument(
        "graph is disconnected: the component containing vertex 0 (size " +
        std::to_string(reached) + ") does not reach vertex " + std::to_string(missing));
  }
}

PNormParams PNormParams::make(const Graph& g, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("p must be a finite real > 1");
  PNormParams params;
  params.p = p;
  params.q = p / (p - 1.0);
  params.w.resize(g.m());
  const double expo = -1.0 / (p - 1.0);
  for (int e = 0; e < g.m(); ++e) params.w[e] = powx(g.arc(e).r, expo);
  return params;
}

double primal_energy(const Graph& g, const Flow& f, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (!all_finite(f)) throw std::domain_error("flow has a non-finite entry");
  double total = 0.0;
  for (int e = 0; e < g.m(); ++e) total += g.arc(e).r * std::pow(std::abs(f[e]), p);
  return total / p;
}

double dual_objective(const Graph& g, const Potentials& x, const Supply& b,
                      const PNormParams& params) {
  if (!all_finite(x)) throw std::domain_error("potentials have a non-finite entry");
  double bx = 0.0;
  for (int v = 0; v < g.n(); ++v) bx += b[v] * x[v];
  double reg = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    reg += params.w[e] * std::pow(std::abs(x[a.tail] - x[a.head]), params.q);
  }
  return bx - reg / params.q;
}

std::vector<double> apply_laplacian(const Graph& g, const Potentials& x) {
  std::vector<double> out(g.n(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    const double i = (x[a.tail] - x[a.head]) / a.r;
    out[a.tail] += i;
    out[a.head] -= i;
  }
  return out;
}

std::vector<double> flow_divergence(const Graph& g, const Flow& f) {
  std::vector<double> out(g.n(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    out[a.tail] += f[e];
    out[a.head] -= f[e];
  }
  return out;
}

Flow potential_defined_flow(const Graph& g, const Potentials& x, const PNormParams& params) {
  Flow f(g.m(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    const double dx = x[a.tail] - x[a.head];
    f[e] = params.w[e] * dx * powx(std::abs(dx), params.q - 2.0);
  }
  return f;
}

double feasibility_residual(const Graph& g, const Flow& f, const Supply& b) {
  std::vector<double> div = flow_divergence(g, f);
  double res = 0.0;
  for (int v = 0; v < g.n(); ++v) res = std::max(res, std::abs(div[v] - b[v]));
  return res;
}

double duality_gap(const Graph& g, const Flow& f, const Potentials& x, const Supply& b) {
  double bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  if (feasibility_residual(g, f, b) > 1e-8 * std::max(1.0, bmax))
    throw std::invalid_argument("duality_gap requires a feasible b-flow");
  PNormParams two;
  two.p = 2.0;
  two.q = 2.0;
  two.w.resize(g.m());
  for (int e = 0; e < g.m(); ++e) two.w[e] = 1.0 / g.arc(e).r;
  return primal_energy(g, f, 2.0) - dual_objective(g, x, b, two);
}

double duality_gap_quadratic(const Graph& g, const Flow& f, const Potentials& x) {
  double total = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    const double d = f[e] - (x[a.tail] - x[a.head]) / a.r;
    total += a.r * d * d;
  }
  return total / 2.0;
}

void validate_supply(const Supply& b) {
  double sum = 0.0;
  double norm1 = 0.0;
  for (double v : b) {
    if (!std::isfinite(v)) throw std::domain_error("supply has a non-finite entry");
    sum += v;
    norm1 += std::abs(v);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, norm1))
    throw std::invalid_argument("supply does not sum to zero");
}

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("graph file missing 'n m' header: " + path);
  std::vector<Arc> arcs;
  arcs.reserve(m);
  for (int e = 0; e < m; ++e) {
    Arc a{};
    if (!(in >> a.tail >> a.head >> a.r))
      throw std::invalid_argument("graph file truncated at arc " + std::to_string(e) + ": " + path);
    arcs.push_back(a);
  }
  return Graph(n, std::move(arcs));
}

Supply read_supply(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open supply file: " + path);
  Supply b(n, 0.0);
  std::vector<char> seen(n, 0);
  int v = 0;
  double value = 0.0;
  int count = 0;
  while (in >> v >> value) {
    if (v < 0 || v >= n) throw std::invalid_argument("supply vertex out of range: " + std::to_string(v));
    if (seen[v]) throw std::invalid_argument("supply lists vertex twice: " + std::to_string(v));
    seen[v] = 1;
    b[v] = value;
    ++count;
  }
  if (count != n) throw std::invalid_argument("supply file must list every vertex once: " + path);
  validate_supply(b);
  return b;
}

void write_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write graph file: " + path);
  out << g.n() << ' ' << g.m() << '\n';
  out.precision(17);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    out << a.tail << ' ' << a.head << ' ' << a.r << '\n';
  }
}

void write_supply(const Supply& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write supply file: " + path);
  out.precision(17);
  for (std::size_t v = 0; v < b.size(); ++v) out << v << ' ' << b[v] << '\n';
}

}  // namespace toggleflow
