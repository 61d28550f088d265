#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace toggleflow {

// One undirected edge with a fixed reference orientation tail -> head.
// Flow values are signed with respect to this orientation.
struct Arc {
  int tail;
  int head;
  double r;  // resistance, > 0
};

using Flow = std::vector<double>;        // per arc
using Potentials = std::vector<double>;  // per vertex
using Supply = std::vector<double>;      // per vertex, zero-sum

// Undirected multigraph with positive resistances. Parallel arcs are fine,
// self-loops are not. Connectivity is checked at construction; everything
// downstream relies on it.
class Graph {
 public:
  struct Incidence {
    int arc;
    int sign;  // +1 if the vertex is the tail, -1 if it is the head
  };

  Graph(int n, std::vector<Arc> arcs);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int m() const { return static_cast<int>(arcs_.size()); }
  [[nodiscard]] const Arc& arc(int e) const { return arcs_[e]; }
  [[nodiscard]] const std::vector<Arc>& arcs() const { return arcs_; }
  [[nodiscard]] const std::vector<Incidence>& incident(int v) const { return adj_[v]; }

  // max resistance / min resistance
  [[nodiscard]] double r_ratio() const { return r_ratio_; }

 private:
  int n_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<Incidence>> adj_;
  double r_ratio_;
};

// std::pow with the exponents that must stay bit-exact handled explicitly.
// The p = 2 specializations of the p-norm solvers reproduce the quadratic
// solvers' sampling decisions only because these cases introduce no rounding.
inline double powx(double base, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return base;
  if (e == -1.0) return 1.0 / base;
  return std::pow(base, e);
}

// p > 1, its conjugate q = p/(p-1), and the dual edge weights w = r^{-1/(p-1)}.
struct PNormParams {
  double p = 2.0;
  double q = 2.0;
  std::vector<double> w;

  static PNormParams make(const Graph& g, double p);
};

// (1/p) * sum r |f|^p
double primal_energy(const Graph& g, const Flow& f, double p);

// b.x - (1/q) * sum w |x(tail) - x(head)|^q
double dual_objective(const Graph& g, const Potentials& x, const Supply& b,
                      const PNormParams& params);

// L x without materializing L.
std::vector<double> apply_laplacian(const Graph& g, const Potentials& x);

// A f: net outflow per vertex.
std::vector<double> flow_divergence(const Graph& g, const Flow& f);

// f(i,j) = w(i,j) (x(i)-x(j)) |x(i)-x(j)|^{q-2}; Ohm's law at p = 2.
Flow potential_defined_flow(const Graph& g, const Potentials& x, const PNormParams& params);

// ||Af - b||_inf
double feasibility_residual(const Graph& g, const Flow& f, const Supply& b);

// E(f) - B(x) for the quadratic problem. f must be a feasible b-flow
// (residual <= 1e-8 * max(1, ||b||_inf)); throws otherwise.
double duality_gap(const Graph& g, const Flow& f, const Potentials& x, const Supply& b);

// The same gap as (1/2) sum r (f - dx/r)^2; agrees with duality_gap for
// feasible flows.
double duality_gap_quadratic(const Graph& g, const Flow& f, const Potentials& x);

// Throws unless sum b = 0 within 1e-12 * ||b||_1.
void validate_supply(const Supply& b);

// Text formats: graph files are "n m" then m lines "tail head resistance";
// supply files are n lines "vertex value".
Graph read_graph(const std::string& path);
Supply read_supply(const std::string& path, int n);
void write_graph(const Graph& g, const std::string& path);
void write_supply(const Supply& b, const std::string& path);

}  // namespace toggleflow
