#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "toggleflow/oracles.hpp"
#include "toggleflow/solvers.hpp"

using namespace toggleflow;

TEST_CASE("complete_tree_flow routes the supply through the tree") {
  Graph g = tftest::triangle();
  RootedTree t = build_rooted_tree(g, {0, 1});
  const Supply b = tftest::triangle_supply();
  const Flow f = complete_tree_flow(g, t, Flow(3, 0.0), b);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 1.0);
  CHECK(f[2] == 0.0);
  CHECK(primal_energy(g, f, 2.0) == 1.0);
  CHECK(feasibility_residual(g, f, b) == 0.0);
}

TEST_CASE("complete_tree_flow keeps prescribed off-tree values") {
  Rng rng(21);
  Graph g = tftest::random_connected(15, 12, 8.0, rng);
  const Supply b = tftest::random_supply(g.n(), rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);
  Flow off(g.m());
  for (int e = 0; e < g.m(); ++e) off[e] = rng.uniform(-1.0, 1.0);
  const Flow f = complete_tree_flow(g, t, off, b);
  for (int e = 0; e < g.m(); ++e)
    if (!t.is_tree_arc[e]) CHECK(f[e] == off[e]);
  CHECK(feasibility_residual(g, f, b) < 1e-12);
}

TEST_CASE("one cycle toggle solves the triangle") {
  Graph g = tftest::triangle();
  const Supply b = tftest::triangle_supply();
  Rng rng(1);
  SolveOptions opts;
  opts.record_trace = true;
  // tau' = 3, so eps = 2.9 gives a budget of exactly one toggle
  PrimalSolveResult res = kosz(g, b, 2.9, rng, opts);

  CHECK(res.trace.tau == 3.0);
  CHECK(res.trace.K == 1);
  CHECK(res.trace.iterations_run == 1);
  REQUIRE(res.trace.records.size() == 1);
  CHECK(res.trace.records[0].elem == 2);
  CHECK(res.trace.records[0].delta == 2.0 / 3.0);
  CHECK(res.trace.records[0].obj == doctest::Approx(1.0 / 3).epsilon(1e-14));

  CHECK(res.f[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(res.f[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(res.f[2] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(res.x[0] == 0.0);
  CHECK(res.x[1] == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  CHECK(res.x[2] == doctest::Approx(-2.0 / 3).epsilon(1e-14));
}

TEST_CASE("cycle toggling on a tree needs no iterations") {
  Graph g(4, {{0, 1, 2.0}, {1, 2, 1.0}, {2, 3, 4.0}});
  const Supply b = {2.0, -1.0, 0.0, -1.0};
  Rng rng(3);
  SolveOptions opts;
  opts.record_trace = true;
  PrimalSolveResult res = kosz(g, b, 0.01, rng, opts);
  CHECK(res.trace.tau == 0.0);
  CHECK(res.trace.K == 0);
  CHECK(res.trace.iterations_run == 0);
  CHECK(feasibility_residual(g, res.f, b) < 1e-14);
}

TEST_CASE("cycle toggling never increases the energy") {
  Rng rng(77);
  Graph g = tftest::random_connected(40, 50, 20.0, rng);
  const Supply b = tftest::random_supply(g.n(), rng);
  SolveOptions opts;
  opts.record_trace = true;
  PrimalSolveResult res = kosz(g, b, 0.1, rng, opts);

  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, w);  // same deterministic tree as the solver
  double prev = primal_energy(g, complete_tree_flow(g, t, Flow(g.m(), 0.0), b), 2.0);
  for (const TraceRecord& rec : res.trace.records) {
    CHECK(rec.obj <= prev + 1e-12 * std::max(1.0, prev));
    prev = rec.obj;
  }
  CHECK(res.trace.records.back().obj ==
        doctest::Approx(primal_energy(g, res.f, 2.0)).epsilon(1e-9));
  CHECK(feasibility_residual(g, res.f, b) < 1e-10);
}

TEST_CASE("cut toggling converges on the triangle") {
  Graph g = tftest::triangle();
  const Supply b = tftest::triangle_supply();
  Rng rng(5);
  SolveOptions opts;
  opts.record_trace = true;
  DualSolveResult res = dual_kosz(g, b, 0.01, rng, opts);

  CHECK(res.trace.tau == 4.0);
  CHECK(res.trace.K == 24);  // ceil(4 ln 400)
  const PNormParams quad = PNormParams::make(g, 2.0);
  CHECK(dual_objective(g, res.x, b, quad) == doctest::Approx(1.0 / 3).epsilon(1e-3));
  CHECK(duality_gap(g, res.f, res.x, b) < 5e-3);

  // the dual objective never decreases and ends at the recorded value
  double prev = 0.0;
  for (const TraceRecord& rec : res.trace.records) {
    CHECK(rec.obj >= prev - 1e-15);
    prev = rec.obj;
  }
  CHECK(prev == doctest::Approx(dual_objective(g, res.x, b, quad)).epsilon(1e-9));
}

TEST_CASE("same seed, same run") {
  Rng rng_graph(1234);
  Graph g = tftest::random_connected(30, 35, 15.0, rng_graph);
  const Supply b = tftest::random_supply(g.n(), rng_graph);

  Rng r1(9001), r2(9001);
  DualSolveResult a = dual_kosz(g, b, 0.1, r1);
  DualSolveResult c = dual_kosz(g, b, 0.1, r2);
  for (int v = 0; v < g.n(); ++v) CHECK(a.x[v] == c.x[v]);
  for (int e = 0; e < g.m(); ++e) CHECK(a.f[e] == c.f[e]);

  Rng r3(9001), r4(9001);
  PrimalSolveResult p1 = kosz(g, b, 0.1, r3);
  PrimalSolveResult p2 = kosz(g, b, 0.1, r4);
  for (int e = 0; e < g.m(); ++e) CHECK(p1.f[e] == p2.f[e]);
}

TEST_CASE("naive and table cut-flow backends agree") {
  Rng rng_graph(555);
  Graph g = tftest::random_connected(25, 30, 10.0, rng_graph);
  const Supply b = tftest::random_supply(g.n(), rng_graph);

  Rng r1(42), r2(42);
  SolveOptions naive_opts;
  naive_opts.naive_cutflow = true;
  DualSolveResult a = dual_kosz(g, b, 0.05, r1);
  DualSolveResult c = dual_kosz(g, b, 0.05, r2, naive_opts);
  for (int v = 0; v < g.n(); ++v) CHECK(a.x[v] == doctest::Approx(c.x[v]).epsilon(1e-9));
}

TEST_CASE("max_iters truncates but keeps the computed budget") {
  Graph g = tftest::triangle();
  Rng rng(8);
  SolveOptions opts;
  opts.max_iters = 3;
  opts.record_trace = true;
  DualSolveResult res = dual_kosz(g, tftest::triangle_supply(), 0.01, rng, opts);
  CHECK(res.trace.K == 24);
  CHECK(res.trace.iterations_run == 3);
  CHECK(res.trace.records.size() == 3);
}

TEST_CASE("both solvers approach the dense reference") {
  Rng rng_graph(31337);
  Graph g = tftest::random_connected(40, 60, 10.0, rng_graph);
  const Supply b = tftest::random_supply(g.n(), rng_graph);
  const Potentials xs = solve_laplacian_dense(g, b);
  const PNormParams quad = PNormParams::make(g, 2.0);
  const double opt = dual_objective(g, xs, b, quad);  // = optimal energy

  Rng r1(7), r2(7);
  DualSolveResult dres = dual_kosz(g, b, 0.05, r1);
  PrimalSolveResult pres = kosz(g, b, 0.05, r2);
  CHECK(primal_energy(g, dres.f, 2.0) <= 1.3 * opt);
  CHECK(primal_energy(g, pres.f, 2.0) <= 1.3 * opt);
  CHECK(duality_gap(g, dres.f, dres.x, b) <= 0.5 * opt);
}

TEST_CASE("tree defined flow is feasible and ohmic off the tree") {
  Rng rng(64);
  Graph g = tftest::random_connected(20, 25, 12.0, rng);
  const Supply b = tftest::random_supply(g.n(), rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);
  Potentials x(g.n());
  for (int v = 0; v < g.n(); ++v) x[v] = rng.uniform(-3.0, 3.0);

  const Flow f = tree_defined_flow(g, t, x, b);
  CHECK(feasibility_residual(g, f, b) < 1e-12);
  for (int e = 0; e < g.m(); ++e) {
    if (t.is_tree_arc[e]) continue;
    const Arc& a = g.arc(e);
    CHECK(f[e] == (x[a.tail] - x[a.head]) / a.r);
  }
}

TEST_CASE("potentials_from_tree_voltages reproduces the arc drops") {
  Rng rng(17);
  Graph g = tftest::random_connected(18, 10, 6.0, rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);
  std::vector<double> voltage(g.m(), 0.0);
  for (int e : t.tree_arcs) voltage[e] = rng.uniform(-2.0, 2.0);
  const Potentials x = potentials_from_tree_voltages(g, t, voltage);
  CHECK(x[t.root] == 0.0);
  for (int e : t.tree_arcs) {
    const Arc& a = g.arc(e);
    CHECK(x[a.tail] - x[a.head] == doctest::Approx(voltage[e]).epsilon(1e-12));
  }
}

TEST_CASE("cut flows from potentials match a per-cut scan") {
  Rng rng(29);
  Graph g = tftest::random_connected(16, 20, 9.0, rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);
  Potentials x(g.n());
  for (int v = 0; v < g.n(); ++v) x[v] = rng.uniform(-1.0, 1.0);

  const std::vector<double> fast = cut_flows_from_potentials(g, t, x);
  for (int v = 0; v < g.n(); ++v) {
    if (v == t.root) continue;
    double want = 0.0;
    for (int e = 0; e < g.m(); ++e) {
      const Arc& a = g.arc(e);
      const bool tin = t.in_subtree(a.tail, v);
      const bool hin = t.in_subtree(a.head, v);
      if (tin == hin) continue;
      const double ohmic = (x[a.tail] - x[a.head]) / a.r;
      want += tin ? ohmic : -ohmic;
    }
    CHECK(fast[v] == doctest::Approx(want).epsilon(1e-10));
  }
}
