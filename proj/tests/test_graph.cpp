#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "doctest.h"
#include "test_util.hpp"
#include "toggleflow/graph.hpp"

using namespace toggleflow;

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph(2, {{0, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_WITH(Graph(3, {{0, 1, 1.0}}),
                    doctest::Contains("disconnected"));
}

TEST_CASE("r_ratio") {
  Graph g(3, {{0, 1, 2.0}, {1, 2, 8.0}, {0, 2, 4.0}});
  CHECK(g.r_ratio() == 4.0);
}

TEST_CASE("powx exact exponents") {
  const double vals[] = {0.3, 1.0, 7.25, 1e-9, 123456.75};
  for (double v : vals) {
    CHECK(powx(v, 0.0) == 1.0);
    CHECK(powx(v, 1.0) == v);
    CHECK(powx(v, -1.0) == 1.0 / v);
    CHECK(powx(v, 1.7) == std::pow(v, 1.7));
  }
}

TEST_CASE("pnorm params at p = 2 invert resistances without rounding") {
  Rng rng(11);
  Graph g = tftest::random_connected(10, 8, 100.0, rng);
  const PNormParams params = PNormParams::make(g, 2.0);
  CHECK(params.q == 2.0);
  for (int e = 0; e < g.m(); ++e) CHECK(params.w[e] == 1.0 / g.arc(e).r);
  CHECK_THROWS_AS(PNormParams::make(g, 1.0), std::invalid_argument);
}

TEST_CASE("triangle energies and objectives") {
  Graph g = tftest::triangle();
  const Supply b = tftest::triangle_supply();

  const Flow f_opt = {1.0 / 3, 1.0 / 3, 2.0 / 3};
  const Potentials x_opt = {1.0 / 3, 0.0, -1.0 / 3};
  const PNormParams quad = PNormParams::make(g, 2.0);

  CHECK(primal_energy(g, f_opt, 2.0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(dual_objective(g, x_opt, b, quad) == doctest::Approx(1.0 / 3).epsilon(1e-14));

  const Flow f_tree = {1.0, 1.0, 0.0};
  CHECK(primal_energy(g, f_tree, 2.0) == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<double> lx = apply_laplacian(g, {2.0 / 3, 0.0, 1.0 / 3});
  CHECK(lx[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lx[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(lx[2] == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(feasibility_residual(g, f_opt, b) < 1e-14);
  const std::vector<double> div = flow_divergence(g, f_tree);
  CHECK(div[0] == doctest::Approx(1.0));
  CHECK(div[2] == doctest::Approx(-1.0));
}

TEST_CASE("duality gap forms agree on the triangle") {
  Graph g = tftest::triangle();
  const Supply b = tftest::triangle_supply();
  const Flow f_tree = {1.0, 1.0, 0.0};
  const Potentials zero(3, 0.0);
  const Potentials x_opt = {1.0 / 3, 0.0, -1.0 / 3};

  CHECK(duality_gap(g, f_tree, zero, b) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(duality_gap_quadratic(g, f_tree, zero) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(duality_gap(g, f_tree, x_opt, b) == doctest::Approx(2.0 / 3).epsilon(1e-13));
  CHECK(duality_gap_quadratic(g, f_tree, x_opt) == doctest::Approx(2.0 / 3).epsilon(1e-13));

  const Flow infeasible = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)duality_gap(g, infeasible, zero, b), std::invalid_argument);
}

TEST_CASE("potential defined flow") {
  Graph g(2, {{0, 1, 1.0}});
  const PNormParams p3 = PNormParams::make(g, 3.0);
  const Flow f = potential_defined_flow(g, {4.0, 0.0}, p3);
  CHECK(f[0] == doctest::Approx(2.0).epsilon(1e-14));  // w dx |dx|^{q-2}, q = 3/2

  const PNormParams p2 = PNormParams::make(g, 2.0);
  const Flow f2 = potential_defined_flow(g, {4.0, 0.0}, p2);
  CHECK(f2[0] == 4.0);
}

TEST_CASE("supply validation") {
  CHECK_NOTHROW(validate_supply({1.0, -1.0}));
  CHECK_THROWS_AS(validate_supply({1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate_supply({1.0, std::nan("")}), std::domain_error);
}

TEST_CASE("graph and supply io round trip") {
  Rng rng(5);
  Graph g = tftest::random_connected(8, 6, 10.0, rng);
  const Supply b = tftest::random_supply(8, rng);

  const std::string gp = "/tmp/tf_test_roundtrip.graph";
  const std::string sp = "/tmp/tf_test_roundtrip.supply";
  write_graph(g, gp);
  write_supply(b, sp);
  Graph g2 = read_graph(gp);
  const Supply b2 = read_supply(sp, g2.n());

  REQUIRE(g2.n() == g.n());
  REQUIRE(g2.m() == g.m());
  for (int e = 0; e < g.m(); ++e) {
    CHECK(g2.arc(e).tail == g.arc(e).tail);
    CHECK(g2.arc(e).head == g.arc(e).head);
    CHECK(g2.arc(e).r == g.arc(e).r);
  }
  for (int v = 0; v < g.n(); ++v) CHECK(b2[v] == b[v]);
  std::remove(gp.c_str());
  std::remove(sp.c_str());
}
