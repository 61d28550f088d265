#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "toggleflow/solvers.hpp"
#include "toggleflow/treeflow.hpp"

using namespace toggleflow;

namespace {

// chi_e(v) = [tail in subtree(v)] - [head in subtree(v)]
double chi(const Graph& g, const RootedTree& t, int e, int v) {
  const Arc& a = g.arc(e);
  return (t.in_subtree(a.tail, v) ? 1.0 : 0.0) - (t.in_subtree(a.head, v) ? 1.0 : 0.0);
}

double h_bruteforce(const Graph& g, const RootedTree& t, int a, int c) {
  double total = 0.0;
  for (int e = 0; e < g.m(); ++e)
    total += chi(g, t, e, a) * chi(g, t, e, c) / g.arc(e).r;
  return total;
}

}  // namespace

TEST_CASE("interaction table on a path with a chord") {
  Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {1, 3, 1.0}});
  RootedTree t = build_rooted_tree(g, {0, 1, 2});
  const std::vector<double> h = precompute_interaction_table(g, t);
  const int n = g.n();

  // nested cuts joined by the chord interact positively
  CHECK(h[2 * n + 3] == 1.0);
  CHECK(h[3 * n + 2] == 1.0);
  // diagonal = 1 / R_C
  CHECK(h[1 * n + 1] == 1.0);
  CHECK(h[2 * n + 2] == 2.0);
  CHECK(h[3 * n + 3] == 2.0);
  // root rows stay zero
  for (int c = 0; c < n; ++c) CHECK(h[0 * n + c] == 0.0);
}

TEST_CASE("interaction table on sibling cuts") {
  Graph g(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
  RootedTree t = build_rooted_tree(g, {0, 1});
  const std::vector<double> h = precompute_interaction_table(g, t);
  CHECK(h[1 * 3 + 2] == -1.0);
  CHECK(h[2 * 3 + 1] == -1.0);
  CHECK(h[1 * 3 + 1] == 2.0);
  CHECK(h[2 * 3 + 2] == 2.0);
}

TEST_CASE("interaction table matches its definition") {
  Rng rng(808);
  Graph g = tftest::random_connected(12, 14, 40.0, rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);
  const std::vector<double> h = precompute_interaction_table(g, t);
  for (int a = 0; a < g.n(); ++a)
    for (int c = 0; c < g.n(); ++c) {
      const double want = a == t.root ? 0.0 : h_bruteforce(g, t, a, c);
      CHECK(h[a * g.n() + c] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("single toggle on the two-child fixture") {
  Graph g(3, {{1, 0, 1.0}, {2, 0, 1.0}, {1, 2, 1.0}});
  const Supply b = {0.0, 1.0, -1.0};
  RootedTree t = build_rooted_tree(g, {0, 1});
  CutTable cuts = build_cut_table(g, t, b);

  TreeFlowTable state(g, t, b);
  CHECK(state.findflow(1) == 1.0);
  CHECK(state.findflow(2) == -1.0);

  const double delta = cut_toggle_step(state, cuts, 1);
  CHECK(delta == 0.5);
  CHECK(delta * delta / (2.0 * cuts.R_C[1]) == 0.25);  // objective gain

  // the sibling cut sees the toggle through H(1,2) = -1
  CHECK(state.cut_flow(2) == -0.5);
  CHECK(state.findflow(2) == -0.5);
  CHECK(state.findflow(1) == 0.0);
}

TEST_CASE("naive and table structures stay identical under random ops") {
  Rng rng(4096);
  for (int trial = 0; trial < 6; ++trial) {
    Graph g = tftest::random_connected(16 + trial, 12 + trial, 30.0, rng);
    const Supply b = tftest::random_supply(g.n(), rng);
    std::vector<double> w(g.m());
    for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
    RootedTree t = low_stretch_tree(g, w);

    TreeFlowNaive naive(g, t, b);
    TreeFlowTable table(g, t, b);
    for (int op = 0; op < 120; ++op) {
      const int v = 1 + static_cast<int>(rng.below(g.n() - 1));
      const int cv = t.order[1 + static_cast<int>(rng.below(g.n() - 1))];
      if (op % 3 != 2) {
        const double val = rng.uniform(-2.0, 2.0);
        naive.addvalue(v, val);
        table.addvalue(v, val);
      }
      CHECK(table.findflow(cv) == doctest::Approx(naive.findflow(cv)).epsilon(1e-9));
    }
    const Potentials& xt = table.values();
    const Potentials& xn = naive.values();
    for (int v = 0; v < g.n(); ++v) CHECK(xt[v] == doctest::Approx(xn[v]).epsilon(1e-9));
  }
}

TEST_CASE("recompute_all_cut_flows is a no-op up to roundoff") {
  Rng rng(515);
  Graph g = tftest::random_connected(20, 18, 10.0, rng);
  const Supply b = tftest::random_supply(g.n(), rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);

  TreeFlowTable state(g, t, b);
  for (int op = 0; op < 50; ++op)
    state.addvalue(1 + static_cast<int>(rng.below(g.n() - 1)), rng.uniform(-1.0, 1.0));
  std::vector<double> before(g.n());
  for (int v = 0; v < g.n(); ++v) before[v] = v == t.root ? 0.0 : state.findflow(v);
  state.recompute_all_cut_flows();
  for (int v = 0; v < g.n(); ++v) {
    if (v == t.root) continue;
    CHECK(state.findflow(v) == doctest::Approx(before[v]).epsilon(1e-11));
  }
}

TEST_CASE("table accessor agrees with the stored rows") {
  Rng rng(99);
  Graph g = tftest::random_connected(10, 9, 5.0, rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);
  TreeFlowTable state(g, t, Supply(g.n(), 0.0));
  const std::vector<double> h = precompute_interaction_table(g, t);
  for (int a = 0; a < g.n(); ++a)
    for (int c = 0; c < g.n(); ++c) CHECK(state.table(a, c) == h[a * g.n() + c]);
}
