#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "toggleflow/batched.hpp"

using namespace toggleflow;

TEST_CASE("contract_block on the triangle path tree") {
  Graph g = tftest::triangle();
  RootedTree t = build_rooted_tree(g, {0, 1});

  SUBCASE("deep cut only") {
    BlockContraction c = contract_block(g, t, {2});
    CHECK(c.parts == 2);
    CHECK(c.part_of == std::vector<int>{0, 0, 1});
    CHECK(c.part_parent == std::vector<int>{-1, 0});
    CHECK(c.part_parent_cutv == std::vector<int>{-1, 2});
    CHECK(c.part_order == std::vector<int>{0, 1});
  }
  SUBCASE("shallow cut only") {
    BlockContraction c = contract_block(g, t, {1});
    CHECK(c.parts == 2);
    CHECK(c.part_of == std::vector<int>{0, 1, 1});
    CHECK(c.part_parent_cutv == std::vector<int>{-1, 1});
  }
  SUBCASE("both cuts") {
    BlockContraction c = contract_block(g, t, {1, 2});
    CHECK(c.parts == 3);
    CHECK(c.part_of == std::vector<int>{0, 1, 2});
    CHECK(c.part_parent == std::vector<int>{-1, 0, 1});
  }
  SUBCASE("nothing sampled") {
    BlockContraction c = contract_block(g, t, {});
    CHECK(c.parts == 1);
    CHECK(c.part_of == std::vector<int>{0, 0, 0});
    CHECK(c.part_order == std::vector<int>{0});
  }
}

TEST_CASE("contract_block parts are tree-connected") {
  Rng rng(606);
  Graph g = tftest::random_connected(40, 30, 10.0, rng);
  std::vector<double> w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.arc(e).r;
  RootedTree t = low_stretch_tree(g, w);

  std::vector<int> sampled;
  for (int i = 0; i < 8; ++i) {
    int v = 1 + static_cast<int>(rng.below(g.n() - 1));
    bool dup = false;
    for (int s : sampled) dup = dup || s == v;
    if (!dup) sampled.push_back(v);
  }
  BlockContraction c = contract_block(g, t, sampled);

  // every vertex shares a part with its parent unless its cut was sampled
  for (int v = 0; v < g.n(); ++v) {
    if (v == t.root) continue;
    bool was_sampled = false;
    for (int s : sampled) was_sampled = was_sampled || s == v;
    if (was_sampled)
      CHECK(c.part_of[v] != c.part_of[t.parent[v]]);
    else
      CHECK(c.part_of[v] == c.part_of[t.parent[v]]);
  }
  CHECK(static_cast<int>(sampled.size()) + 1 == c.parts);
  CHECK(static_cast<int>(c.part_order.size()) == c.parts);
}

TEST_CASE("block length zero falls through to the plain solver") {
  Rng rng_graph(111);
  Graph g = tftest::random_connected(20, 24, 12.0, rng_graph);
  const Supply b = tftest::random_supply(g.n(), rng_graph);
  Rng r1(50), r2(50);
  DualSolveResult plain = dual_kosz(g, b, 0.1, r1);
  DualSolveResult batched = batched_dual_kosz(g, b, 0.1, 0, r2);
  for (int v = 0; v < g.n(); ++v) CHECK(plain.x[v] == batched.x[v]);
}

TEST_CASE("batched replay matches the unbatched toggle sequence") {
  Rng rng_graph(2024);
  Graph g = tftest::random_connected(35, 45, 20.0, rng_graph);
  const Supply b = tftest::random_supply(g.n(), rng_graph);

  SolveOptions opts;
  opts.record_trace = true;
  Rng r_plain(77);
  DualSolveResult plain = dual_kosz(g, b, 0.1, r_plain, opts);

  const long long sqrt_m = static_cast<long long>(std::ceil(std::sqrt(g.m())));
  for (long long l : {1LL, 2LL, sqrt_m, plain.trace.K}) {
    CAPTURE(l);
    Rng r_b(77);
    DualSolveResult batched = batched_dual_kosz(g, b, 0.1, l, r_b, opts);

    REQUIRE(batched.trace.records.size() == plain.trace.records.size());
    for (std::size_t i = 0; i < plain.trace.records.size(); ++i) {
      CHECK(batched.trace.records[i].t == plain.trace.records[i].t);
      CHECK(batched.trace.records[i].elem == plain.trace.records[i].elem);
      CHECK(batched.trace.records[i].delta ==
            doctest::Approx(plain.trace.records[i].delta).epsilon(1e-9));
    }
    for (int v = 0; v < g.n(); ++v)
      CHECK(batched.x[v] == doctest::Approx(plain.x[v]).epsilon(1e-9));
    for (int e = 0; e < g.m(); ++e)
      CHECK(batched.f[e] == doctest::Approx(plain.f[e]).epsilon(1e-8));
  }
}

TEST_CASE("batched run is deterministic and feasible") {
  Rng rng_graph(9);
  Graph g = tftest::random_connected(50, 70, 8.0, rng_graph);
  const Supply b = tftest::random_supply(g.n(), rng_graph);
  Rng r1(3), r2(3);
  DualSolveResult a = batched_dual_kosz(g, b, 0.2, 16, r1);
  DualSolveResult c = batched_dual_kosz(g, b, 0.2, 16, r2);
  for (int v = 0; v < g.n(); ++v) CHECK(a.x[v] == c.x[v]);
  CHECK(feasibility_residual(g, a.f, b) < 1e-10);
  CHECK(a.trace.algo == "batched");
}

TEST_CASE("batched solver rejects negative block lengths") {
  Graph g = tftest::triangle();
  Rng rng(1);
  CHECK_THROWS_AS((void)batched_dual_kosz(g, tftest::triangle_supply(), 0.1, -1, rng),
                  std::invalid_argument);
}
