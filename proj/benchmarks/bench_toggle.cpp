#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "toggleflow/batched.hpp"
#include "toggleflow/recurse.hpp"
#include "toggleflow/solvers.hpp"

using namespace toggleflow;

namespace {

Graph grid_graph(int side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Arc> arcs;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const int v = r * side + c;
      const double span = std::log(10.0);
      if (c + 1 < side) arcs.push_back({v, v + 1, std::exp(rng.uniform(0.0, span))});
      if (r + 1 < side) arcs.push_back({v, v + side, std::exp(rng.uniform(0.0, span))});
    }
  return Graph(side * side, std::move(arcs));
}

Supply grid_supply(int n, std::uint64_t seed) {
  Rng rng(seed);
  Supply b(n);
  double mean = 0.0;
  for (double& v : b) mean += (v = rng.uniform(-1.0, 1.0));
  mean /= n;
  double resid = 0.0;
  for (double& v : b) resid += (v -= mean);
  b[0] -= resid;
  return b;
}

std::vector<double> arc_resistances(const Graph& g) {
  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  return r;
}

template <class TF>
void toggle_steps(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Graph g = grid_graph(side, 1);
  const Supply b = grid_supply(g.n(), 2);
  const RootedTree t = low_stretch_tree(g, arc_resistances(g));
  const CutTable cuts = build_cut_table(g, t, b);
  TF ds(g, t, b);
  Rng rng(7);
  for (auto _ : state) {
    const int v = cuts.verts[rng.pick(cuts.cum)];
    benchmark::DoNotOptimize(cut_toggle_step(ds, cuts, v));
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

static void BM_CutToggleTable(benchmark::State& state) { toggle_steps<TreeFlowTable>(state); }
BENCHMARK(BM_CutToggleTable)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_CutToggleNaive(benchmark::State& state) { toggle_steps<TreeFlowNaive>(state); }
BENCHMARK(BM_CutToggleNaive)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_TableBuild(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Graph g = grid_graph(side, 1);
  const RootedTree t = low_stretch_tree(g, arc_resistances(g));
  for (auto _ : state) benchmark::DoNotOptimize(precompute_interaction_table(g, t));
}
BENCHMARK(BM_TableBuild)->Arg(8)->Arg(16)->Arg(32);

static void BM_LowStretchTree(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Graph g = grid_graph(side, 1);
  const std::vector<double> r = arc_resistances(g);
  for (auto _ : state) benchmark::DoNotOptimize(low_stretch_tree(g, r));
}
BENCHMARK(BM_LowStretchTree)->Arg(8)->Arg(16)->Arg(32);

// Fixed toggle budget, block size swept; l = 0 is the unbatched solver.
static void BM_BatchedBlocks(benchmark::State& state) {
  const long long l = state.range(0);
  Graph g = grid_graph(48, 1);
  const Supply b = grid_supply(g.n(), 2);
  SolveOptions opts;
  opts.max_iters = 4000;
  for (auto _ : state) {
    Rng rng(7);
    if (l == 0) {
      benchmark::DoNotOptimize(dual_kosz(g, b, 0.1, rng, opts));
    } else {
      benchmark::DoNotOptimize(batched_dual_kosz(g, b, 0.1, l, rng, opts));
    }
  }
  state.SetItemsProcessed(state.iterations() * opts.max_iters);
}
BENCHMARK(BM_BatchedBlocks)->Arg(0)->Arg(1)->Arg(16)->Arg(67)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_SpectralSparsify(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const WeightedLaplacian l = graph_laplacian(grid_graph(side, 1));
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(spectral_sparsify(l, 0.25, rng));
  }
}
BENCHMARK(BM_SpectralSparsify)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
