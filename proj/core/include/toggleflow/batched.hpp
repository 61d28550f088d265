#pragma once

#include "toggleflow/solvers.hpp"

namespace toggleflow {

// Partition of the vertices induced by contracting every tree arc whose
// fundamental cut was not sampled in the current block.
struct BlockContraction {
  int parts = 0;
  std::vector<int> part_of;          // vertex -> part id (first-occurrence order)
  std::vector<int> part_parent;      // part tree: parent part id, -1 at the root part
  std::vector<int> part_parent_cutv; // cut vertex whose tree arc crosses to the parent
  std::vector<int> part_order;       // preorder over parts
};

[[nodiscard]] BlockContraction contract_block(const Graph& g, const RootedTree& t,
                                              const std::vector<int>& sampled_cut_vertices);

// Runs the cut-toggling solver in blocks of l iterations: each block samples
// its toggles up front, contracts the untouched tree arcs, replays the block
// against a table over the contracted structure, and pushes one aggregated
// potential shift per part. The toggle sequence, and hence the output, matches
// the unbatched solver on the same generator stream.
[[nodiscard]] DualSolveResult batched_dual_kosz(const Graph& g, const Supply& b, double eps,
                                                long long l, Rng& rng,
                                                const SolveOptions& opts = {});

}  // namespace toggleflow
