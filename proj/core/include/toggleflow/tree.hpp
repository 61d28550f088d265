#pragma once

#include <vector>

#include "toggleflow/graph.hpp"

namespace toggleflow {

// Spanning tree rooted at a fixed vertex (vertex 0 unless stated otherwise).
// Fundamental cuts are subtrees: the cut of tree arc (v, parent(v)) is the
// vertex set of the subtree rooted at v, identified everywhere by v itself.
struct RootedTree {
  int root = 0;
  std::vector<int> parent;      // parent[root] = -1
  std::vector<int> parent_arc;  // graph arc id to the parent; -1 at the root
  std::vector<int> depth;
  std::vector<int> order;       // preorder listing of vertices
  std::vector<int> tin, tout;   // euler intervals: subtree(v) = order[tin(v)..tout(v)]
  std::vector<std::vector<int>> children;
  std::vector<int> tree_arcs;   // the n-1 tree arc ids, in preorder of child vertex
  std::vector<char> is_tree_arc;

  // is u inside the subtree rooted at v?
  [[nodiscard]] bool in_subtree(int u, int v) const {
    return tin[v] <= tin[u] && tin[u] <= tout[v];
  }

  [[nodiscard]] int lca(int u, int v) const;

  // child endpoint of a tree arc (the vertex whose cut the arc defines)
  [[nodiscard]] int cut_vertex_of_arc(int arc_id) const;
};

RootedTree build_rooted_tree(const Graph& g, const std::vector<int>& tree_arc_ids, int root = 0);

// Minimum spanning tree under the given weights, refined by one hill-climb
// pass of stretch-reducing swaps (at most 2m attempts). No stretch guarantee;
// callers measure the realized stretch and budget from that.
RootedTree low_stretch_tree(const Graph& g, const std::vector<double>& weights);

// sum over all arcs of (tree-path weight) / (arc weight); tree arcs give 1.
double total_stretch(const Graph& g, const RootedTree& t, const std::vector<double>& weights);

// sum of per_arc over the tree path between u and v
double tree_path_sum(const RootedTree& t, const std::vector<double>& per_arc, int u, int v);

// Lazy handle on the fundamental cut of one tree arc.
struct FundamentalCut {
  const Graph* g = nullptr;
  const RootedTree* t = nullptr;
  int cut_vertex = -1;

  [[nodiscard]] bool contains(int v) const { return t->in_subtree(v, cut_vertex); }
  [[nodiscard]] std::vector<int> boundary_arcs() const;
};

FundamentalCut fundamental_cut(const Graph& g, const RootedTree& t, int tree_arc_id);

// The cycle closed by one non-tree arc: that arc first (sign +1), then the
// tree path from its head back to its tail, each arc with its traversal sign.
struct CycleArc {
  int arc;
  int sign;  // +1 when traversed tail -> head
};
std::vector<CycleArc> fundamental_cycle(const Graph& g, const RootedTree& t, int nontree_arc_id);

// Per tree-edge cut quantities and the sampling distribution over cuts.
// Vectors R_C / b_C / P are indexed by cut vertex (root slot unused); verts
// lists the non-root vertices in preorder and cum is the cumulative raw
// sampling weight in that order.
struct CutTable {
  int root = 0;
  double tau = 0.0;             // sum of r(e) / R(C(e)); equals the tree stretch
  std::vector<int> verts;       // sampling order
  std::vector<int> vert_arc;    // tree arc id per entry of verts
  std::vector<double> R_C;      // cut resistance, by cut vertex
  std::vector<double> b_C;      // cut supply, by cut vertex
  std::vector<double> P;        // normalized probability, by cut vertex
  std::vector<double> cum;      // cumulative raw weight, parallel to verts
};

CutTable build_cut_table(const Graph& g, const RootedTree& t, const Supply& b);

// out[v] = sum of value[arc] over the arcs crossing the cut of v's subtree,
// for every non-root v. One pass of tree-path walks, always in arc order, so
// different callers accumulate bit-identical sums.
std::vector<double> accumulate_cut_boundaries(const Graph& g, const RootedTree& t,
                                              const std::vector<double>& value);

// subtree sums of a per-vertex vector
std::vector<double> subtree_sums(const RootedTree& t, const std::vector<double>& per_vertex);

}  // namespace toggleflow
