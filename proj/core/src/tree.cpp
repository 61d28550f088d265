#include "toggleflow/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace toggleflow {

namespace {

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int v) {
    while (up[v] != v) v = up[v] = up[up[v]];
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[b] = a;
    return true;
  }
};

}  // namespace

int RootedTree::lca(int u, int v) const {
  while (depth[u] > depth[v]) u = parent[u];
  while (depth[v] > depth[u]) v = parent[v];
  while (u != v) {
    u = parent[u];
    v = parent[v];
  }
  return u;
}

int RootedTree::cut_vertex_of_arc(int arc_id) const {
  for (std::size_t v = 0; v < parent_arc.size(); ++v)
    if (parent_arc[v] == arc_id) return static_cast<int>(v);
  throw std::invalid_argument("arc " + std::to_string(arc_id) + " is not a tree arc");
}

RootedTree build_rooted_tree(const Graph& g, const std::vector<int>& tree_arc_ids, int root) {
  const int n = g.n();
  if (static_cast<int>(tree_arc_ids.size()) != n - 1)
    throw std::invalid_argument("a spanning tree needs exactly n-1 arcs");

  std::vector<int> sorted_ids = tree_arc_ids;
  std::sort(sorted_ids.begin(), sorted_ids.end());

  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, arc id)
  for (int e : sorted_ids) {
    const Arc& a = g.arc(e);
    adj[a.tail].push_back({a.head, e});
    adj[a.head].push_back({a.tail, e});
  }

  RootedTree t;
  t.root = root;
  t.parent.assign(n, -1);
  t.parent_arc.assign(n, -1);
  t.depth.assign(n, 0);
  t.tin.assign(n, -1);
  t.tout.assign(n, -1);
  t.children.assign(n, {});
  t.is_tree_arc.assign(g.m(), 0);
  for (int e : sorted_ids) t.is_tree_arc[e] = 1;

  // Iterative preorder DFS; children visited in ascending arc-id order.
  std::vector<int> stack = {root};
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  t.order.reserve(n);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    t.tin[v] = static_cast<int>(t.order.size());
    t.order.push_back(v);
    for (auto it = adj[v].rbegin(); it != adj[v].rend(); ++it) {
      int u = it->first;
      if (seen[u]) continue;
      seen[u] = 1;
      t.parent[u] = v;
      t.parent_arc[u] = it->second;
      t.depth[u] = t.depth[v] + 1;
      stack.push_back(u);
    }
  }
  if (static_cast<int>(t.order.size()) != n)
    throw std::invalid_argument("tree arcs do not span the graph");

  // Push order is reversed relative to adjacency, so re-walk to keep the
  // preorder child lists in ascending arc-id order, then fix tin/tout.
  for (int v : t.order)
    if (v != root) t.children[t.parent[v]].push_back(v);
  for (int v = 0; v < n; ++v)
    std::sort(t.children[v].begin(), t.children[v].end(),
              [&](int a, int b) { return t.parent_arc[a] < t.parent_arc[b]; });

  t.order.clear();
  stack = {root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    t.tin[v] = static_cast<int>(t.order.size());
    t.order.push_back(v);
    for (auto it = t.children[v].rbegin(); it != t.children[v].rend(); ++it) stack.push_back(*it);
  }
  // tout by reverse preorder
  for (int i = n - 1; i >= 0; --i) {
    int v = t.order[i];
    t.tout[v] = t.tin[v];
    for (int c : t.children[v]) t.tout[v] = std::max(t.tout[v], t.tout[c]);
  }

  t.tree_arcs.reserve(n - 1);
  for (int i = 1; i < n; ++i) t.tree_arcs.push_back(t.parent_arc[t.order[i]]);
  return t;
}

double tree_path_sum(const RootedTree& t, const std::vector<double>& per_arc, int u, int v) {
  double sum = 0.0;
  while (t.depth[u] > t.depth[v]) {
    sum += per_arc[t.parent_arc[u]];
    u = t.parent[u];
  }
  while (t.depth[v] > t.depth[u]) {
    sum += per_arc[t.parent_arc[v]];
    v = t.parent[v];
  }
  while (u != v) {
    sum += per_arc[t.parent_arc[u]];
    sum += per_arc[t.parent_arc[v]];
    u = t.parent[u];
    v = t.parent[v];
  }
  return sum;
}

double total_stretch(const Graph& g, const RootedTree& t, const std::vector<double>& weights) {
  double total = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    total += tree_path_sum(t, weights, a.tail, a.head) / weights[e];
  }
  return total;
}

namespace {

std::vector<int> mst_arc_ids(const Graph& g, const std::vector<double>& weights) {
  std::vector<int> ids(g.m());
  std::iota(ids.begin(), ids.end(), 0);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (weights[a] != weights[b]) return weights[a] < weights[b];
    return a < b;
  });
  UnionFind uf(g.n());
  std::vector<int> tree;
  tree.reserve(g.n() - 1);
  for (int e : ids) {
    if (uf.unite(g.arc(e).tail, g.arc(e).head)) tree.push_back(e);
    if (static_cast<int>(tree.size()) == g.n() - 1) break;
  }
  return tree;
}

}  // namespace

RootedTree low_stretch_tree(const Graph& g, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != g.m())
    throw std::invalid_argument("one weight per arc required");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("tree weights must be positive and finite");

  std::vector<int> ids = mst_arc_ids(g, weights);
  RootedTree t = build_rooted_tree(g, ids, 0);
  if (g.m() == g.n() - 1) return t;

  std::vector<double> st(g.m(), 0.0);
  double total = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    st[e] = tree_path_sum(t, weights, a.tail, a.head) / weights[e];
    total += st[e];
  }

  const long long cap = 2LL * g.m();
  long long attempts = 0;
  for (int e = 0; e < g.m() && attempts < cap; ++e) {
    if (t.is_tree_arc[e]) continue;
    const Arc& a = g.arc(e);

    // candidate to evict: the heaviest arc on e's tree path
    int evict = -1;
    {
      int u = a.tail, v = a.head;
      auto consider = [&](int arc) {
        if (evict == -1 || weights[arc] > weights[evict]) evict = arc;
      };
      while (t.depth[u] > t.depth[v]) {
        consider(t.parent_arc[u]);
        u = t.parent[u];
      }
      while (t.depth[v] > t.depth[u]) {
        consider(t.parent_arc[v]);
        v = t.parent[v];
      }
      while (u != v) {
        consider(t.parent_arc[u]);
        consider(t.parent_arc[v]);
        u = t.parent[u];
        v = t.parent[v];
      }
    }
    if (evict < 0) continue;
    ++attempts;

    // Only arcs crossing the evicted cut change their tree path.
    const int child = t.cut_vertex_of_arc(evict);
    std::vector<int> affected;
    for (int a2 = 0; a2 < g.m(); ++a2) {
      const Arc& arc2 = g.arc(a2);
      if (t.in_subtree(arc2.tail, child) != t.in_subtree(arc2.head, child))
        affected.push_back(a2);
    }

    std::vector<int> cand_ids;
    cand_ids.reserve(ids.size());
    for (int id : ids) cand_ids.push_back(id == evict ? e : id);
    RootedTree cand = build_rooted_tree(g, cand_ids, 0);

    double delta = 0.0;
    for (int a2 : affected) {
      const Arc& arc2 = g.arc(a2);
      delta += tree_path_sum(cand, weights, arc2.tail, arc2.head) / weights[a2] - st[a2];
    }

    if (delta < -1e-12 * std::max(1.0, total)) {
      ids = std::move(cand_ids);
      t = std::move(cand);
      total += delta;
      for (int a2 : affected) {
        const Arc& arc2 = g.arc(a2);
        st[a2] = tree_path_sum(t, weights, arc2.tail, arc2.head) / weights[a2];
      }
    }
  }
  return t;
}

std::vector<int> FundamentalCut::boundary_arcs() const {
  std::vector<int> out;
  for (int e = 0; e < g->m(); ++e) {
    const Arc& a = g->arc(e);
    if (t->in_subtree(a.tail, cut_vertex) != t->in_subtree(a.head, cut_vertex)) out.push_back(e);
  }
  return out;
}

FundamentalCut fundamental_cut(const Graph& g, const RootedTree& t, int tree_arc_id) {
  if (tree_arc_id < 0 || tree_arc_id >= g.m() || !t.is_tree_arc[tree_arc_id])
    throw std::invalid_argument("fundamental_cut needs a tree arc");
  return FundamentalCut{&g, &t, t.cut_vertex_of_arc(tree_arc_id)};
}

std::vector<CycleArc> fundamental_cycle(const Graph& g, const RootedTree& t, int nontree_arc_id) {
  if (nontree_arc_id < 0 || nontree_arc_id >= g.m())
    throw std::invalid_argument("arc id out of range");
  if (t.is_tree_arc[nontree_arc_id])
    throw std::invalid_argument("fundamental_cycle needs a non-tree arc");

  const Arc& a = g.arc(nontree_arc_id);
  std::vector<CycleArc> cycle = {{nontree_arc_id, +1}};

  // climb from head and tail to the lca; head side is traversed upward in
  // cycle direction, tail side downward (signs flipped, order reversed)
  std::vector<CycleArc> up_from_head, up_from_tail;
  int u = a.head, v = a.tail;
  while (t.depth[u] > t.depth[v]) {
    int arc = t.parent_arc[u];
    up_from_head.push_back({arc, g.arc(arc).tail == u ? +1 : -1});
    u = t.parent[u];
  }
  while (t.depth[v] > t.depth[u]) {
    int arc = t.parent_arc[v];
    up_from_tail.push_back({arc, g.arc(arc).tail == v ? +1 : -1});
    v = t.parent[v];
  }
  while (u != v) {
    int arc = t.parent_arc[u];
    up_from_head.push_back({arc, g.arc(arc).tail == u ? +1 : -1});
    u = t.parent[u];
    arc = t.parent_arc[v];
    up_from_tail.push_back({arc, g.arc(arc).tail == v ? +1 : -1});
    v = t.parent[v];
  }

  for (const CycleArc& c : up_from_head) cycle.push_back(c);
  for (auto it = up_from_tail.rbegin(); it != up_from_tail.rend(); ++it)
    cycle.push_back({it->arc, -it->sign});
  return cycle;
}

std::vector<double> accumulate_cut_boundaries(const Graph& g, const RootedTree& t,
                                              const std::vector<double>& value) {
  std::vector<double> out(g.n(), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    const Arc& a = g.arc(e);
    int u = a.tail, v = a.head;
    while (t.depth[u] > t.depth[v]) {
      out[u] += value[e];
      u = t.parent[u];
    }
    while (t.depth[v] > t.depth[u]) {
      out[v] += value[e];
      v = t.parent[v];
    }
    while (u != v) {
      out[u] += value[e];
      out[v] += value[e];
      u = t.parent[u];
      v = t.parent[v];
    }
  }
  return out;
}

std::vector<double> subtree_sums(const RootedTree& t, const std::vector<double>& per_vertex) {
  std::vector<double> acc = per_vertex;
  for (int i = static_cast<int>(t.order.size()) - 1; i >= 1; --i) {
    int v = t.order[i];
    acc[t.parent[v]] += acc[v];
  }
  return acc;
}

CutTable build_cut_table(const Graph& g, const RootedTree& t, const Supply& b) {
  CutTable table;
  table.root = t.root;

  std::vector<double> conductance(g.m());
  for (int e = 0; e < g.m(); ++e) conductance[e] = 1.0 / g.arc(e).r;
  std::vector<double> cond_sum = accumulate_cut_boundaries(g, t, conductance);
  std::vector<double> s = subtree_sums(t, b);

  const int n = g.n();
  table.R_C.assign(n, 0.0);
  table.b_C.assign(n, 0.0);
  table.P.assign(n, 0.0);
  table.verts.reserve(n - 1);
  table.vert_arc.reserve(n - 1);
  table.cum.reserve(n - 1);

  double running = 0.0;
  double tau = 0.0;
  for (std::size_t i = 1; i < t.order.size(); ++i) {
    const int v = t.order[i];
    const int arc = t.parent_arc[v];
    table.verts.push_back(v);
    table.vert_arc.push_back(arc);
    table.R_C[v] = 1.0 / cond_sum[v];
    table.b_C[v] = s[v];
    // raw weight r(e)/R(C) written as sum/(1/r) so that the q = 2 cut-toggling
    // weight table is a bit-exact power-of-two multiple of this one
    running += cond_sum[v] / (1.0 / g.arc(arc).r);
    table.cum.push_back(running);
    tau += g.arc(arc).r * cond_sum[v];
  }
  table.tau = tau;
  const double total = table.cum.back();
  for (std::size_t i = 0; i < table.verts.size(); ++i) {
    const int v = table.verts[i];
    const double raw = table.cum[i] - (i == 0 ? 0.0 : table.cum[i - 1]);
    table.P[v] = raw / total;
  }
  return table;
}

}  // namespace toggleflow
