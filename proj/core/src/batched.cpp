#include "toggleflow/batched.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toggleflow {

namespace {

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) {
    for (int i = 0; i < n; ++i) up[i] = i;
  }
  int find(int v) {
    while (up[v] != v) v = up[v] = up[up[v]];
    return v;
  }
  void unite(int a, int b) { up[find(b)] = find(a); }
};

}  // namespace

BlockContraction contract_block(const Graph& g, const RootedTree& t,
                                const std::vector<int>& sampled_cut_vertices) {
  const int n = g.n();
  std::vector<char> sampled(n, 0);
  for (int v : sampled_cut_vertices) sampled[v] = 1;

  UnionFind uf(n);
  for (int v = 0; v < n; ++v) {
    if (v == t.root || sampled[v]) continue;
    uf.unite(t.parent[v], v);
  }

  BlockContraction c;
  c.part_of.assign(n, -1);
  std::vector<int> id_of_rep(n, -1);
  for (int v = 0; v < n; ++v) {
    const int rep = uf.find(v);
    if (id_of_rep[rep] < 0) id_of_rep[rep] = c.parts++;
    c.part_of[v] = id_of_rep[rep];
  }

  c.part_parent.assign(c.parts, -1);
  c.part_parent_cutv.assign(c.parts, -1);
  for (int v : sampled_cut_vertices) {
    const int p = c.part_of[v];
    c.part_parent[p] = c.part_of[t.parent[v]];
    c.part_parent_cutv[p] = v;
  }

  std::vector<std::vector<int>> kids(c.parts);
  int root_part = -1;
  for (int p = 0; p < c.parts; ++p) {
    if (c.part_parent[p] < 0)
      root_part = p;
    else
      kids[c.part_parent[p]].push_back(p);
  }
  for (auto& k : kids) std::sort(k.begin(), k.end());

  c.part_order.reserve(c.parts);
  std::vector<int> stack = {root_part};
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    c.part_order.push_back(p);
    for (auto it = kids[p].rbegin(); it != kids[p].rend(); ++it) stack.push_back(*it);
  }
  return c;
}

DualSolveResult batched_dual_kosz(const Graph& g, const Supply& b, double eps, long long l,
                                  Rng& rng, const SolveOptions& opts) {
  if (l < 0) throw std::invalid_argument("block length must be nonnegative");
  if (l == 0) return dual_kosz(g, b, eps, rng, opts);
  validate_supply(b);
  if (static_cast<int>(b.size()) != g.n()) throw std::invalid_argument("supply size mismatch");

  const int n = g.n();
  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const RootedTree t = low_stretch_tree(g, r);
  const CutTable cuts = build_cut_table(g, t, b);

  long long budget = 0;
  if (cuts.tau > 0.0) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const double k = cuts.tau * std::log(cuts.tau / eps);
    budget = k <= 0.0 ? 0 : static_cast<long long>(std::ceil(k));
  }
  const long long iters =
      opts.max_iters > 0 && opts.max_iters < budget ? opts.max_iters : budget;

  DualSolveResult out;
  out.trace.recording = opts.record_trace;
  out.trace.algo = "batched";
  out.trace.eps = eps;
  out.trace.tau = cuts.tau;
  out.trace.K = budget;
  out.trace.iterations_run = iters;
  out.x.assign(n, 0.0);

  double objective = 0.0;
  long long done = 0;
  std::vector<int> pick_vert;
  std::vector<int> distinct, slot_of_pick;
  std::vector<int> distinct_slot(n, -1);
  std::vector<double> grid;

  while (done < iters) {
    const long long len = std::min<long long>(l, iters - done);

    pick_vert.clear();
    distinct.clear();
    slot_of_pick.clear();
    for (long long k = 0; k < len; ++k) {
      const int idx = rng.pick(cuts.cum);
      const int v = cuts.verts[idx];
      pick_vert.push_back(v);
      if (distinct_slot[v] < 0) {
        distinct_slot[v] = static_cast<int>(distinct.size());
        distinct.push_back(v);
      }
      slot_of_pick.push_back(distinct_slot[v]);
    }
    const int nd = static_cast<int>(distinct.size());

    const BlockContraction bc = contract_block(g, t, distinct);
    const int np = bc.parts;

    // preorder intervals over the part tree for subtree-membership tests
    std::vector<int> ptin(np), ptout(np);
    for (int i = 0; i < np; ++i) ptin[bc.part_order[i]] = i;
    for (int p = 0; p < np; ++p) ptout[p] = ptin[p];
    for (int i = np - 1; i >= 0; --i) {
      const int p = bc.part_order[i];
      if (bc.part_parent[p] >= 0)
        ptout[bc.part_parent[p]] = std::max(ptout[bc.part_parent[p]], ptout[p]);
    }
    // interaction rows between the block's cuts, computed on the contraction;
    // every sampled subtree is a union of parts, so these match the full-graph
    // table entries. H[a][c] expands into four subtree-membership products per
    // arc, i.e. a rectangle sum over (preorder, preorder) points, so one 2D
    // prefix pass over the part grid serves every row at once.
    grid.assign(static_cast<std::size_t>(np) * np, 0.0);
    for (int e = 0; e < g.m(); ++e) {
      const Arc& a = g.arc(e);
      const int p = bc.part_of[a.tail];
      const int q = bc.part_of[a.head];
      if (p == q) continue;
      const double c = 1.0 / a.r;
      const std::size_t ti = ptin[p], hi = ptin[q];
      grid[ti * np + ti] += c;
      grid[hi * np + hi] += c;
      grid[ti * np + hi] -= c;
      grid[hi * np + ti] -= c;
    }
    for (int i = 0; i < np; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * np;
      for (int j = 1; j < np; ++j) grid[base + j] += grid[base + j - 1];
    }
    for (int i = 1; i < np; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * np;
      for (int j = 0; j < np; ++j) grid[base + j] += grid[base - np + j];
    }
    auto rect = [&](int r1, int r2, int c1, int c2) {
      double s = grid[static_cast<std::size_t>(r2) * np + c2];
      if (r1 > 0) s -= grid[static_cast<std::size_t>(r1 - 1) * np + c2];
      if (c1 > 0) s -= grid[static_cast<std::size_t>(r2) * np + c1 - 1];
      if (r1 > 0 && c1 > 0) s += grid[static_cast<std::size_t>(r1 - 1) * np + c1 - 1];
      return s;
    };
    std::vector<double> h(static_cast<std::size_t>(nd) * nd, 0.0);
    for (int srow = 0; srow < nd; ++srow) {
      const int pa = bc.part_of[distinct[srow]];
      for (int scol = 0; scol < nd; ++scol) {
        const int pc = bc.part_of[distinct[scol]];
        h[static_cast<std::size_t>(srow) * nd + scol] =
            rect(ptin[pa], ptout[pa], ptin[pc], ptout[pc]);
      }
    }

    // flows across the block's cuts at the block-entry potentials
    const std::vector<double> all_cut_flows = cut_flows_from_potentials(g, t, out.x);
    std::vector<double> fcur(nd);
    for (int s = 0; s < nd; ++s) fcur[s] = all_cut_flows[distinct[s]];

    std::vector<double> pending(np, 0.0);
    for (long long k = 0; k < len; ++k) {
      const int v = pick_vert[k];
      const int slot = slot_of_pick[k];
      const double delta = (cuts.b_C[v] - fcur[slot]) * cuts.R_C[v];
      const std::size_t row = static_cast<std::size_t>(slot) * nd;
      for (int j = 0; j < nd; ++j) fcur[j] += delta * h[row + j];
      pending[bc.part_of[v]] += delta;
      objective += delta * delta / (2.0 * cuts.R_C[v]);
      out.trace.add(done + k + 1, t.parent_arc[v], delta, objective);
    }

    // push one aggregated shift per part: a toggle at v raises every part in
    // the part-subtree of part(v)
    std::vector<double> y(np, 0.0);
    for (int p : bc.part_order)
      y[p] = pending[p] + (bc.part_parent[p] >= 0 ? y[bc.part_parent[p]] : 0.0);
    for (int v = 0; v < n; ++v) out.x[v] += y[bc.part_of[v]];

    for (int v : distinct) distinct_slot[v] = -1;
    done += len;
  }

  out.f = tree_defined_flow(g, t, out.x, b);
  return out;
}

}  // namespace toggleflow
