#include "toggleflow/treeflow.hpp"

#include <stdexcept>

namespace toggleflow {

TreeFlowNaive::TreeFlowNaive(const Graph& g, const RootedTree& t, const Supply& b)
    : g_(&g), t_(&t), b_c_(subtree_sums(t, b)), x_(g.n(), 0.0) {}

void TreeFlowNaive::addvalue(int v, double x) {
  for (int i = t_->tin[v]; i <= t_->tout[v]; ++i) x_[t_->order[i]] += x;
}

double TreeFlowNaive::cut_flow(int v) const {
  double f = 0.0;
  for (int e = 0; e < g_->m(); ++e) {
    const Arc& a = g_->arc(e);
    const bool tu = t_->in_subtree(a.tail, v);
    const bool hu = t_->in_subtree(a.head, v);
    if (tu == hu) continue;
    const double ohmic = (x_[a.tail] - x_[a.head]) / a.r;  // tail -> head
    f += tu ? ohmic : -ohmic;                              // count flow leaving the cut
  }
  return f;
}

double TreeFlowNaive::findflow(int v) const {
  if (v == t_->root) return 0.0;
  return b_c_[v] - cut_flow(v);
}

std::vector<double> precompute_interaction_table(const Graph& g, const RootedTree& t) {
  const int n = g.n();
  std::vector<double> h(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> deposit(n);
  for (int a = 0; a < n; ++a) {
    if (a == t.root) continue;
    std::fill(deposit.begin(), deposit.end(), 0.0);
    for (int e = 0; e < g.m(); ++e) {
      const Arc& arc = g.arc(e);
      const int chi = static_cast<int>(t.in_subtree(arc.tail, a)) -
                      static_cast<int>(t.in_subtree(arc.head, a));
      if (chi == 0) continue;
      const double c = chi / arc.r;
      deposit[arc.tail] += c;
      deposit[arc.head] -= c;
    }
    // h[a][c] counts deposits with an extra sign for which side of cut(c) the
    // endpoint lies on; summing over subtree(c) realizes that sign pattern.
    std::vector<double> acc = subtree_sums(t, deposit);
    for (int c = 0; c < n; ++c)
      if (c != t.root) h[static_cast<std::size_t>(a) * n + c] = acc[c];
  }
  return h;
}

TreeFlowTable::TreeFlowTable(const Graph& g, const RootedTree& t, const Supply& b)
    : g_(&g),
      t_(&t),
      h_(precompute_interaction_table(g, t)),
      b_c_(subtree_sums(t, b)),
      f_c_(g.n(), 0.0),
      lazy_(g.n(), 0.0),
      x_(g.n(), 0.0) {}

void TreeFlowTable::addvalue(int v, double x) {
  lazy_[v] += x;
  dirty_ = true;
  const int n = g_->n();
  const std::size_t row = static_cast<std::size_t>(v) * n;
  for (int c = 0; c < n; ++c) f_c_[c] += x * h_[row + c];
}

double TreeFlowTable::findflow(int v) const {
  if (v == t_->root) return 0.0;
  return b_c_[v] - f_c_[v];
}

void TreeFlowTable::materialize() {
  if (!dirty_) return;
  // lazy_[v] applies to all of subtree(v): push down along the preorder
  std::vector<double> pref(g_->n(), 0.0);
  for (int v : t_->order) {
    const double here = (v == t_->root ? 0.0 : pref[t_->parent[v]]) + lazy_[v];
    pref[v] = here;
    x_[v] = here;
  }
  dirty_ = false;
}

const Potentials& TreeFlowTable::values() {
  materialize();
  return x_;
}

void TreeFlowTable::recompute_all_cut_flows() {
  materialize();
  const int n = g_->n();
  std::vector<double> local(n, 0.0);
  for (int e = 0; e < g_->m(); ++e) {
    const Arc& a = g_->arc(e);
    const double ohmic = (x_[a.tail] - x_[a.head]) / a.r;
    local[a.tail] += ohmic;
    local[a.head] -= ohmic;
  }
  std::vector<double> acc = subtree_sums(*t_, local);
  for (int v = 0; v < n; ++v) f_c_[v] = acc[v];
  f_c_[t_->root] = 0.0;
}

double TreeFlowTable::table(int cv1, int cv2) const {
  return h_[static_cast<std::size_t>(cv1) * g_->n() + cv2];
}

}  // namespace toggleflow
