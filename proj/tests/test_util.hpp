#pragma once

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "toggleflow/graph.hpp"
#include "toggleflow/rng.hpp"

namespace tftest {

// triangle on {0,1,2} with arcs (0,1),(1,2),(0,2), unit resistances
inline toggleflow::Graph triangle() {
  return toggleflow::Graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
}

inline toggleflow::Supply triangle_supply() { return {1.0, 0.0, -1.0}; }

// random spanning tree plus extra chords, resistances log-uniform in [1, rmax]
inline toggleflow::Graph random_connected(int n, int extra, double rmax, toggleflow::Rng& rng) {
  std::set<std::pair<int, int>> used;
  std::vector<toggleflow::Arc> arcs;
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(rng.below(v));
    used.insert({u, v});
    arcs.push_back({u, v, 1.0});
  }
  const long long all = static_cast<long long>(n) * (n - 1) / 2;
  int added = 0;
  while (added < extra && static_cast<long long>(used.size()) < all) {
    int u = static_cast<int>(rng.below(n));
    int v = static_cast<int>(rng.below(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!used.insert({u, v}).second) continue;
    arcs.push_back({u, v, 1.0});
    ++added;
  }
  if (rmax > 1.0)
    for (toggleflow::Arc& a : arcs) a.r = std::exp(rng.uniform(0.0, std::log(rmax)));
  return toggleflow::Graph(n, std::move(arcs));
}

inline toggleflow::Supply random_supply(int n, toggleflow::Rng& rng) {
  toggleflow::Supply b(n);
  double sum = 0.0;
  for (int v = 0; v < n; ++v) {
    b[v] = rng.uniform(-1.0, 1.0);
    sum += b[v];
  }
  for (int v = 0; v < n; ++v) b[v] -= sum / n;
  double resid = 0.0;
  for (double v : b) resid += v;
  b[0] -= resid;
  return b;
}

}  // namespace tftest
