// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "penkey/network.hpp"

namespace penkey::testing {

inline PenNetwork triangle() {
  return PenNetwork(3, {{1, 2, state::Bell{}}, {1, 3, state::Bell{}}, {2, 3, state::Bell{}}}, {1, 2, 3});
}

inline PenNetwork path(int n, EdgeState st = state::Bell{}) {
  std::vector<EdgeSpec> edges;
  for (int v = 1; v < n; ++v) edges.push_back({v, v + 1, st});
  std::vector<Vertex> all;
  for (int v = 1; v <= n; ++v) all.push_back(v);
  return PenNetwork(n, edges, all);
}

inline PenNetwork eight_node_network() {
  const int e[][2] = {{1, 2}, {1, 4}, {2, 3}, {2, 5}, {3, 5}, {3, 6},
                      {4, 6}, {4, 7}, {5, 8}, {6, 7}, {6, 8}, {7, 8}};
  std::vector<EdgeSpec> edges;
  for (auto& p : e) edges.push_back({p[0], p[1], state::Bell{}});
  return PenNetwork(8, edges, {2, 5, 6, 7});
}

inline PenNetwork helper_tree() {
  const int e[][2] = {{1, 4}, {2, 4}, {3, 5}, {4, 6}, {5, 6}, {6, 7}, {7, 8}, {7, 9}};
  std::vector<EdgeSpec> edges;
  for (auto& p : e) edges.push_back({p[0], p[1], state::Bell{}});
  return PenNetwork(9, edges, {4, 6, 8, 9});
}

inline PenNetwork complete_graph(int n) {
  std::vector<EdgeSpec> edges;
  std::vector<Vertex> all;
  for (int u = 1; u <= n; ++u) {
    all.push_back(u);
    for (int v = u + 1; v <= n; ++v) edges.push_back({u, v, state::Bell{}});
  }
  return PenNetwork(n, edges, all);
}

/// Random connected simple graph: random spanning tree plus extra edges.
inline std::vector<std::pair<int, int>> random_connected(int n, double extra_p, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> out;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    int a = order[static_cast<std::size_t>(i)], b = order[static_cast<std::size_t>(pick(rng))];
    out.push_back({std::min(a, b), std::max(a, b)});
  }
  std::bernoulli_distribution coin(extra_p);
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v)
      if (std::find(out.begin(), out.end(), std::pair{u, v}) == out.end() && coin(rng)) out.push_back({u, v});
  return out;
}

inline std::vector<double> random_probabilities(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(d);
  double s = 0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  return p;
}

/// Every set partition of {1..n} as block-id vectors, by plain recursion.
inline void all_set_partitions(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      f(a);
      return;
    }
    for (int b = 0; b <= used; ++b) {
      a[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) return;
  rec(1, 1);  // vertex 1 always opens block 0
}

/// Brute-force partition minimum with explicit weights (vertex-pair list).
inline double brute_partition_min(int n, const std::vector<Vertex>& seekers,
                                  const std::vector<std::pair<int, int>>& edges,
                                  const std::vector<double>& w, int max_blocks = 1 << 30) {
  double best = std::numeric_limits<double>::infinity();
  all_set_partitions(n, [&](const std::vector<int>& a) {
    const int blocks = *std::max_element(a.begin(), a.end()) + 1;
    if (blocks < 2 || blocks > max_blocks) return;
    std::vector<bool> has(static_cast<std::size_t>(blocks), false);
    for (Vertex s : seekers) has[static_cast<std::size_t>(a[static_cast<std::size_t>(s - 1)])] = true;
    if (std::find(has.begin(), has.end(), false) != has.end()) return;
    double cross = 0;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (a[static_cast<std::size_t>(edges[e].first - 1)] != a[static_cast<std::size_t>(edges[e].second - 1)])
        cross += w[e];
    best = std::min(best, cross / (blocks - 1));
  });
  return best;
}

inline std::vector<std::pair<int, int>> endpoints(const PenNetwork& net) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : net.edges()) out.push_back({e.u, e.v});
  return out;
}

}  // namespace penkey::testing
