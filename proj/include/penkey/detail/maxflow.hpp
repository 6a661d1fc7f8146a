#pragma once

#include <queue>
#include <vector>

#include "penkey/detail/exact.hpp"

namespace penkey::detail {

template <class W>
struct MinCut {
  W value;
  /// in_source_side[v] for v in 0..n-1.
  std::vector<bool> in_source_side;
};

/// Edmonds-Karp on an undirected graph given as a symmetric capacity matrix
/// (0-based vertices). Returns the s-t minimum cut and the residual-reachable
/// source side.
template <class W>
MinCut<W> min_st_cut(const std::vector<std::vector<W>>& capacity, int s, int t) {
  using Traits = WeightTraits<W>;
  const auto n = capacity.size();
  std::vector<std::vector<W>> residual = capacity;
  W total = W(0);
  std::vector<int> parent(n);
  auto bfs = [&]() {
    std::fill(parent.begin(), parent.end(), -1);
    parent[static_cast<std::size_t>(s)] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      for (std::size_t y = 0; y < n; ++y) {
        if (parent[y] == -1 && Traits::positive(residual[static_cast<std::size_t>(x)][y])) {
          parent[y] = x;
          q.push(static_cast<int>(y));
        }
      }
    }
    return parent[static_cast<std::size_t>(t)] != -1;
  };
  while (bfs()) {
    W push = residual[static_cast<std::size_t>(parent[static_cast<std::size_t>(t)])]
                     [static_cast<std::size_t>(t)];
    for (int y = t; y != s; y = parent[static_cast<std::size_t>(y)]) {
      const W& r = residual[static_cast<std::size_t>(parent[static_cast<std::size_t>(y)])]
                           [static_cast<std::size_t>(y)];
      if (r < push) push = r;
    }
    for (int y = t; y != s; y = parent[static_cast<std::size_t>(y)]) {
      const auto x = static_cast<std::size_t>(parent[static_cast<std::size_t>(y)]);
      residual[x][static_cast<std::size_t>(y)] -= push;
      residual[static_cast<std::size_t>(y)][x] += push;
    }
    total += push;
  }
  // The final BFS left parent[] marking the residual-reachable set.
  MinCut<W> out{total, std::vector<bool>(n, false)};
  for (std::size_t v = 0; v < n; ++v) out.in_source_side[v] = parent[v] != -1;
  return out;
}

}  // namespace penkey::detail
