// Spanning trees of small multigraphs: counting, enumeration, and maximum
// edge-disjoint packing.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "penkey/errors.hpp"

namespace penkey {

/// Undirected edge on 0-based vertices.
struct GraphEdge {
  int a;
  int b;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent_[static_cast<std::size_t>(x)] = y;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Matrix-tree theorem count (parallel edges counted separately).
inline double count_spanning_trees(int n, const std::vector<GraphEdge>& edges) {
  if (n <= 1) return 1.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const GraphEdge& e : edges) {
    lap(e.a, e.a) += 1.0;
    lap(e.b, e.b) += 1.0;
    lap(e.a, e.b) -= 1.0;
    lap(e.b, e.a) -= 1.0;
  }
  const double det = lap.bottomRightCorner(n - 1, n - 1).fullPivLu().determinant();
  return std::max(0.0, std::round(det));
}

/// All spanning trees as ascending edge-index lists, in lexicographic order.
inline std::vector<std::vector<std::size_t>> enumerate_spanning_trees(
    int n, const std::vector<GraphEdge>& edges, double limit = 200000) {
  const double count = count_spanning_trees(n, edges);
  if (count > limit) {
    std::ostringstream msg;
    msg << "graph has " << count << " spanning trees, above the enumeration limit of "
        << limit;
    throw LimitError(msg.str());
  }
  std::vector<std::vector<std::size_t>> out;
  if (n <= 1) {
    out.emplace_back();
    return out;
  }
  std::vector<std::size_t> chosen;
  const auto m = edges.size();

  // Can the chosen edges plus edges[from..] still connect everything?
  auto completable = [&](std::size_t from) {
    detail::UnionFind uf(n);
    int components = n;
    for (std::size_t e : chosen)
      if (uf.unite(edges[e].a, edges[e].b)) --components;
    for (std::size_t e = from; e < m; ++e)
      if (uf.unite(edges[e].a, edges[e].b)) --components;
    return components == 1;
  };

  auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (chosen.size() == static_cast<std::size_t>(n - 1)) {
      out.push_back(chosen);
      return;
    }
    if (next >= m || !completable(next)) return;
    // Include edges[next] if it does not close a cycle.
    detail::UnionFind uf(n);
    for (std::size_t e : chosen) uf.unite(edges[e].a, edges[e].b);
    if (uf.find(edges[next].a) != uf.find(edges[next].b)) {
      chosen.push_back(next);
      self(self, next + 1);
      chosen.pop_back();
    }
    self(self, next + 1);
  };
  recurse(recurse, 0);
  return out;
}

namespace detail {

/// Path of edge ids between x and y inside a forest, empty if disconnected.
inline std::vector<std::size_t> forest_path(int n, const std::vector<GraphEdge>& edges,
                                            const std::vector<std::size_t>& forest,
                                            int x, int y) {
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(static_cast<std::size_t>(n));
  for (std::size_t e : forest) {
    adj[static_cast<std::size_t>(edges[e].a)].push_back({edges[e].b, e});
    adj[static_cast<std::size_t>(edges[e].b)].push_back({edges[e].a, e});
  }
  std::vector<std::ptrdiff_t> via(static_cast<std::size_t>(n), -1);
  std::vector<int> prev(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<int> q;
  q.push(x);
  seen[static_cast<std::size_t>(x)] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == y) break;
    for (auto [w, e] : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      prev[static_cast<std::size_t>(w)] = u;
      via[static_cast<std::size_t>(w)] = static_cast<std::ptrdiff_t>(e);
      q.push(w);
    }
  }
  std::vector<std::size_t> path;
  if (!seen[static_cast<std::size_t>(y)]) return path;
  for (int w = y; w != x; w = prev[static_cast<std::size_t>(w)])
    path.push_back(static_cast<std::size_t>(via[static_cast<std::size_t>(w)]));
  return path;
}

inline bool is_forest(int n, const std::vector<GraphEdge>& edges,
                      const std::vector<std::size_t>& forest) {
  UnionFind uf(n);
  for (std::size_t e : forest)
    if (!uf.unite(edges[e].a, edges[e].b)) return false;
  return true;
}

/// Matroid-partition augmentation: a maximum-size union of k forests.
inline std::vector<std::vector<std::size_t>> max_forest_union(
    int n, const std::vector<GraphEdge>& edges, int k) {
  const auto m = edges.size();
  std::vector<std::vector<std::size_t>> forests(static_cast<std::size_t>(k));
  std::vector<int> where(m, -1);

  for (std::size_t root = 0; root < m; ++root) {
    std::vector<std::ptrdiff_t> pred(m, -1);
    std::vector<bool> labelled(m, false);
    std::queue<std::size_t> q;
    q.push(root);
    labelled[root] = true;
    bool done = false;
    while (!q.empty() && !done) {
      const std::size_t x = q.front();
      q.pop();
      for (int f = 0; f < k && !done; ++f) {
        if (where[x] == f) continue;
        const auto path =
            forest_path(n, edges, forests[static_cast<std::size_t>(f)], edges[x].a, edges[x].b);
        if (path.empty()) {
          // x enters forest f; walk the displacement chain back to root.
          std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(x);
          int dest = f;
          while (cur != -1) {
            const auto c = static_cast<std::size_t>(cur);
            const int old = where[c];
            if (old != -1) {
              auto& fo = forests[static_cast<std::size_t>(old)];
              fo.erase(std::find(fo.begin(), fo.end(), c));
            }
            forests[static_cast<std::size_t>(dest)].push_back(c);
            where[c] = dest;
            dest = old;
            cur = pred[c];
          }
          done = true;
        } else {
          for (std::size_t y : path) {
            if (labelled[y]) continue;
            labelled[y] = true;
            pred[y] = static_cast<std::ptrdiff_t>(x);
            q.push(y);
          }
        }
      }
    }
  }
  for (const auto& f : forests) {
    if (!is_forest(n, edges, f)) throw std::logic_error("forest union produced a cycle");
  }
  return forests;
}

}  // namespace detail

/// Maximum set of pairwise edge-disjoint spanning trees of a connected
/// multigraph. Each tree is an ascending list of edge ids; trees are sorted.
inline std::vector<std::vector<std::size_t>> max_disjoint_spanning_trees(
    int n, const std::vector<GraphEdge>& edges) {
  if (n <= 1) return {};
  const int tree_size = n - 1;
  int lo = 0;
  int hi = static_cast<int>(edges.size()) / tree_size;
  std::vector<std::vector<std::size_t>> best;
  // Feasibility of k trees is monotone in k.
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    auto forests = detail::max_forest_union(n, edges, mid);
    const bool ok = std::all_of(forests.begin(), forests.end(), [&](const auto& f) {
      return static_cast<int>(f.size()) == tree_size;
    });
    if (ok) {
      lo = mid;
      best = std::move(forests);
    } else {
      hi = mid - 1;
    }
  }
  for (auto& t : best) std::sort(t.begin(), t.end());
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace penkey
