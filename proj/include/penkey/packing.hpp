// Spanning-tree packings of the key-rate multigraph: fractional (LP over
// enumerated trees) and integer (edge-disjoint trees of the round-expanded
// multigraph).

#pragma once

#include <algorithm>
#include <sstream>
#include <vector>

#include "penkey/detail/simplex.hpp"
#include "penkey/network.hpp"
#include "penkey/spanning_trees.hpp"

namespace penkey {

inline constexpr double kDefaultTreeEnumerationLimit = 200000;

/// One copy of a network edge: integer packings distinguish the
/// rounds * multiplicity copies of each edge; fractional packings use copy 0.
struct TreeEdge {
  EdgeIndex edge;
  int copy = 0;
  bool operator==(const TreeEdge&) const = default;
  auto operator<=>(const TreeEdge&) const = default;
};

struct TreePacking {
  /// Vertices every tree spans (all vertices, or the Steiner subtree's).
  std::vector<Vertex> span;
  std::vector<std::vector<TreeEdge>> trees;
  std::vector<double> weights;
  /// Capacity and consumed capacity per network edge.
  std::vector<double> capacity;
  std::vector<double> used;
  /// Sum of tree weights.
  double value = 0.0;
  /// Rounds of the expanded multigraph (integer packings only).
  int rounds = 0;
};

namespace detail {

inline std::vector<GraphEdge> underlying_edges(const PenNetwork& net) {
  std::vector<GraphEdge> out;
  out.reserve(net.n_edges());
  for (const EdgeSpec& e : net.edges()) out.push_back({e.u - 1, e.v - 1});
  return out;
}

inline void require_all_seekers(const PenNetwork& net, const char* what) {
  if (!net.all_seekers()) {
    throw LimitError(std::string(what) +
                     " requires every vertex to be secrecy-seeking "
                     "(helper networks are only supported on trees)");
  }
}

}  // namespace detail

/// Maximum fractional spanning-tree packing under capacities
/// weight * multiplicity. Its value equals the partition bound when every
/// vertex is a seeker.
inline TreePacking pack_trees_fractional(const PenNetwork& net, const EdgeWeighting& w,
                                         double tree_limit = kDefaultTreeEnumerationLimit) {
  detail::require_all_seekers(net, "fractional tree packing");
  const auto edges = detail::underlying_edges(net);
  const auto trees = enumerate_spanning_trees(net.n_vertices(), edges, tree_limit);

  detail::PackingLp lp(net.n_edges(), trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    lp.c(t) = 1.0;
    for (std::size_t e : trees[t]) lp.a(e, t) = 1.0;
  }
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) lp.b(e) = w.effective(e);
  const detail::LpResult sol = lp.solve();

  TreePacking out;
  for (Vertex v = 1; v <= net.n_vertices(); ++v) out.span.push_back(v);
  out.capacity.resize(net.n_edges());
  out.used.assign(net.n_edges(), 0.0);
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) out.capacity[e] = w.effective(e);
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (sol.x[t] <= 1e-12) continue;
    std::vector<TreeEdge> tree;
    for (std::size_t e : trees[t]) {
      tree.push_back({e, 0});
      out.used[e] += sol.x[t];
    }
    out.trees.push_back(std::move(tree));
    out.weights.push_back(sol.x[t]);
  }
  out.value = sol.value;
  return out;
}

/// Maximum number of edge-disjoint spanning trees when edge e offers
/// rounds * multiplicity key bits. With helpers present the network must be
/// a tree, and the packing covers its Steiner subtree.
inline TreePacking pack_trees_integer(const PenNetwork& net, int rounds) {
  if (rounds < 1) throw InputError("rounds must be >= 1");
  std::vector<EdgeIndex> usable;
  std::vector<Vertex> span;
  if (net.all_seekers()) {
    for (EdgeIndex e = 0; e < net.n_edges(); ++e) usable.push_back(e);
    for (Vertex v = 1; v <= net.n_vertices(); ++v) span.push_back(v);
  } else if (net.is_tree()) {
    usable = steiner_subtree(net);
    for (EdgeIndex e : usable) {
      span.push_back(net.edge(e).u);
      span.push_back(net.edge(e).v);
    }
    std::sort(span.begin(), span.end());
    span.erase(std::unique(span.begin(), span.end()), span.end());
  } else {
    detail::require_all_seekers(net, "integer tree packing");
  }

  // Relabel spanned vertices 0..k-1 and expand copies.
  std::vector<int> local(static_cast<std::size_t>(net.n_vertices()) + 1, -1);
  for (std::size_t i = 0; i < span.size(); ++i) local[static_cast<std::size_t>(span[i])] = static_cast<int>(i);
  std::vector<GraphEdge> multi;
  std::vector<TreeEdge> origin;
  for (EdgeIndex e : usable) {
    const EdgeSpec& s = net.edge(e);
    const int copies = rounds * s.multiplicity;
    for (int c = 0; c < copies; ++c) {
      multi.push_back({local[static_cast<std::size_t>(s.u)], local[static_cast<std::size_t>(s.v)]});
      origin.push_back({e, c});
    }
  }
  const auto trees = max_disjoint_spanning_trees(static_cast<int>(span.size()), multi);

  TreePacking out;
  out.span = span;
  out.rounds = rounds;
  out.capacity.assign(net.n_edges(), 0.0);
  out.used.assign(net.n_edges(), 0.0);
  for (EdgeIndex e : usable) out.capacity[e] = rounds * net.edge(e).multiplicity;
  for (const auto& t : trees) {
    std::vector<TreeEdge> tree;
    for (std::size_t id : t) {
      tree.push_back(origin[id]);
      out.used[origin[id].edge] += 1.0;
    }
    std::sort(tree.begin(), tree.end());
    out.trees.push_back(std::move(tree));
    out.weights.push_back(1.0);
  }
  out.value = static_cast<double>(out.trees.size());
  return out;
}

/// Structural check: every tree spans `span` acyclically and no edge exceeds
/// its capacity. Returns a description of the first violation, or empty.
inline std::string check_packing(const PenNetwork& net, const TreePacking& p,
                                 double slack = 1e-9) {
  std::vector<int> local(static_cast<std::size_t>(net.n_vertices()) + 1, -1);
  for (std::size_t i = 0; i < p.span.size(); ++i) local[static_cast<std::size_t>(p.span[i])] = static_cast<int>(i);
  std::vector<double> load(net.n_edges(), 0.0);
  for (std::size_t t = 0; t < p.trees.size(); ++t) {
    const auto& tree = p.trees[t];
    if (tree.size() + 1 != p.span.size()) return "tree " + std::to_string(t) + " has wrong size";
    detail::UnionFind uf(static_cast<int>(p.span.size()));
    for (const TreeEdge& te : tree) {
      const EdgeSpec& s = net.edge(te.edge);
      const int a = local[static_cast<std::size_t>(s.u)];
      const int b = local[static_cast<std::size_t>(s.v)];
      if (a < 0 || b < 0) return "tree " + std::to_string(t) + " leaves the spanned set";
      if (!uf.unite(a, b)) return "tree " + std::to_string(t) + " contains a cycle";
      load[te.edge] += p.weights[t];
    }
  }
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    if (load[e] > p.capacity[e] + slack) {
      return "edge " + std::to_string(e) + " over capacity";
    }
  }
  if (p.rounds > 0) {
    std::vector<TreeEdge> all;
    for (const auto& t : p.trees) all.insert(all.end(), t.begin(), t.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
      return "an edge copy is used by two trees";
    }
  }
  return {};
}

}  // namespace penkey
