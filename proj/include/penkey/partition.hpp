#pragma once

#include <algorithm>
#include <sstream>
#include <vector>

#include "penkey/errors.hpp"
#include "penkey/network.hpp"

namespace penkey {

inline constexpr int kDefaultBruteForceLimit = 12;

/// Set partition of 1..n. Blocks are sorted internally and ordered by their
/// smallest element, so equal partitions compare equal.
struct Partition {
  std::vector<std::vector<Vertex>> blocks;
  /// Every block contains a seeker.
  bool proper = false;

  std::size_t size() const { return blocks.size(); }
  bool operator==(const Partition&) const = default;
  bool operator<(const Partition& o) const { return blocks < o.blocks; }
};

/// Block id (0-based) of each vertex, index 0 unused.
inline std::vector<int> block_of(const Partition& p, int n) {
  std::vector<int> id(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (Vertex v : p.blocks[b]) id[static_cast<std::size_t>(v)] = static_cast<int>(b);
  return id;
}

/// Edges joining different blocks, ascending.
inline std::vector<EdgeIndex> cross_edges(const PenNetwork& net, const Partition& p) {
  const auto id = block_of(p, net.n_vertices());
  std::vector<EdgeIndex> out;
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    const EdgeSpec& s = net.edge(e);
    if (id[static_cast<std::size_t>(s.u)] != id[static_cast<std::size_t>(s.v)]) out.push_back(e);
  }
  return out;
}

/// Build a Partition from a restricted-growth assignment (vertex v in block
/// assignment[v - 1]).
inline Partition partition_from_assignment(const std::vector<int>& assignment,
                                           const std::vector<Vertex>& seekers) {
  int n_blocks = 0;
  for (int a : assignment) n_blocks = std::max(n_blocks, a + 1);
  Partition p;
  p.blocks.resize(static_cast<std::size_t>(n_blocks));
  for (std::size_t i = 0; i < assignment.size(); ++i)
    p.blocks[static_cast<std::size_t>(assignment[i])].push_back(static_cast<Vertex>(i + 1));
  p.proper = std::all_of(p.blocks.begin(), p.blocks.end(), [&](const auto& block) {
    return std::any_of(block.begin(), block.end(), [&](Vertex v) {
      return std::binary_search(seekers.begin(), seekers.end(), v);
    });
  });
  return p;
}

inline void check_partition_limit(int n, int limit) {
  if (n > limit) {
    std::ostringstream msg;
    msg << "partition enumeration over " << n
        << " vertices exceeds the brute-force limit of " << limit;
    throw LimitError(msg.str());
  }
}

/// Calls visit(assignment) for every set partition of 1..n, as a restricted
/// growth string, whose blocks all intersect `seekers` (sorted).
template <class Visit>
void for_each_proper_assignment(int n, const std::vector<Vertex>& seekers,
                                Visit&& visit, int limit = kDefaultBruteForceLimit) {
  check_partition_limit(n, limit);
  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  std::vector<int> block_seekers;  // seeker count per open block
  // Seekers among vertices v..n.
  std::vector<int> seekers_from(static_cast<std::size_t>(n) + 2, 0);
  for (Vertex v = n; v >= 1; --v) {
    seekers_from[static_cast<std::size_t>(v)] =
        seekers_from[static_cast<std::size_t>(v) + 1] +
        (std::binary_search(seekers.begin(), seekers.end(), v) ? 1 : 0);
  }
  int blocks_without_seeker = 0;

  auto recurse = [&](auto&& self, Vertex v) -> void {
    if (blocks_without_seeker > seekers_from[static_cast<std::size_t>(v)]) return;
    if (v > n) {
      visit(static_cast<const std::vector<int>&>(assignment));
      return;
    }
    const bool is_seeker = std::binary_search(seekers.begin(), seekers.end(), v);
    const int open = static_cast<int>(block_seekers.size());
    for (int b = 0; b <= open; ++b) {
      if (b == open) {
        block_seekers.push_back(0);
        ++blocks_without_seeker;
      }
      assignment[static_cast<std::size_t>(v) - 1] = b;
      // Index, not reference: deeper levels may reallocate block_seekers.
      const auto bi = static_cast<std::size_t>(b);
      if (is_seeker && block_seekers[bi]++ == 0) --blocks_without_seeker;
      self(self, v + 1);
      if (is_seeker && --block_seekers[bi] == 0) ++blocks_without_seeker;
      if (b == open) {
        block_seekers.pop_back();
        --blocks_without_seeker;
      }
    }
  };
  recurse(recurse, 1);
}

/// Every I-proper set partition of 1..n, each exactly once.
inline std::vector<Partition> enumerate_proper_partitions(
    int n, std::vector<Vertex> seekers, int limit = kDefaultBruteForceLimit) {
  std::sort(seekers.begin(), seekers.end());
  std::vector<Partition> out;
  for_each_proper_assignment(
      n, seekers,
      [&](const std::vector<int>& a) { out.push_back(partition_from_assignment(a, seekers)); },
      limit);
  return out;
}

}  // namespace penkey
