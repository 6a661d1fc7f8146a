// Upper bounds on the distillable conference key of a pair-entangled
// network: weakest I-proper cut, I-proper partition bound, the
// Devetak-Winter bound for a reference party, and the exact rate on trees.

#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "penkey/detail/exact.hpp"
#include "penkey/detail/maxflow.hpp"
#include "penkey/network.hpp"
#include "penkey/packing.hpp"
#include "penkey/partition.hpp"

namespace penkey {

enum class BoundKind { weakest_cut, partition_pure, partition_mixed, devetak_winter, tree_exact };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::weakest_cut: return "weakest_cut";
    case BoundKind::partition_pure: return "partition_pure";
    case BoundKind::partition_mixed: return "partition_mixed";
    case BoundKind::devetak_winter: return "devetak_winter";
    case BoundKind::tree_exact: return "tree_exact";
  }
  return "?";
}

struct CutWitness {
  /// Side containing the lowest-numbered seeker.
  std::vector<Vertex> side;
  std::vector<EdgeIndex> edges;
  bool operator==(const CutWitness&) const = default;
};

struct EdgeWitness {
  EdgeIndex edge;
  bool operator==(const EdgeWitness&) const = default;
};

struct VertexWitness {
  Vertex vertex;
  bool operator==(const VertexWitness&) const = default;
};

using Witness = std::variant<std::monostate, CutWitness, Partition, EdgeWitness, VertexWitness>;

struct BoundReport {
  BoundKind kind;
  double value = 0.0;
  /// Exact rational value ("3/2") when the rational path was taken.
  std::optional<std::string> exact;
  Witness witness;
  std::vector<std::string> notes;
  /// Independent value from fractional tree packing (partition bound, I = V).
  std::optional<double> packing_crosscheck;
};

struct BoundOptions {
  int brute_force_limit = kDefaultBruteForceLimit;
  /// Use rational arithmetic whenever every weight is a short rational.
  bool exact = true;
  /// Restrict partitions to at most this many blocks (2 = bipartitions).
  std::optional<int> max_blocks;
  /// Cross-check I = V partition bounds by tree packing below this many trees.
  double crosscheck_tree_limit = 20000;
};

namespace detail {

inline std::vector<double> effective_weights(const PenNetwork& net, const EdgeWeighting& w) {
  if (w.size() != net.n_edges()) {
    throw InputError("weighting has " + std::to_string(w.size()) + " entries for " +
                     std::to_string(net.n_edges()) + " edges");
  }
  std::vector<double> out(net.n_edges());
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) out[e] = w.effective(e);
  return out;
}

template <class W>
std::vector<std::vector<W>> weight_matrix(const PenNetwork& net, const std::vector<W>& w) {
  const auto n = static_cast<std::size_t>(net.n_vertices());
  std::vector<std::vector<W>> m(n, std::vector<W>(n, W(0)));
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    const auto a = static_cast<std::size_t>(net.edge(e).u - 1);
    const auto b = static_cast<std::size_t>(net.edge(e).v - 1);
    m[a][b] += w[e];
    m[b][a] += w[e];
  }
  return m;
}

template <class W>
struct CutResult {
  W value;
  CutWitness witness;
};

template <class W>
CutResult<W> weakest_cut(const PenNetwork& net, const std::vector<W>& w) {
  using Traits = WeightTraits<W>;
  const auto cap = weight_matrix(net, w);
  const auto& seekers = net.seekers();
  std::optional<CutResult<W>> best;
  for (std::size_t i = 0; i < seekers.size(); ++i) {
    for (std::size_t j = i + 1; j < seekers.size(); ++j) {
      const auto cut = min_st_cut(cap, seekers[i] - 1, seekers[j] - 1);
      CutWitness wit;
      // Orient so the side holds the lowest seeker.
      const bool flip = !cut.in_source_side[static_cast<std::size_t>(seekers.front() - 1)];
      for (Vertex v = 1; v <= net.n_vertices(); ++v) {
        if (cut.in_source_side[static_cast<std::size_t>(v - 1)] != flip) wit.side.push_back(v);
      }
      for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
        if (cut.in_source_side[static_cast<std::size_t>(net.edge(e).u - 1)] !=
            cut.in_source_side[static_cast<std::size_t>(net.edge(e).v - 1)]) {
          wit.edges.push_back(e);
        }
      }
      if (!best || Traits::less(cut.value, best->value) ||
          (Traits::same(cut.value, best->value) && wit.edges < best->witness.edges)) {
        best = CutResult<W>{cut.value, std::move(wit)};
      }
    }
  }
  return *best;
}

template <class W>
struct PartitionResult {
  W value;
  Partition witness;
};

/// Branch and bound over restricted-growth strings. Partial cross weight
/// only grows as vertices are placed, and the block count is capped by the
/// seekers still available, so partial / (max blocks - 1) bounds every
/// completion from below.
template <class W>
std::optional<PartitionResult<W>> min_partition(const PenNetwork& net, const std::vector<W>& w,
                                                int limit, int max_blocks) {
  using Traits = WeightTraits<W>;
  const int n = net.n_vertices();
  check_partition_limit(n, limit);
  const auto m = weight_matrix(net, w);
  const auto& seekers = net.seekers();
  const int block_cap = std::min<int>(max_blocks, static_cast<int>(seekers.size()));

  std::vector<int> seekers_from(static_cast<std::size_t>(n) + 2, 0);
  std::vector<bool> is_seeker(static_cast<std::size_t>(n) + 1, false);
  for (Vertex s : seekers) is_seeker[static_cast<std::size_t>(s)] = true;
  for (Vertex v = n; v >= 1; --v) {
    seekers_from[static_cast<std::size_t>(v)] =
        seekers_from[static_cast<std::size_t>(v) + 1] + (is_seeker[static_cast<std::size_t>(v)] ? 1 : 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  std::vector<int> block_seekers;
  int blocks_without_seeker = 0;
  std::optional<W> best;
  std::vector<int> best_assignment;
  Partition best_partition;

  auto recurse = [&](auto&& self, Vertex v, const W& cross) -> void {
    const int open = static_cast<int>(block_seekers.size());
    const int remaining_seekers = seekers_from[static_cast<std::size_t>(v)];
    if (blocks_without_seeker > remaining_seekers) return;
    // Largest block count any completion can reach: each new block needs a
    // seeker of its own.
    const int reachable = std::min(block_cap, open - blocks_without_seeker + remaining_seekers);
    if (reachable < 2) return;
    if (best) {
      const W lower = cross / W(reachable - 1);
      if (Traits::less(*best, lower)) return;
    }
    if (v > n) {
      const W value = cross / W(open - 1);
      if (!best || Traits::less(value, *best)) {
        best = value;
        best_partition = partition_from_assignment(assignment, seekers);
      } else if (Traits::same(value, *best)) {
        Partition cand = partition_from_assignment(assignment, seekers);
        if (cand < best_partition) best_partition = std::move(cand);
      }
      return;
    }
    const bool seeker = is_seeker[static_cast<std::size_t>(v)];
    const auto vi = static_cast<std::size_t>(v - 1);
    for (int b = 0; b <= open && b < block_cap; ++b) {
      W added = W(0);
      for (std::size_t u = 0; u < vi; ++u) {
        if (assignment[u] != b) added += m[vi][u];
      }
      if (b == open) {
        block_seekers.push_back(0);
        ++blocks_without_seeker;
      }
      assignment[vi] = b;
      // Index, not reference: deeper levels may reallocate block_seekers.
      const auto bi = static_cast<std::size_t>(b);
      if (seeker && block_seekers[bi]++ == 0) --blocks_without_seeker;
      self(self, v + 1, cross + added);
      if (seeker && --block_seekers[bi] == 0) ++blocks_without_seeker;
      if (b == open) {
        block_seekers.pop_back();
        --blocks_without_seeker;
      }
    }
  };
  recurse(recurse, 1, W(0));
  if (!best) return std::nullopt;
  return PartitionResult<W>{*best, std::move(best_partition)};
}

inline void add_weight_notes(const EdgeWeighting& w, BoundReport& r) {
  if (w.kind == WeightKind::eof_EF) {
    r.notes.push_back("E_F surrogate: valid, possibly loose");
  }
}

}  // namespace detail

/// Minimum over I-proper vertex bipartitions of the crossing weight,
/// computed as the smallest pairwise seeker min cut.
inline BoundReport weakest_cut_bound(const PenNetwork& net, const EdgeWeighting& w,
                                     const BoundOptions& opt = {}) {
  const auto eff = detail::effective_weights(net, w);
  BoundReport r{BoundKind::weakest_cut, 0.0, std::nullopt, {}, {}, std::nullopt};
  std::optional<std::vector<Rational>> exact;
  if (opt.exact) exact = detail::exact_rationals(eff);
  if (exact) {
    auto res = detail::weakest_cut(net, *exact);
    r.value = detail::WeightTraits<Rational>::to_double(res.value);
    r.exact = detail::rational_string(res.value);
    r.witness = std::move(res.witness);
  } else {
    auto res = detail::weakest_cut(net, eff);
    r.value = res.value;
    r.witness = std::move(res.witness);
  }
  detail::add_weight_notes(w, r);
  return r;
}

/// Minimum over I-proper partitions P (|P| >= 2) of
/// sum_{e in E(P)} w_e / (|P| - 1).
inline BoundReport partition_bound(const PenNetwork& net, const EdgeWeighting& w,
                                   const BoundOptions& opt = {}) {
  const auto eff = detail::effective_weights(net, w);
  const BoundKind kind =
      w.kind == WeightKind::eof_EF ? BoundKind::partition_mixed : BoundKind::partition_pure;
  BoundReport r{kind, 0.0, std::nullopt, {}, {}, std::nullopt};
  const int max_blocks = opt.max_blocks.value_or(net.n_vertices());
  if (max_blocks < 2) throw InputError("max_blocks must be >= 2");

  const bool over_limit = net.n_vertices() > opt.brute_force_limit;
  if (over_limit && !(net.all_seekers() && !opt.max_blocks)) {
    check_partition_limit(net.n_vertices(), opt.brute_force_limit);
  }
  if (over_limit) {
    // I = V beyond the enumeration limit: value from tree-packing duality.
    const TreePacking p = pack_trees_fractional(net, w);
    r.value = p.value;
    r.packing_crosscheck = p.value;
    r.notes.push_back("brute-force limit binds: value from fractional tree packing, no partition witness");
    detail::add_weight_notes(w, r);
    return r;
  }

  std::optional<std::vector<Rational>> exact;
  if (opt.exact) exact = detail::exact_rationals(eff);
  if (exact) {
    auto res = detail::min_partition(net, *exact, opt.brute_force_limit, max_blocks);
    r.value = detail::WeightTraits<Rational>::to_double(res->value);
    r.exact = detail::rational_string(res->value);
    r.witness = std::move(res->witness);
  } else {
    auto res = detail::min_partition(net, eff, opt.brute_force_limit, max_blocks);
    r.value = res->value;
    r.witness = std::move(res->witness);
  }

  if (net.all_seekers() && !opt.max_blocks) {
    const auto edges = detail::underlying_edges(net);
    if (count_spanning_trees(net.n_vertices(), edges) <= opt.crosscheck_tree_limit) {
      r.packing_crosscheck = pack_trees_fractional(net, w).value;
    } else {
      r.notes.push_back("tree-packing cross-check skipped: too many spanning trees");
    }
  }
  detail::add_weight_notes(w, r);
  return r;
}

/// Reduced-state entropy of the reference party divided by N - 1. The
/// reduced state of a PEN state factorises over the incident edges.
inline BoundReport devetak_winter_bound(const PenNetwork& net, Vertex reference) {
  if (reference < 1 || reference > net.n_vertices()) {
    throw InputError("reference vertex " + std::to_string(reference) + " outside 1.." +
                     std::to_string(net.n_vertices()));
  }
  if (net.n_vertices() < 2) throw InputError("Devetak-Winter bound needs N >= 2");
  double local_entropy = 0.0;
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    const EdgeSpec& s = net.edge(e);
    if (s.u != reference && s.v != reference) continue;
    double contribution = 0.0;
    if (auto pure = as_pure_state(s.state)) {
      contribution = entanglement_entropy(*pure);
    } else if (const auto* m = std::get_if<state::DenseMixed>(&s.state)) {
      const std::size_t dims[] = {m->dim_a, m->dim_b};
      const std::size_t keep[] = {s.u == reference ? std::size_t{0} : std::size_t{1}};
      contribution = von_neumann_entropy(partial_trace(m->rho, dims, keep));
    } else {
      throw InputError("edge " + std::to_string(e) +
                       ": weight_override does not determine the reference party's "
                       "reduced state; give the edge state explicitly");
    }
    local_entropy += contribution * s.multiplicity;
  }
  BoundReport r{BoundKind::devetak_winter, local_entropy / (net.n_vertices() - 1),
                std::nullopt, VertexWitness{reference}, {}, std::nullopt};
  return r;
}

/// On a tree, the conference key rate is the smallest per-edge key on the
/// minimal subtree spanning the seekers.
inline BoundReport tree_exact_rate(const PenNetwork& net, const EdgeWeighting& w) {
  const auto eff = detail::effective_weights(net, w);
  const auto subtree = steiner_subtree(net);
  EdgeIndex arg = subtree.front();
  auto key = [&](EdgeIndex e) -> std::pair<Vertex, Vertex> { return std::minmax(net.edge(e).u, net.edge(e).v); };
  for (EdgeIndex e : subtree) {
    if (eff[e] < eff[arg] || (eff[e] == eff[arg] && key(e) < key(arg))) arg = e;
  }
  BoundReport r{BoundKind::tree_exact, eff[arg], std::nullopt, EdgeWitness{arg}, {}, std::nullopt};
  if (auto exact = detail::exact_rational(eff[arg])) r.exact = detail::rational_string(*exact);
  return r;
}

}  // namespace penkey
