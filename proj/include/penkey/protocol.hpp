// Conference-key propagation over a spanning-tree packing. Each tree carries
// one conference bit: the root draws it, and every tree edge relays it as a
// one-time-pad announcement under that edge copy's bipartite key bit.

#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "penkey/packing.hpp"

namespace penkey {

/// Counter-based bit source: output depends only on (seed, stream, index).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()(std::uint64_t stream, std::uint64_t index) const {
    return mix(mix(seed_ ^ mix(stream)) + index);
  }
  std::uint8_t bit(std::uint64_t stream, std::uint64_t index) const {
    return static_cast<std::uint8_t>((*this)(stream, index) >> 63);
  }

  /// Independent generator for a sub-task (e.g. one trial of many).
  CounterRng split(std::uint64_t index) const { return CounterRng((*this)(kSplitStream, index)); }

 private:
  static constexpr std::uint64_t kSplitStream = 0x5b1170ULL;
  std::uint64_t seed_;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct Announcement {
  std::size_t tree;
  Vertex announcer;
  Vertex receiver;
  /// Edge copy whose key bit pads this announcement.
  TreeEdge pad;
  std::uint8_t bit;
  bool operator==(const Announcement&) const = default;
};

struct KeyTranscript {
  int rounds = 0;
  std::uint64_t seed = 0;
  std::vector<Vertex> span;
  std::vector<std::vector<TreeEdge>> trees;
  /// edge_keys[e][copy]: shared key bit of that edge copy.
  std::vector<std::vector<std::uint8_t>> edge_keys;
  std::vector<Announcement> announcements;
  /// Seeker -> conference key bits, one per tree.
  std::map<Vertex, std::vector<std::uint8_t>> conference_keys;

  bool operator==(const KeyTranscript&) const = default;
};

namespace detail {
inline constexpr std::uint64_t kEdgeKeyStream = 1;
inline constexpr std::uint64_t kRootBitStream = 2;
}  // namespace detail

inline KeyTranscript simulate_conference_key(const PenNetwork& net, const TreePacking& packing,
                                             std::uint64_t seed) {
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    if (!std::holds_alternative<state::Bell>(net.edge(e).state)) {
      throw LimitError("simulation requires bell edges; edge " + std::to_string(e) + " is " +
                       state_tag(net.edge(e).state));
    }
  }
  if (packing.rounds < 1) throw InputError("simulation requires an integer packing");
  if (auto why = check_packing(net, packing); !why.empty()) {
    throw InputError("invalid packing: " + why);
  }

  const CounterRng rng(seed);
  KeyTranscript tr;
  tr.rounds = packing.rounds;
  tr.seed = seed;
  tr.span = packing.span;
  tr.trees = packing.trees;
  tr.edge_keys.resize(net.n_edges());
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    const auto copies = static_cast<std::size_t>(packing.capacity[e]);
    tr.edge_keys[e].resize(copies);
    for (std::size_t c = 0; c < copies; ++c) {
      tr.edge_keys[e][c] = rng.bit(detail::kEdgeKeyStream, (std::uint64_t{e} << 32) | c);
    }
  }
  for (Vertex s : net.seekers()) tr.conference_keys[s] = {};

  const Vertex root = packing.span.front();
  const auto n = static_cast<std::size_t>(net.n_vertices());
  for (std::size_t t = 0; t < packing.trees.size(); ++t) {
    // Adjacency of this tree, neighbours in ascending order.
    std::vector<std::vector<std::pair<Vertex, TreeEdge>>> adj(n + 1);
    for (const TreeEdge& te : packing.trees[t]) {
      const EdgeSpec& s = net.edge(te.edge);
      adj[static_cast<std::size_t>(s.u)].push_back({s.v, te});
      adj[static_cast<std::size_t>(s.v)].push_back({s.u, te});
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());

    std::vector<int> known(n + 1, -1);
    known[static_cast<std::size_t>(root)] = rng.bit(detail::kRootBitStream, t);
    std::queue<Vertex> bfs;
    bfs.push(root);
    while (!bfs.empty()) {
      const Vertex u = bfs.front();
      bfs.pop();
      for (const auto& [v, te] : adj[static_cast<std::size_t>(u)]) {
        if (known[static_cast<std::size_t>(v)] != -1) continue;
        const std::uint8_t pad = tr.edge_keys[te.edge][static_cast<std::size_t>(te.copy)];
        const auto bit = static_cast<std::uint8_t>(known[static_cast<std::size_t>(u)] ^ pad);
        tr.announcements.push_back({t, u, v, te, bit});
        // The receiver holds the same key bit and removes the pad.
        known[static_cast<std::size_t>(v)] = bit ^ pad;
        bfs.push(v);
      }
    }
    for (auto& [s, key] : tr.conference_keys) {
      key.push_back(static_cast<std::uint8_t>(known[static_cast<std::size_t>(s)]));
    }
  }
  return tr;
}

struct AuditReport {
  bool pads_single_use = true;
  bool seekers_agree = true;
  /// Only evaluated over two or more trials.
  std::optional<bool> uncorrelated;
  double max_abs_correlation = 0.0;
  double threshold = 0.0;
  std::size_t trials = 0;
  std::vector<std::string> violations;

  bool passed() const { return pads_single_use && seekers_agree && uncorrelated.value_or(true); }
};

namespace detail {

inline void audit_single(const KeyTranscript& tr, std::size_t trial, AuditReport& report) {
  std::map<TreeEdge, int> uses;
  for (const Announcement& a : tr.announcements) {
    const auto e = a.pad.edge;
    if (e >= tr.edge_keys.size() || a.pad.copy < 0 ||
        static_cast<std::size_t>(a.pad.copy) >= tr.edge_keys[e].size()) {
      report.pads_single_use = false;
      report.violations.push_back("trial " + std::to_string(trial) +
                                  ": announcement uses a nonexistent edge key bit");
      continue;
    }
    if (++uses[a.pad] == 2) {
      report.pads_single_use = false;
      report.violations.push_back("trial " + std::to_string(trial) + ": key bit of edge " +
                                  std::to_string(e) + " copy " + std::to_string(a.pad.copy) +
                                  " pads more than one announcement");
    }
  }
  const std::vector<std::uint8_t>* first = nullptr;
  for (const auto& [s, key] : tr.conference_keys) {
    if (!first) {
      first = &key;
    } else if (key != *first) {
      report.seekers_agree = false;
      report.violations.push_back("trial " + std::to_string(trial) + ": seeker " +
                                  std::to_string(s) + " holds a different key");
    }
  }
}

}  // namespace detail

/// Structural audit of one transcript: single-use pads and key agreement.
inline AuditReport audit_secrecy(const KeyTranscript& tr) {
  AuditReport report;
  report.trials = 1;
  detail::audit_single(tr, 0, report);
  return report;
}

/// Audit over independent trials of the same packing. Adds the empirical
/// correlation between every announcement bit and every conference bit,
/// which must stay below 4 / sqrt(trials).
inline AuditReport audit_secrecy(std::span<const KeyTranscript> trials) {
  AuditReport report;
  report.trials = trials.size();
  for (std::size_t i = 0; i < trials.size(); ++i) detail::audit_single(trials[i], i, report);
  if (trials.size() < 2) return report;

  report.threshold = 4.0 / std::sqrt(static_cast<double>(trials.size()));
  const std::size_t n_ann = trials.front().announcements.size();
  const auto& keys0 = trials.front().conference_keys;
  const std::size_t n_bits = keys0.empty() ? 0 : keys0.begin()->second.size();
  for (const auto& tr : trials) {
    if (tr.announcements.size() != n_ann || tr.conference_keys.empty() ||
        tr.conference_keys.begin()->second.size() != n_bits) {
      report.uncorrelated = false;
      report.violations.push_back("trials do not share one packing");
      return report;
    }
  }
  const double t = static_cast<double>(trials.size());
  for (std::size_t j = 0; j < n_ann; ++j) {
    for (std::size_t i = 0; i < n_bits; ++i) {
      double sx = 0, sy = 0, sxy = 0;
      for (const auto& tr : trials) {
        const double x = tr.announcements[j].bit;
        const double y = tr.conference_keys.begin()->second[i];
        sx += x;
        sy += y;
        sxy += x * y;
      }
      const double mx = sx / t, my = sy / t;
      const double vx = mx * (1 - mx), vy = my * (1 - my);
      const double corr = (vx > 0 && vy > 0) ? (sxy / t - mx * my) / std::sqrt(vx * vy) : 0.0;
      report.max_abs_correlation = std::max(report.max_abs_correlation, std::abs(corr));
    }
  }
  report.uncorrelated = report.max_abs_correlation <= report.threshold;
  if (!*report.uncorrelated) {
    report.violations.push_back("announcement correlates with the conference key (|r| = " +
                                std::to_string(report.max_abs_correlation) + ")");
  }
  return report;
}

/// Bits packed most-significant first into hex digits.
inline std::string bits_to_hex(const std::vector<std::uint8_t>& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      nibble <<= 1;
      if (i + k < bits.size()) nibble |= bits[i + k] & 1;
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

}  // namespace penkey
