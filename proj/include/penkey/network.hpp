// Pair-entangled network: a connected graph whose edges carry bipartite
// states, together with the set of secrecy-seeking vertices.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "penkey/errors.hpp"
#include "penkey/linalg.hpp"

namespace penkey {

/// Vertices are 1-based.
using Vertex = int;
using EdgeIndex = std::size_t;

namespace state {

struct Bell {
  bool operator==(const Bell&) const = default;
};

/// Squared Schmidt coefficients; the state is sum_n sqrt(p_n)|n>|n>.
struct Pure {
  std::vector<double> schmidt;
  bool operator==(const Pure&) const = default;
};

struct DensePure {
  PureBipartiteState state;
  bool operator==(const DensePure&) const = default;
};

struct DenseMixed {
  std::size_t dim_a;
  std::size_t dim_b;
  DensityMatrix rho;
  bool operator==(const DenseMixed& o) const {
    return dim_a == o.dim_a && dim_b == o.dim_b && rho.matrix() == o.rho.matrix();
  }
};

/// Externally supplied per-copy weight (e.g. a known distillable key).
struct WeightOverride {
  double weight;
  bool operator==(const WeightOverride&) const = default;
};

}  // namespace state

using EdgeState = std::variant<state::Bell, state::Pure, state::DensePure,
                               state::DenseMixed, state::WeightOverride>;

inline const char* state_tag(const EdgeState& s) {
  static constexpr const char* kTags[] = {"bell", "pure", "dense_pure",
                                          "dense_mixed", "weight_override"};
  return kTags[s.index()];
}

struct EdgeSpec {
  Vertex u;
  Vertex v;
  EdgeState state;
  int multiplicity = 1;

  bool operator==(const EdgeSpec&) const = default;
};

class PenNetwork {
 public:
  PenNetwork(int n_vertices, std::vector<EdgeSpec> edges,
             std::vector<Vertex> seekers,
             std::vector<std::string> names = {})
      : n_(n_vertices),
        edges_(std::move(edges)),
        seekers_(std::move(seekers)),
        names_(std::move(names)) {
    std::sort(seekers_.begin(), seekers_.end());
    validate();
  }

  int n_vertices() const { return n_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const EdgeSpec& edge(EdgeIndex e) const { return edges_.at(e); }
  std::size_t n_edges() const { return edges_.size(); }
  /// Sorted ascending.
  const std::vector<Vertex>& seekers() const { return seekers_; }
  const std::vector<std::string>& names() const { return names_; }

  bool is_seeker(Vertex v) const {
    return std::binary_search(seekers_.begin(), seekers_.end(), v);
  }
  bool all_seekers() const {
    return static_cast<int>(seekers_.size()) == n_;
  }

  /// Same graph and states, different secrecy-seeking set.
  PenNetwork with_seekers(std::vector<Vertex> seekers) const {
    return PenNetwork(n_, edges_, std::move(seekers), names_);
  }

  /// Incident edge indices per vertex (index 0 unused).
  std::vector<std::vector<EdgeIndex>> incidence() const {
    std::vector<std::vector<EdgeIndex>> inc(static_cast<std::size_t>(n_) + 1);
    for (EdgeIndex e = 0; e < edges_.size(); ++e) {
      inc[static_cast<std::size_t>(edges_[e].u)].push_back(e);
      inc[static_cast<std::size_t>(edges_[e].v)].push_back(e);
    }
    return inc;
  }

  /// The underlying simple graph is a tree (parallel copies via
  /// multiplicity do not count as cycles).
  bool is_tree() const {
    return edges_.size() + 1 == static_cast<std::size_t>(n_);
  }

  bool operator==(const PenNetwork&) const = default;

 private:
  void validate() const {
    if (n_ < 1) throw InputError("n_vertices must be positive");
    if (!names_.empty() && names_.size() != static_cast<std::size_t>(n_)) {
      throw InputError("names must list one entry per vertex");
    }
    if (seekers_.size() < 2) {
      throw InputError("at least two secrecy-seeking vertices are required");
    }
    for (std::size_t i = 0; i < seekers_.size(); ++i) {
      if (seekers_[i] < 1 || seekers_[i] > n_) {
        std::ostringstream msg;
        msg << "seekers: vertex " << seekers_[i] << " outside 1.." << n_;
        throw InputError(msg.str());
      }
      if (i > 0 && seekers_[i] == seekers_[i - 1]) {
        std::ostringstream msg;
        msg << "seekers: duplicate vertex " << seekers_[i];
        throw InputError(msg.str());
      }
    }
    std::vector<std::pair<Vertex, Vertex>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const EdgeSpec& spec = edges_[e];
      auto fail = [e](const std::string& what) {
        std::ostringstream msg;
        msg << "edges[" << e << "]: " << what;
        throw InputError(msg.str());
      };
      if (spec.u < 1 || spec.u > n_ || spec.v < 1 || spec.v > n_) {
        fail("endpoint outside 1.." + std::to_string(n_));
      }
      if (spec.u == spec.v) fail("self-loop on vertex " + std::to_string(spec.u));
      if (spec.multiplicity < 1) fail("multiplicity must be >= 1");
      const std::pair<Vertex, Vertex> key = std::minmax(spec.u, spec.v);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        fail("duplicate edge (" + std::to_string(key.first) + "," +
             std::to_string(key.second) + "); use multiplicity for parallel copies");
      }
      seen.emplace_back(key);
      validate_state(spec.state, fail);
    }
    if (!connected()) throw InputError("network graph is not connected");
  }

  template <class Fail>
  static void validate_state(const EdgeState& s, Fail&& fail) {
    if (const auto* p = std::get_if<state::Pure>(&s)) {
      if (p->schmidt.empty()) fail("empty Schmidt coefficient list");
      double total = 0.0;
      for (double c : p->schmidt) {
        if (c < 0.0) fail("negative Schmidt coefficient");
        total += c;
      }
      if (std::abs(total - 1.0) > tol::kNorm) {
        fail("Schmidt coefficients sum to " + std::to_string(total) + ", not 1");
      }
    } else if (const auto* m = std::get_if<state::DenseMixed>(&s)) {
      if (m->dim_a * m->dim_b != m->rho.dim()) {
        fail("dense_mixed dims do not match matrix size");
      }
    } else if (const auto* w = std::get_if<state::WeightOverride>(&s)) {
      if (!(w->weight >= 0.0)) fail("weight_override must be nonnegative");
    }
  }

  bool connected() const {
    std::vector<bool> seen(static_cast<std::size_t>(n_) + 1, false);
    const auto inc = incidence();
    std::queue<Vertex> queue;
    queue.push(1);
    seen[1] = true;
    int count = 1;
    while (!queue.empty()) {
      const Vertex x = queue.front();
      queue.pop();
      for (EdgeIndex e : inc[static_cast<std::size_t>(x)]) {
        const Vertex y = edges_[e].u == x ? edges_[e].v : edges_[e].u;
        if (!seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = true;
          ++count;
          queue.push(y);
        }
      }
    }
    return count == n_;
  }

  int n_;
  std::vector<EdgeSpec> edges_;
  std::vector<Vertex> seekers_;
  std::vector<std::string> names_;
};

enum class WeightKind { entropy_S, eof_EF, custom };

inline const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::entropy_S: return "entropy_S";
    case WeightKind::eof_EF: return "eof_EF";
    case WeightKind::custom: return "custom";
  }
  return "?";
}

/// Per-copy edge weights. The weight an edge contributes to a cut or
/// partition is weight * multiplicity, see effective().
struct EdgeWeighting {
  WeightKind kind;
  std::vector<double> per_copy;
  std::vector<int> multiplicity;

  double effective(EdgeIndex e) const {
    return per_copy.at(e) * multiplicity.at(e);
  }
  std::size_t size() const { return per_copy.size(); }
};

/// A pure edge state as an explicit vector, when it has one.
inline std::optional<PureBipartiteState> as_pure_state(const EdgeState& s) {
  if (std::holds_alternative<state::Bell>(s)) return PureBipartiteState::bell();
  if (const auto* p = std::get_if<state::Pure>(&s))
    return PureBipartiteState::from_schmidt(p->schmidt);
  if (const auto* d = std::get_if<state::DensePure>(&s)) return d->state;
  return std::nullopt;
}

inline EdgeWeighting derive_weights(const PenNetwork& net, WeightKind kind) {
  EdgeWeighting w{kind, {}, {}};
  w.per_copy.reserve(net.n_edges());
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    const EdgeSpec& spec = net.edge(e);
    auto unsupported = [&](const std::string& why) {
      std::ostringstream msg;
      msg << "edge " << e << " (" << spec.u << "," << spec.v << "): "
          << state_tag(spec.state) << " state unsupported for weight kind "
          << to_string(kind) << ": " << why;
      return LimitError(msg.str());
    };
    double value = 0.0;
    if (const auto* o = std::get_if<state::WeightOverride>(&spec.state)) {
      value = o->weight;
    } else if (kind == WeightKind::custom) {
      throw unsupported("custom weighting requires weight_override on every edge");
    } else if (std::holds_alternative<state::Bell>(spec.state)) {
      value = 1.0;
    } else if (const auto* p = std::get_if<state::Pure>(&spec.state)) {
      value = shannon_entropy(p->schmidt);
    } else if (const auto* d = std::get_if<state::DensePure>(&spec.state)) {
      value = entanglement_entropy(d->state);
    } else if (const auto* m = std::get_if<state::DenseMixed>(&spec.state)) {
      if (kind == WeightKind::entropy_S) {
        throw unsupported("entanglement entropy is defined for pure states only");
      }
      if (m->dim_a != 2 || m->dim_b != 2) {
        throw unsupported("mixed-state EoF is only evaluated for two qubits; "
                          "supply a weight_override");
      }
      value = entanglement_of_formation_2qubit(m->rho);
    }
    w.per_copy.push_back(value);
    w.multiplicity.push_back(spec.multiplicity);
  }
  return w;
}

/// Natural weighting for bounds: entanglement entropy when every edge is
/// pure (or overridden), entanglement of formation otherwise.
inline EdgeWeighting default_weights(const PenNetwork& net) {
  const bool any_mixed = std::any_of(
      net.edges().begin(), net.edges().end(), [](const EdgeSpec& e) {
        return std::holds_alternative<state::DenseMixed>(e.state);
      });
  return derive_weights(net, any_mixed ? WeightKind::eof_EF : WeightKind::entropy_S);
}

/// Edges of the minimal subtree containing every seeker. Every leaf of the
/// result is a seeker. Indices ascending.
inline std::vector<EdgeIndex> steiner_subtree(const PenNetwork& net) {
  if (!net.is_tree()) {
    throw InputError("steiner_subtree: network graph is not a tree");
  }
  const auto n = static_cast<std::size_t>(net.n_vertices());
  std::vector<bool> removed_edge(net.n_edges(), false);
  std::vector<int> degree(n + 1, 0);
  for (const EdgeSpec& e : net.edges()) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  const auto inc = net.incidence();
  std::queue<Vertex> leaves;
  for (Vertex v = 1; v <= net.n_vertices(); ++v) {
    if (degree[static_cast<std::size_t>(v)] == 1 && !net.is_seeker(v)) leaves.push(v);
  }
  while (!leaves.empty()) {
    const Vertex leaf = leaves.front();
    leaves.pop();
    for (EdgeIndex e : inc[static_cast<std::size_t>(leaf)]) {
      if (removed_edge[e]) continue;
      removed_edge[e] = true;
      --degree[static_cast<std::size_t>(leaf)];
      const EdgeSpec& spec = net.edge(e);
      const Vertex other = spec.u == leaf ? spec.v : spec.u;
      if (--degree[static_cast<std::size_t>(other)] == 1 && !net.is_seeker(other)) {
        leaves.push(other);
      }
    }
  }
  std::vector<EdgeIndex> kept;
  for (EdgeIndex e = 0; e < net.n_edges(); ++e)
    if (!removed_edge[e]) kept.push_back(e);
  return kept;
}

}  // namespace penkey
