// Numerical checks of the relative entropy of genuine multipartite
// entanglement for pure pair-entangled networks: the candidate minimiser
// sigma*, the cut identity D(rho||sigma*) = sum_{e in C*} S_e, a randomized
// falsification search over biseparable states, the directional derivative
// of D at sigma*, and the total correlation reached by Schmidt-basis
// measurements.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "penkey/bounds.hpp"
#include "penkey/linalg.hpp"
#include "penkey/network.hpp"
#include "penkey/partition.hpp"

namespace penkey::gme {

/// Largest total Hilbert dimension accepted by any check.
inline constexpr std::size_t kMaxDimension = 4096;
/// Largest dimension for which sigma* is also assembled as a dense matrix.
inline constexpr std::size_t kAssembleLimit = 1024;
/// Largest joint outcome space for total-correlation checks.
inline constexpr std::size_t kMaxOutcomes = 1000000;

/// One local system: side 0 of an edge copy sits at the edge's u, side 1 at v.
struct Subsystem {
  std::size_t copy;  // index into HilbertLayout::copies
  int side;
  Vertex vertex;
  std::size_t dim;
};

struct EdgeCopy {
  EdgeIndex edge;
  int copy;
  PureBipartiteState state;
  /// Positions of the two halves in HilbertLayout::subsystems.
  std::size_t sub_a;
  std::size_t sub_b;
};

/// Two orderings of the same tensor product space. Vertex order lists the
/// subsystems held by vertex 1, then vertex 2, and so on, each vertex's
/// subsystems by edge index and copy; this is the order of every exported
/// vector and matrix. Edge order lists (a, b) of copy 0, then copy 1, ...
/// and is used internally for per-edge contractions.
class HilbertLayout {
 public:
  explicit HilbertLayout(const PenNetwork& net, std::size_t max_dim = kMaxDimension) {
    std::size_t total = 1;
    for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
      const EdgeSpec& s = net.edge(e);
      auto pure = as_pure_state(s.state);
      if (!pure) {
        throw LimitError("edge " + std::to_string(e) + " is " + state_tag(s.state) +
                         "; only pure edge states are supported here");
      }
      for (int c = 0; c < s.multiplicity; ++c) {
        copies_.push_back({e, c, *pure, 0, 0});
        total *= pure->dim_a() * pure->dim_b();
        if (total > max_dim) {
          std::ostringstream msg;
          msg << "total Hilbert dimension exceeds the cap of " << max_dim;
          throw LimitError(msg.str());
        }
      }
    }
    dim_ = total;

    std::vector<std::pair<std::pair<Vertex, std::size_t>, Subsystem>> order;
    for (std::size_t k = 0; k < copies_.size(); ++k) {
      const EdgeSpec& s = net.edge(copies_[k].edge);
      order.push_back({{s.u, k}, {k, 0, s.u, copies_[k].state.dim_a()}});
      order.push_back({{s.v, k}, {k, 1, s.v, copies_[k].state.dim_b()}});
    }
    std::sort(order.begin(), order.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Subsystem& sub = order[i].second;
      (sub.side == 0 ? copies_[sub.copy].sub_a : copies_[sub.copy].sub_b) = i;
      subsystems_.push_back(sub);
    }
    vertex_stride_.assign(subsystems_.size(), 1);
    for (std::size_t i = subsystems_.size(); i-- > 1;)
      vertex_stride_[i - 1] = vertex_stride_[i] * subsystems_[i].dim;

    // Permutation edge-order index -> vertex-order index.
    edge_to_vertex_.resize(dim_);
    for_each_index([&](std::size_t idx, const std::vector<std::size_t>& digit) {
      std::size_t v = 0;
      for (std::size_t i = 0; i < subsystems_.size(); ++i) v += digit[i] * vertex_stride_[i];
      edge_to_vertex_[idx] = v;
    });
  }

  std::size_t dim() const { return dim_; }
  const std::vector<EdgeCopy>& copies() const { return copies_; }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t copy_dim(std::size_t k) const {
    return copies_[k].state.dim_a() * copies_[k].state.dim_b();
  }

  /// Visit every edge-order index with its digit per subsystem (digits are
  /// indexed by vertex-order subsystem position).
  template <class F>
  void for_each_index(F&& visit) const {
    std::vector<std::size_t> digit(subsystems_.size(), 0);
    // Increment in edge order: the last copy's b half is least significant.
    auto bump = [&](std::size_t sub, std::size_t dim) {
      if (++digit[sub] < dim) return true;
      digit[sub] = 0;
      return false;
    };
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      visit(idx, digit);
      for (std::size_t k = copies_.size(); k-- > 0;) {
        const EdgeCopy& c = copies_[k];
        if (bump(c.sub_b, c.state.dim_b()) || bump(c.sub_a, c.state.dim_a())) break;
      }
    }
  }

  CVector to_vertex_order(const CVector& edge_ordered) const {
    CVector out(static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < dim_; ++i)
      out(static_cast<Eigen::Index>(edge_to_vertex_[i])) = edge_ordered(static_cast<Eigen::Index>(i));
    return out;
  }

  /// Kronecker product of per-copy vectors, edge order.
  CVector product(const std::vector<CVector>& per_copy) const {
    CVector out = CVector::Ones(1);
    for (const CVector& v : per_copy) {
      CVector next(out.size() * v.size());
      for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * v.size(), v.size()) = out(i) * v;
      out = std::move(next);
    }
    return out;
  }

  /// The network state, edge order.
  CVector network_state() const {
    std::vector<CVector> parts;
    for (const EdgeCopy& c : copies_) parts.push_back(c.state.amplitudes());
    return product(parts);
  }

  /// Coordinates of `v` (edge order) in the product basis whose copy-k factor
  /// is the columns of bases[k]: returns sum over tuples, first copy most
  /// significant.
  CVector contract(const CVector& v, const std::vector<CMatrix>& bases) const {
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    CVector cur = v;
    for (std::size_t k = 0; k < copies_.size(); ++k) {
      const Eigen::Index m = static_cast<Eigen::Index>(copy_dim(k));
      const Eigen::Index rest = cur.size() / m;
      Eigen::Map<const RowMajor> t(cur.data(), m, rest);
      const RowMajor r = bases[k].adjoint() * t;  // r_k x rest
      // Rotate the contracted mode to the back: (rest, r_k) row-major.
      const RowMajor rotated = r.transpose();
      cur = Eigen::Map<const CVector>(rotated.data(), rotated.size());
    }
    return cur;
  }

 private:
  std::size_t dim_ = 1;
  std::vector<EdgeCopy> copies_;
  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> vertex_stride_;
  std::vector<std::size_t> edge_to_vertex_;
};

namespace detail {

/// Schmidt bases completed to full orthonormal bases of each half.
struct FullSchmidt {
  std::vector<double> p;  // squared coefficients, padded with zeros
  CMatrix basis_a;        // d_a x d_a
  CMatrix basis_b;        // d_b x d_b
};

inline FullSchmidt full_schmidt(const PureBipartiteState& s) {
  Eigen::JacobiSVD<CMatrix> svd(s.coefficient_matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  FullSchmidt out;
  out.basis_a = svd.matrixU();
  out.basis_b = svd.matrixV().conjugate();
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) out.p.push_back(sv(i) * sv(i));
  return out;
}

/// |a_n>|b_n> as a vector on the copy's d_a * d_b space.
inline CVector kron_vec(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline CVector haar_vector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

/// Vertex sets S (containing vertex 1) such that S and its complement each
/// contain a seeker.
inline std::vector<std::vector<bool>> proper_bipartitions(const PenNetwork& net) {
  const int n = net.n_vertices();
  if (n > 20) throw LimitError("bipartition sampling supports at most 20 vertices");
  std::vector<std::vector<bool>> out;
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<bool> in(static_cast<std::size_t>(n) + 1, false);
    in[1] = true;
    for (int v = 2; v <= n; ++v) in[static_cast<std::size_t>(v)] = (mask >> (v - 2)) & 1u;
    bool inside = false, outside = false;
    for (Vertex s : net.seekers()) (in[static_cast<std::size_t>(s)] ? inside : outside) = true;
    if (inside && outside) out.push_back(std::move(in));
  }
  return out;
}

}  // namespace detail

/// sigma* = (x)_{e in C*} sum_n p_n |nn><nn| (x) (x)_{e not in C*} |psi_e><psi_e|
/// with |n> the Schmidt basis of |psi_e>.
struct SigmaStar {
  std::vector<EdgeIndex> cut;
  /// Side of the cut containing vertex 1.
  std::vector<Vertex> side;
  HilbertLayout layout;
  /// Per copy: orthonormal support vectors (columns) and their weights.
  std::vector<CMatrix> factor_vectors;
  std::vector<std::vector<double>> factor_weights;
  /// Vertex-order dense matrix, present when dim <= kAssembleLimit.
  std::optional<DensityMatrix> assembled;

  std::size_t dim() const { return layout.dim(); }

  std::size_t support_rank() const {
    std::size_t r = 1;
    for (const auto& w : factor_weights) r *= w.size();
    return r;
  }

  /// Eigenvalues on the support, in the order produced by
  /// HilbertLayout::contract.
  Eigen::VectorXd support_eigenvalues() const {
    Eigen::VectorXd out = Eigen::VectorXd::Ones(1);
    for (const auto& w : factor_weights) {
      Eigen::VectorXd next(out.size() * static_cast<Eigen::Index>(w.size()));
      for (Eigen::Index i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
          next(i * static_cast<Eigen::Index>(w.size()) + static_cast<Eigen::Index>(j)) = out(i) * w[j];
      out = std::move(next);
    }
    return out;
  }
};

/// Vertex side containing vertex 1 when `cut` is exactly the edge set
/// crossing an I-proper bipartition; throws otherwise.
inline std::vector<Vertex> cut_side(const PenNetwork& net, const std::vector<EdgeIndex>& cut) {
  const int n = net.n_vertices();
  std::vector<bool> in_cut(net.n_edges(), false);
  for (EdgeIndex e : cut) {
    if (e >= net.n_edges()) throw InputError("cut references edge " + std::to_string(e) + " out of range");
    in_cut[e] = true;
  }
  // Two-colour: uncut edges keep colour, cut edges flip it.
  std::vector<int> colour(static_cast<std::size_t>(n) + 1, -1);
  const auto inc = net.incidence();
  colour[1] = 0;
  std::vector<Vertex> stack{1};
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (EdgeIndex e : inc[static_cast<std::size_t>(u)]) {
      const EdgeSpec& s = net.edge(e);
      const Vertex w = s.u == u ? s.v : s.u;
      const int want = colour[static_cast<std::size_t>(u)] ^ (in_cut[e] ? 1 : 0);
      int& cw = colour[static_cast<std::size_t>(w)];
      if (cw == -1) {
        cw = want;
        stack.push_back(w);
      } else if (cw != want) {
        throw InputError("edge set is not the cut of any vertex bipartition");
      }
    }
  }
  bool seeker0 = false, seeker1 = false;
  for (Vertex s : net.seekers()) (colour[static_cast<std::size_t>(s)] == 0 ? seeker0 : seeker1) = true;
  if (!seeker0 || !seeker1) throw InputError("cut is not I-proper: one side has no seeker");
  std::vector<Vertex> side;
  for (Vertex v = 1; v <= n; ++v)
    if (colour[static_cast<std::size_t>(v)] == 0) side.push_back(v);
  return side;
}

inline SigmaStar build_sigma_star(const PenNetwork& net, std::vector<EdgeIndex> cut) {
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
  auto side = cut_side(net, cut);
  SigmaStar s{cut, std::move(side), HilbertLayout(net), {}, {}, std::nullopt};

  for (const EdgeCopy& c : s.layout.copies()) {
    const bool in_cut = std::binary_search(cut.begin(), cut.end(), c.edge);
    if (!in_cut) {
      s.factor_vectors.push_back(c.state.amplitudes());
      s.factor_weights.push_back({1.0});
      continue;
    }
    const auto fs = detail::full_schmidt(c.state);
    std::vector<CVector> cols;
    std::vector<double> weights;
    for (std::size_t n = 0; n < fs.p.size(); ++n) {
      if (fs.p[n] <= tol::kZeroEigen) continue;
      const auto col = static_cast<Eigen::Index>(n);
      cols.push_back(detail::kron_vec(fs.basis_a.col(col), fs.basis_b.col(col)));
      weights.push_back(fs.p[n]);
    }
    CMatrix m(static_cast<Eigen::Index>(c.state.dim_a() * c.state.dim_b()),
              static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
    s.factor_vectors.push_back(std::move(m));
    s.factor_weights.push_back(std::move(weights));
  }

  if (s.dim() <= kAssembleLimit) {
    // Sum of lambda |v><v| over product support vectors.
    const Eigen::VectorXd lambda = s.support_eigenvalues();
    std::vector<std::size_t> rank;
    for (const auto& w : s.factor_weights) rank.push_back(w.size());
    CMatrix dense = CMatrix::Zero(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(s.dim()));
    std::vector<std::size_t> pick(rank.size(), 0);
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      std::vector<CVector> parts;
      for (std::size_t c = 0; c < rank.size(); ++c)
        parts.push_back(s.factor_vectors[c].col(static_cast<Eigen::Index>(pick[c])));
      const CVector v = s.layout.to_vertex_order(s.layout.product(parts));
      dense.noalias() += lambda(k) * (v * v.adjoint());
      for (std::size_t c = rank.size(); c-- > 0;) {
        if (++pick[c] < rank[c]) break;
        pick[c] = 0;
      }
    }
    s.assembled = DensityMatrix(dense);
  }
  return s;
}

/// |psi><psi| of the whole network in vertex order (dimension <= kAssembleLimit).
inline DensityMatrix network_density(const HilbertLayout& layout) {
  if (layout.dim() > kAssembleLimit) {
    throw LimitError("dense network state limited to dimension " + std::to_string(kAssembleLimit));
  }
  return DensityMatrix::projector(layout.to_vertex_order(layout.network_state()));
}

namespace detail {

/// D(psi || w sigma* + (1 - w)|phi><phi|) for psi in the support of sigma*,
/// evaluated on span(supp sigma*, phi). Vectors are edge ordered.
inline double mixture_divergence(const SigmaStar& s, const CVector& psi_coords,
                                 const Eigen::VectorXd& lambda, const CVector& phi, double w) {
  const CVector c = s.layout.contract(phi, s.factor_vectors);
  const double perp2 = std::max(0.0, 1.0 - c.squaredNorm());
  const bool extra = perp2 > 1e-14;
  const Eigen::Index r = c.size() + (extra ? 1 : 0);
  CVector u(r);
  u.head(c.size()) = c;
  if (extra) u(c.size()) = std::sqrt(perp2);
  CMatrix m = (1.0 - w) * (u * u.adjoint());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) m(k, k) += w * lambda(k);
  CVector g = CVector::Zero(r);
  g.head(psi_coords.size()) = psi_coords;

  const HermitianSpectrum spec = hermitian_spectrum(m);
  double d = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double weight = std::norm(spec.vectors.col(i).dot(g));
    if (spec.values(i) <= tol::kZeroEigen) {
      if (weight > tol::kZeroEigen) return std::numeric_limits<double>::infinity();
      continue;
    }
    d -= weight * std::log2(spec.values(i));
  }
  return d;
}

}  // namespace detail

struct IdentityOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0x5EED;
  double tolerance = 1e-8;
};

struct IdentityReport {
  double weakest_cut = 0.0;
  std::vector<EdgeIndex> cut;
  std::vector<Vertex> side;
  /// D(rho || sigma*) and how it was evaluated ("dense" or "spectral").
  double relative_entropy = 0.0;
  std::string method;
  bool identity_holds = false;
  std::size_t samples = 0;
  /// Smallest divergence seen over sampled biseparable states.
  double min_sampled = std::numeric_limits<double>::infinity();
  std::vector<std::string> counterexamples;

  bool passed() const { return identity_holds && counterexamples.empty(); }
};

/// Checks D(rho || sigma*) == weakest cut and searches for a biseparable
/// state doing better. The search draws a uniformly random I-proper
/// bipartition, a Haar-random product vector across it, and tests sigma at
/// sigma*-weights 0, 1/2 and 1. It can find counterexamples; it cannot prove
/// minimality.
inline IdentityReport verify_gme_identity(const PenNetwork& net, const IdentityOptions& opt = {}) {
  const auto weights = derive_weights(net, WeightKind::entropy_S);
  const BoundReport wc = weakest_cut_bound(net, weights);
  const auto& witness = std::get<CutWitness>(wc.witness);

  IdentityReport rep;
  rep.weakest_cut = wc.value;
  rep.cut = witness.edges;
  const SigmaStar sigma = build_sigma_star(net, witness.edges);
  rep.side = sigma.side;
  const HilbertLayout& layout = sigma.layout;
  const CVector psi = layout.network_state();

  const Eigen::VectorXd lambda = sigma.support_eigenvalues();
  const CVector psi_coords = layout.contract(psi, sigma.factor_vectors);
  if (sigma.assembled) {
    rep.relative_entropy = relative_entropy(network_density(layout), *sigma.assembled);
    rep.method = "dense";
  } else {
    if (std::abs(psi_coords.squaredNorm() - 1.0) > tol::kZeroEigen) {
      rep.relative_entropy = std::numeric_limits<double>::infinity();
    } else {
      double d = 0.0;
      for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const double weight = std::norm(psi_coords(k));
        if (weight > 0.0) d -= weight * std::log2(lambda(k));
      }
      rep.relative_entropy = d;
    }
    rep.method = "spectral";
  }
  rep.identity_holds = std::abs(rep.relative_entropy - rep.weakest_cut) <= opt.tolerance;

  const auto bipartitions = detail::proper_bipartitions(net);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, bipartitions.size() - 1);
  const auto& subs = layout.subsystems();
  for (std::size_t trial = 0; trial < opt.samples; ++trial) {
    const auto& in_s = bipartitions[pick(rng)];
    std::size_t dim_s = 1, dim_t = 1;
    for (const Subsystem& sub : subs) (in_s[static_cast<std::size_t>(sub.vertex)] ? dim_s : dim_t) *= sub.dim;
    const CVector a = detail::haar_vector(dim_s, rng);
    const CVector b = detail::haar_vector(dim_t, rng);
    CVector phi(static_cast<Eigen::Index>(layout.dim()));
    layout.for_each_index([&](std::size_t idx, const std::vector<std::size_t>& digit) {
      std::size_t is = 0, it = 0;
      for (std::size_t i = 0; i < subs.size(); ++i) {
        if (in_s[static_cast<std::size_t>(subs[i].vertex)]) {
          is = is * subs[i].dim + digit[i];
        } else {
          it = it * subs[i].dim + digit[i];
        }
      }
      phi(static_cast<Eigen::Index>(idx)) = a(static_cast<Eigen::Index>(is)) * b(static_cast<Eigen::Index>(it));
    });
    for (double w : {0.0, 0.5, 1.0}) {
      const double d = detail::mixture_divergence(sigma, psi_coords, lambda, phi, w);
      rep.min_sampled = std::min(rep.min_sampled, d);
      if (d < rep.weakest_cut - opt.tolerance) {
        std::ostringstream msg;
        msg << "sample " << trial << " (sigma* weight " << w << "): D = " << d;
        rep.counterexamples.push_back(msg.str());
      }
    }
  }
  rep.samples = opt.samples;
  return rep;
}

/// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tolerance, int max_depth = 50) {
  auto step = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi,
                  double whole, double tol, int depth) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return self(self, lo, mid, flo, flm, fmid, left, tol / 2.0, depth - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, tol / 2.0, depth - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return step(step, a, b, fa, fm, fb, whole, tolerance, max_depth);
}

/// int_0^inf Tr((sigma*+t)^-1 rho (sigma*+t)^-1 sigma) dt for rho = |psi><psi|,
/// i.e. 1 - f'(0). `form(w)` must return <w|sigma|w>. Uses t = u / (1 - u)
/// and the eigendecomposition of the assembled sigma*; psi must lie in its
/// support.
inline double one_minus_fprime_quadrature(const SigmaStar& s, const CVector& psi_vertex_order,
                                          const std::function<double(const CVector&)>& form,
                                          double tolerance = 1e-10) {
  if (!s.assembled) throw LimitError("quadrature needs the assembled sigma*");
  const HermitianSpectrum spec = hermitian_spectrum(s.assembled->matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < spec.values.size(); ++k)
    if (spec.values(k) > 1e-12) keep.push_back(k);
  CMatrix v(spec.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd lam(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    v.col(static_cast<Eigen::Index>(j)) = spec.vectors.col(keep[j]);
    lam(static_cast<Eigen::Index>(j)) = spec.values(keep[j]);
  }
  const CVector coeff = v.adjoint() * psi_vertex_order;
  // (1 - u)(sigma* + t)^-1 psi, whose form is the transformed integrand.
  auto integrand = [&](double u) {
    CVector scaled(coeff.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k) scaled(k) = coeff(k) / (lam(k) * (1.0 - u) + u);
    return form(v * scaled);
  };
  return adaptive_simpson(integrand, 0.0, 1.0, tolerance);
}

/// A random pure biseparable direction of the form
/// (x)_{e in C} |alpha_e>|beta_e> (x) (x)_{e not in C} |phi_e>.
struct ProductDirection {
  std::vector<EdgeIndex> cut;
  /// Per copy: alpha, beta (cut copies) or phi_e (others, stored in alpha).
  std::vector<CVector> alpha;
  std::vector<CVector> beta;

  CVector copy_vector(std::size_t k) const {
    return beta[k].size() ? detail::kron_vec(alpha[k], beta[k]) : alpha[k];
  }
};

/// 1 - f'(0) for maximally entangled edges from the per-edge product:
/// C* and C: |sum a_n b_n|^2; C* only: |sum <nn|phi_e>|^2;
/// C only: |sum a_n b_n|^2 / d; neither: |<Phi_e|phi_e>|^2.
inline double one_minus_fprime_closed_form(const SigmaStar& s, const ProductDirection& dir) {
  double out = 1.0;
  const auto& copies = s.layout.copies();
  for (std::size_t k = 0; k < copies.size(); ++k) {
    const auto fs = detail::full_schmidt(copies[k].state);
    const std::size_t d = std::min(copies[k].state.dim_a(), copies[k].state.dim_b());
    const bool in_star = std::binary_search(s.cut.begin(), s.cut.end(), copies[k].edge);
    const bool in_c = std::binary_search(dir.cut.begin(), dir.cut.end(), copies[k].edge);
    Complex sum = 0.0;
    if (in_c) {
      for (std::size_t n = 0; n < d; ++n) {
        const auto col = static_cast<Eigen::Index>(n);
        sum += fs.basis_a.col(col).dot(dir.alpha[k]) * fs.basis_b.col(col).dot(dir.beta[k]);
      }
    } else {
      for (std::size_t n = 0; n < d; ++n) {
        const auto col = static_cast<Eigen::Index>(n);
        sum += detail::kron_vec(fs.basis_a.col(col), fs.basis_b.col(col)).dot(dir.alpha[k]);
      }
    }
    out *= std::norm(sum) / (in_star ? 1.0 : static_cast<double>(d));
  }
  return out;
}

struct DerivativeReport {
  std::vector<EdgeIndex> cut;
  std::size_t trials = 0;
  double max_abs_one_minus_fprime = 0.0;
  /// Largest |closed form - quadrature|.
  double max_discrepancy = 0.0;
  std::vector<std::string> counterexamples;

  bool passed() const { return counterexamples.empty(); }
};

struct DerivativeOptions {
  std::uint64_t seed = 0x5EED;
  double agreement = 1e-6;
  double bound_slack = 1e-9;
};

inline void require_maximally_entangled(const PenNetwork& net) {
  for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
    const auto pure = as_pure_state(net.edge(e).state);
    if (!pure) throw LimitError("edge " + std::to_string(e) + " is not pure");
    const auto sd = schmidt_decompose(*pure);
    const double d = static_cast<double>(sd.coefficients.size());
    for (double p : sd.coefficients) {
      if (std::abs(p - 1.0 / d) > 1e-9) {
        throw LimitError("edge " + std::to_string(e) +
                         " is not maximally entangled; the derivative check needs bell-type edges");
      }
    }
  }
}

/// Samples random product directions and compares the closed-form 1 - f'(0)
/// against quadrature of the integral representation, asserting
/// |1 - f'(0)| <= 1 at the weakest cut.
inline DerivativeReport directional_derivative_check(const PenNetwork& net, std::size_t trials,
                                                     const DerivativeOptions& opt = {}) {
  require_maximally_entangled(net);
  const BoundReport wc = weakest_cut_bound(net, derive_weights(net, WeightKind::entropy_S));
  const SigmaStar s = build_sigma_star(net, std::get<CutWitness>(wc.witness).edges);
  if (!s.assembled) throw LimitError("derivative check limited to dimension " + std::to_string(kAssembleLimit));
  const CVector psi = s.layout.to_vertex_order(s.layout.network_state());

  DerivativeReport rep;
  rep.cut = s.cut;
  rep.trials = trials;
  const auto bipartitions = detail::proper_bipartitions(net);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, bipartitions.size() - 1);
  const auto& copies = s.layout.copies();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto& in_s = bipartitions[pick(rng)];
    ProductDirection dir;
    for (EdgeIndex e = 0; e < net.n_edges(); ++e) {
      const EdgeSpec& es = net.edge(e);
      if (in_s[static_cast<std::size_t>(es.u)] != in_s[static_cast<std::size_t>(es.v)]) dir.cut.push_back(e);
    }
    std::vector<CVector> parts;
    for (std::size_t k = 0; k < copies.size(); ++k) {
      const auto& st = copies[k].state;
      if (std::binary_search(dir.cut.begin(), dir.cut.end(), copies[k].edge)) {
        dir.alpha.push_back(detail::haar_vector(st.dim_a(), rng));
        dir.beta.push_back(detail::haar_vector(st.dim_b(), rng));
      } else {
        dir.alpha.push_back(detail::haar_vector(st.dim_a() * st.dim_b(), rng));
        dir.beta.emplace_back();
      }
      parts.push_back(dir.copy_vector(k));
    }
    const CVector phi = s.layout.to_vertex_order(s.layout.product(parts));

    const double closed = one_minus_fprime_closed_form(s, dir);
    const double quad = one_minus_fprime_quadrature(
        s, psi, [&](const CVector& w) { return std::norm(phi.dot(w)); });
    rep.max_abs_one_minus_fprime = std::max(rep.max_abs_one_minus_fprime, std::abs(closed));
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(closed - quad));
    if (std::abs(closed - quad) > opt.agreement || std::abs(closed) > 1.0 + opt.bound_slack) {
      std::ostringstream msg;
      msg << "trial " << trial << ": closed form " << closed << ", quadrature " << quad;
      rep.counterexamples.push_back(msg.str());
    }
  }
  return rep;
}

struct TotalCorrelationReport {
  Partition partition;
  std::vector<EdgeIndex> cross_edges;
  double total_correlation = 0.0;
  /// Sum over crossing edges of S_e * multiplicity.
  double cross_entropy = 0.0;

  bool passed(double tolerance = 1e-9) const {
    return std::abs(total_correlation - cross_entropy) <= tolerance;
  }
};

/// Total correlation sum_J H(X_J) - H(X) of the outcomes obtained when every
/// vertex measures each of its halves in the corresponding Schmidt basis.
inline TotalCorrelationReport total_correlation_check(const PenNetwork& net, const Partition& partition) {
  const int n = net.n_vertices();
  const auto block = block_of(partition, n);
  std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& b : partition.blocks)
    for (Vertex v : b) {
      if (v < 1 || v > n) throw InputError("partition vertex " + std::to_string(v) + " out of range");
      ++seen[static_cast<std::size_t>(v)];
    }
  for (Vertex v = 1; v <= n; ++v) {
    if (seen[static_cast<std::size_t>(v)] != 1) {
      throw InputError("partition must contain vertex " + std::to_string(v) + " exactly once");
    }
  }

  const HilbertLayout layout(net, kMaxOutcomes);
  const auto& copies = layout.copies();
  const auto& subs = layout.subsystems();

  // Born-rule outcome distribution of each copy.
  std::vector<Eigen::MatrixXd> dist;
  for (const EdgeCopy& c : copies) {
    const auto fs = detail::full_schmidt(c.state);
    const CVector& amp = c.state.amplitudes();
    Eigen::MatrixXd p(static_cast<Eigen::Index>(c.state.dim_a()), static_cast<Eigen::Index>(c.state.dim_b()));
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j)
        p(i, j) = std::norm(detail::kron_vec(fs.basis_a.col(i), fs.basis_b.col(j)).dot(amp));
    dist.push_back(std::move(p));
  }

  const std::size_t n_blocks = partition.blocks.size();
  std::vector<std::size_t> block_size(n_blocks, 1);
  for (const Subsystem& sub : subs) block_size[static_cast<std::size_t>(block[static_cast<std::size_t>(sub.vertex)])] *= sub.dim;
  std::vector<std::vector<double>> marginal(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) marginal[b].assign(block_size[b], 0.0);

  std::vector<double> joint(layout.dim());
  std::vector<std::size_t> key(n_blocks);
  layout.for_each_index([&](std::size_t idx, const std::vector<std::size_t>& digit) {
    double prob = 1.0;
    for (const EdgeCopy& c : copies)
      prob *= dist[&c - copies.data()](static_cast<Eigen::Index>(digit[c.sub_a]), static_cast<Eigen::Index>(digit[c.sub_b]));
    joint[idx] = prob;
    std::fill(key.begin(), key.end(), 0);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      auto& k = key[static_cast<std::size_t>(block[static_cast<std::size_t>(subs[i].vertex)])];
      k = k * subs[i].dim + digit[i];
    }
    for (std::size_t b = 0; b < n_blocks; ++b) marginal[b][key[b]] += prob;
  });

  TotalCorrelationReport rep;
  rep.partition = partition;
  rep.cross_edges = cross_edges(net, partition);
  double tc = -shannon_entropy(joint);
  for (const auto& m : marginal) tc += shannon_entropy(m);
  rep.total_correlation = tc;
  for (EdgeIndex e : rep.cross_edges) {
    rep.cross_entropy += entanglement_entropy(*as_pure_state(net.edge(e).state)) * net.edge(e).multiplicity;
  }
  return rep;
}

}  // namespace penkey::gme
