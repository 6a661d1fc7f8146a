// Bipartite quantum states, entropies and the two-qubit entanglement of
// formation. All entropies are in bits.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "penkey/errors.hpp"

namespace penkey {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double kNorm = 1e-9;        // state normalisation, trace
inline constexpr double kHermitian = 1e-9;   // entrywise |A - A^dagger|
inline constexpr double kPsd = 1e-9;         // most negative admissible eigenvalue
inline constexpr double kZeroEigen = 1e-10;  // eigenvalues below this are zero
}  // namespace tol

/// Shannon entropy in bits of a probability vector; 0 log 0 = 0.
inline double shannon_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "binary_entropy: argument " << x << " outside [0, 1]";
    throw InputError(msg.str());
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct HermitianSpectrum {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns
};

inline HermitianSpectrum hermitian_spectrum(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw InputError("eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

class DensityMatrix {
 public:
  /// Validates hermiticity, unit trace and positivity.
  explicit DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
    validate();
  }

  /// Skips validation. For matrices that are density matrices by
  /// construction (tensor products, mixtures, partial traces of valid input).
  static DensityMatrix trusted(CMatrix entries) {
    return DensityMatrix(std::move(entries), Trusted{});
  }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return trusted(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static DensityMatrix projector(const CVector& psi) {
    return trusted(psi * psi.adjoint());
  }

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }

  /// Eigenvalues ascending, with values in [-kPsd, 0) clamped to 0.
  Eigen::VectorXd eigenvalues() const {
    return hermitian_spectrum(entries_).values.cwiseMax(0.0);
  }

 private:
  struct Trusted {};
  DensityMatrix(CMatrix entries, Trusted) : entries_(std::move(entries)) {}

  void validate() const {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
      throw InputError("density matrix must be square and nonempty");
    }
    const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol::kHermitian) {
      std::ostringstream msg;
      msg << "density matrix not Hermitian (max deviation " << asym << ")";
      throw InputError(msg.str());
    }
    const Complex tr = entries_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol::kNorm) {
      std::ostringstream msg;
      msg << "density matrix trace " << tr.real() << " != 1";
      throw InputError(msg.str());
    }
    const double min_ev = hermitian_spectrum(entries_).values.minCoeff();
    if (min_ev < -tol::kPsd) {
      std::ostringstream msg;
      msg << "density matrix has negative eigenvalue " << min_ev;
      throw InputError(msg.str());
    }
  }

  CMatrix entries_;
};

class PureBipartiteState {
 public:
  /// Amplitudes are row-major over (a, b): index a * dim_b + b.
  PureBipartiteState(std::size_t dim_a, std::size_t dim_b, CVector amplitudes)
      : dim_a_(dim_a), dim_b_(dim_b), amplitudes_(std::move(amplitudes)) {
    if (dim_a_ < 1 || dim_b_ < 1) {
      throw InputError("bipartite state dimensions must be positive");
    }
    if (static_cast<std::size_t>(amplitudes_.size()) != dim_a_ * dim_b_) {
      std::ostringstream msg;
      msg << "amplitude vector has length " << amplitudes_.size()
          << " but dims " << dim_a_ << "x" << dim_b_ << " require "
          << dim_a_ * dim_b_;
      throw InputError(msg.str());
    }
    const double norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - 1.0) > tol::kNorm) {
      std::ostringstream msg;
      msg << "state not normalised (squared norm " << norm2 << ")";
      throw InputError(msg.str());
    }
  }

  /// (|00> + |11>) / sqrt(2)
  static PureBipartiteState bell() {
    CVector amp = CVector::Zero(4);
    amp(0) = amp(3) = 1.0 / std::sqrt(2.0);
    return {2, 2, amp};
  }

  /// sum_n sqrt(p_n) |n>|n> on a d x d system, d = p.size().
  static PureBipartiteState from_schmidt(std::span<const double> p) {
    const std::size_t d = p.size();
    if (d == 0) throw InputError("empty Schmidt coefficient list");
    CVector amp = CVector::Zero(static_cast<Eigen::Index>(d * d));
    for (std::size_t n = 0; n < d; ++n) {
      if (p[n] < 0.0) throw InputError("negative Schmidt coefficient");
      amp(static_cast<Eigen::Index>(n * d + n)) = std::sqrt(p[n]);
    }
    return {d, d, amp};
  }

  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  const CVector& amplitudes() const { return amplitudes_; }

  /// Coefficient matrix M(a, b) = amplitude of |a>|b>.
  CMatrix coefficient_matrix() const {
    CMatrix m(dim_a_, dim_b_);
    for (std::size_t a = 0; a < dim_a_; ++a)
      for (std::size_t b = 0; b < dim_b_; ++b)
        m(a, b) = amplitudes_(static_cast<Eigen::Index>(a * dim_b_ + b));
    return m;
  }

  DensityMatrix density() const {
    return DensityMatrix::projector(amplitudes_);
  }

  bool operator==(const PureBipartiteState& other) const {
    return dim_a_ == other.dim_a_ && dim_b_ == other.dim_b_ &&
           amplitudes_ == other.amplitudes_;
  }

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  CVector amplitudes_;
};

struct SchmidtDecomposition {
  /// Squared Schmidt coefficients p_n, nonincreasing, summing to 1.
  std::vector<double> coefficients;
  /// Column n of basis_a / basis_b pairs with coefficients[n]:
  /// psi = sum_n sqrt(p_n) basis_a.col(n) (x) basis_b.col(n).
  CMatrix basis_a;
  CMatrix basis_b;

  std::size_t rank(double threshold = tol::kZeroEigen) const {
    return static_cast<std::size_t>(
        std::count_if(coefficients.begin(), coefficients.end(),
                      [threshold](double p) { return p > threshold; }));
  }

  CVector reconstruct() const {
    const auto da = basis_a.rows();
    const auto db = basis_b.rows();
    CVector out = CVector::Zero(da * db);
    for (std::size_t n = 0; n < coefficients.size(); ++n) {
      const auto col = static_cast<Eigen::Index>(n);
      const double s = std::sqrt(coefficients[n]);
      for (Eigen::Index a = 0; a < da; ++a)
        for (Eigen::Index b = 0; b < db; ++b)
          out(a * db + b) += s * basis_a(a, col) * basis_b(b, col);
    }
    return out;
  }
};

inline SchmidtDecomposition schmidt_decompose(const PureBipartiteState& state) {
  const CMatrix m = state.coefficient_matrix();
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  SchmidtDecomposition out;
  out.coefficients.resize(static_cast<std::size_t>(s.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out.coefficients[static_cast<std::size_t>(i)] = s(i) * s(i);
    total += s(i) * s(i);
  }
  for (double& p : out.coefficients) p /= total;
  out.basis_a = svd.matrixU();
  // M = U S V^dagger, so the B-side vectors are the conjugated columns of V.
  out.basis_b = svd.matrixV().conjugate();
  return out;
}

inline double entanglement_entropy(const PureBipartiteState& state) {
  return shannon_entropy(schmidt_decompose(state).coefficients);
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::VectorXd ev = rho.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol::kZeroEigen) s -= ev(i) * std::log2(ev(i));
  }
  return s;
}

/// Trace out every subsystem not listed in `keep`. Subsystem 0 is the most
/// significant digit of the row index. Kept subsystems retain their order.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
  const std::size_t n_sub = dims.size();
  const std::size_t total = std::accumulate(dims.begin(), dims.end(),
                                            std::size_t{1}, std::multiplies<>());
  if (total != rho.dim()) {
    std::ostringstream msg;
    msg << "partial_trace: subsystem dims multiply to " << total
        << " but matrix has dimension " << rho.dim();
    throw InputError(msg.str());
  }
  if (keep.empty()) throw InputError("partial_trace: keep set is empty");
  std::vector<bool> kept(n_sub, false);
  for (std::size_t k : keep) {
    if (k >= n_sub) throw InputError("partial_trace: keep index out of range");
    if (kept[k]) throw InputError("partial_trace: duplicate keep index");
    kept[k] = true;
  }
  std::vector<std::size_t> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());

  std::size_t d_keep = 1;
  for (std::size_t k : keep_sorted) d_keep *= dims[k];
  const std::size_t d_trace = total / d_keep;

  // Mixed-radix strides of each subsystem in the full index.
  std::vector<std::size_t> stride(n_sub, 1);
  for (std::size_t i = n_sub; i-- > 1;) stride[i - 1] = stride[i] * dims[i];

  auto compose = [&](std::size_t kept_index, std::size_t traced_index) {
    std::size_t full = 0;
    for (std::size_t i = n_sub; i-- > 0;) {
      if (kept[i]) {
        full += (kept_index % dims[i]) * stride[i];
        kept_index /= dims[i];
      } else {
        full += (traced_index % dims[i]) * stride[i];
        traced_index /= dims[i];
      }
    }
    return full;
  };

  std::vector<std::vector<std::size_t>> full_index(
      d_keep, std::vector<std::size_t>(d_trace));
  for (std::size_t k = 0; k < d_keep; ++k)
    for (std::size_t t = 0; t < d_trace; ++t) full_index[k][t] = compose(k, t);

  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(d_keep, d_keep);
  for (std::size_t i = 0; i < d_keep; ++i)
    for (std::size_t j = 0; j < d_keep; ++j) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < d_trace; ++t)
        acc += m(full_index[i][t], full_index[j][t]);
      out(i, j) = acc;
    }
  return DensityMatrix::trusted(std::move(out));
}

/// Two-qubit entanglement of formation from the concurrence closed form.
inline double entanglement_of_formation_2qubit(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    std::ostringstream msg;
    msg << "entanglement_of_formation_2qubit requires a 4x4 matrix, got "
        << rho.dim();
    throw InputError(msg.str());
  }
  CMatrix yy = CMatrix::Zero(4, 4);
  // sigma_y (x) sigma_y is real and anti-diagonal with entries (-1, 1, 1, -1).
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const CMatrix& m = rho.matrix();
  // lambda_i are the singular values of sqrt(rho) yy sqrt(rho)*, which
  // avoids square roots of near-zero eigenvalues of sqrt(rho) rho~ sqrt(rho).
  // Eigenvalues at rounding level are zeroed before their square root.
  const HermitianSpectrum spec = hermitian_spectrum(m);
  Eigen::VectorXd sqrt_ev =
      spec.values.unaryExpr([](double x) { return x > 1e-14 ? std::sqrt(x) : 0.0; });
  const CMatrix sqrt_rho =
      spec.vectors * sqrt_ev.cast<Complex>().asDiagonal() * spec.vectors.adjoint();
  const CMatrix a = sqrt_rho * yy * sqrt_rho.conjugate();
  Eigen::VectorXd lam = Eigen::JacobiSVD<CMatrix>(a).singularValues();
  std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
  const double concurrence = std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
  const double c2 = std::min(1.0, concurrence * concurrence);
  return binary_entropy(std::clamp((1.0 + std::sqrt(1.0 - c2)) / 2.0, 0.0, 1.0));
}

/// Quantum relative entropy D(rho || sigma) in bits; +infinity when the
/// support of rho is not contained in the support of sigma.
inline double relative_entropy(const DensityMatrix& rho,
                               const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    std::ostringstream msg;
    msg << "relative_entropy: dimension mismatch " << rho.dim() << " vs "
        << sigma.dim();
    throw InputError(msg.str());
  }
  const Eigen::VectorXd r = rho.eigenvalues();
  const HermitianSpectrum s = hermitian_spectrum(sigma.matrix());
  // Diagonal of rho in sigma's eigenbasis.
  const Eigen::VectorXd weights =
      (s.vectors.adjoint() * rho.matrix() * s.vectors).diagonal().real();

  double outside_support = 0.0;
  double cross = 0.0;
  for (Eigen::Index j = 0; j < s.values.size(); ++j) {
    if (s.values(j) <= tol::kZeroEigen) {
      outside_support += std::max(0.0, weights(j));
    } else {
      cross += weights(j) * std::log2(s.values(j));
    }
  }
  if (outside_support > tol::kZeroEigen) {
    return std::numeric_limits<double>::infinity();
  }
  double self = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r(i) > tol::kZeroEigen) self += r(i) * std::log2(r(i));
  }
  const double d = self - cross;
  // Rounding noise near zero; anything more negative is reported as is.
  return d < 0.0 && d > -tol::kPsd ? 0.0 : d;
}

}  // namespace penkey
