// Three-party BB84 conference key rate, the correlator constraint for
// states preparable in a three-node pair-entangled network, and the rate
// ceiling under that constraint.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "penkey/linalg.hpp"

namespace penkey::bb84 {

/// Pauli expectations on qubits A, B, C (A is the most significant).
struct CorrelatorSet {
  double xxx = 0.0;  // <X_A X_B X_C>
  double zab = 0.0;  // <Z_A Z_B>
  double zac = 0.0;  // <Z_A Z_C>
  double zb = 0.0;   // <Z_B>
  double zc = 0.0;   // <Z_C>

  void validate() const {
    for (double c : {xxx, zab, zac, zb, zc}) {
      if (!(c >= -1.0 && c <= 1.0)) {
        std::ostringstream msg;
        msg << "correlator " << c << " outside [-1, 1]";
        throw InputError(msg.str());
      }
    }
  }
  bool operator==(const CorrelatorSet&) const = default;
};

inline CorrelatorSet ghz_correlators() { return {1.0, 1.0, 1.0, 0.0, 0.0}; }

namespace detail {

inline CMatrix pauli(char p) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (p) {
    case 'I': m(0, 0) = m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = m(1, 0) = 1.0; break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw std::logic_error("unknown Pauli");
  }
  return m;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double expectation(const DensityMatrix& rho, const char (&string)[4]) {
  const CMatrix op = kron(kron(pauli(string[0]), pauli(string[1])), pauli(string[2]));
  const Complex v = (op * rho.matrix()).trace();
  if (std::abs(v.imag()) > 1e-9) throw InputError("Pauli expectation not real: state not Hermitian");
  return v.real();
}

}  // namespace detail

inline CorrelatorSet correlators_from_state(const DensityMatrix& rho) {
  if (rho.dim() != 8) {
    throw InputError("correlators_from_state expects a three-qubit (8x8) state, got dimension " +
                     std::to_string(rho.dim()));
  }
  return {detail::expectation(rho, "XXX"), detail::expectation(rho, "ZZI"),
          detail::expectation(rho, "ZIZ"), detail::expectation(rho, "IZI"),
          detail::expectation(rho, "IIZ")};
}

/// 1/2 (|phi+><phi+|_AB (x) |+><+|_C + |phi+><phi+|_AC (x) |+><+|_B), a
/// biseparable state reaching the PEN-3 ceiling.
inline DensityMatrix biseparable_ceiling_state() {
  const double r = 1.0 / std::sqrt(2.0);
  CVector ab_c = CVector::Zero(8);  // |phi+>_AB |+>_C, index a*4 + b*2 + c
  CVector ac_b = CVector::Zero(8);  // |phi+>_AC |+>_B
  for (int c = 0; c < 2; ++c) {
    ab_c(0 * 4 + 0 * 2 + c) += r * r;
    ab_c(1 * 4 + 1 * 2 + c) += r * r;
  }
  for (int b = 0; b < 2; ++b) {
    ac_b(0 * 4 + b * 2 + 0) += r * r;
    ac_b(1 * 4 + b * 2 + 1) += r * r;
  }
  return DensityMatrix::trusted(0.5 * (ab_c * ab_c.adjoint() + ac_b * ac_b.adjoint()));
}

/// 1 - h((1 - xxx)/2) - max{h((1 - zab)/2), h((1 - zac)/2)}; negative means
/// no key.
inline double bb84_rate(const CorrelatorSet& c) {
  c.validate();
  auto h = [](double corr) { return binary_entropy(std::clamp((1.0 - corr) / 2.0, 0.0, 1.0)); };
  return 1.0 - h(c.xxx) - std::max(h(c.zab), h(c.zac));
}

struct Feasibility {
  bool feasible;
  /// 1 + |zb||zc| - |zab| - |zac|
  double inflation_slack;
  /// 2 - xxx^2 - 2 min{zab, zac}
  double combined_slack;
};

inline Feasibility pen3_feasible(const CorrelatorSet& c, double tolerance = 1e-9) {
  c.validate();
  const double inflation = 1.0 + std::abs(c.zb) * std::abs(c.zc) - std::abs(c.zab) - std::abs(c.zac);
  const double combined = 2.0 - c.xxx * c.xxx - 2.0 * std::min(c.zab, c.zac);
  return {inflation >= -tolerance && combined >= -tolerance, inflation, combined};
}

struct CeilingResult {
  double rate;
  CorrelatorSet argmax;
};

struct CeilingOptions {
  int resolution = 1000;
  double xxx_min = -1.0;
  double xxx_max = 1.0;
  int refinement_rounds = 30;
};

/// Maximises bb84_rate over correlators satisfying pen3_feasible.
///
/// The rate depends on (xxx, m) with m = min(zab, zac) once zab = zac = m:
/// for m >= 0 the larger error term belongs to the smaller correlation, and
/// m < 0 is equivalent to -m after relabelling one party's Z outcome. The
/// single-Z expectations only enter the inflation inequality, so each
/// candidate uses the smallest |zb| = |zc| that satisfies it.
inline CeilingResult bb84_ceiling_search(const CeilingOptions& opt = {}) {
  if (opt.resolution < 100) throw InputError("ceiling search resolution must be >= 100");
  if (!(opt.xxx_min <= opt.xxx_max) || opt.xxx_min < -1.0 || opt.xxx_max > 1.0) {
    throw InputError("invalid xxx search range");
  }
  auto candidate = [](double x, double m) {
    const double z1 = std::sqrt(std::max(0.0, 2.0 * m - 1.0));
    return CorrelatorSet{x, m, m, z1, z1};
  };
  auto evaluate = [&](double x, double m, CeilingResult& best, bool& found) {
    const CorrelatorSet c = candidate(x, m);
    if (!pen3_feasible(c, 0.0).feasible) return;
    const double r = bb84_rate(c);
    if (!found || r > best.rate) {
      best = {r, c};
      found = true;
    }
  };

  CeilingResult best{-std::numeric_limits<double>::infinity(), {}};
  bool found = false;
  const int n = opt.resolution;
  // Descending xxx, so among mirrored optima the one with xxx >= 0 is kept.
  for (int i = n; i >= 0; --i) {
    const double x = opt.xxx_min + (opt.xxx_max - opt.xxx_min) * i / n;
    for (int j = 0; j <= n; ++j) evaluate(x, static_cast<double>(j) / n, best, found);
  }
  // Local refinement: shrink a window around the incumbent.
  double wx = (opt.xxx_max - opt.xxx_min) / n;
  double wm = 1.0 / n;
  for (int round = 0; round < opt.refinement_rounds; ++round) {
    const double cx = best.argmax.xxx;
    const double cm = best.argmax.zab;
    constexpr int kSteps = 10;
    for (int i = -kSteps; i <= kSteps; ++i) {
      const double x = std::clamp(cx + wx * i / kSteps, opt.xxx_min, opt.xxx_max);
      for (int j = -kSteps; j <= kSteps; ++j) {
        evaluate(x, std::clamp(cm + wm * j / kSteps, 0.0, 1.0), best, found);
      }
    }
    wx /= 2.0;
    wm /= 2.0;
  }
  return best;
}

}  // namespace penkey::bb84
