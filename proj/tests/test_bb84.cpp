#include <gtest/gtest.h>

#include <random>

#include "penkey/bb84.hpp"

using namespace penkey;
using namespace penkey::bb84;

namespace {

const double kCeiling = 1.0 - binary_entropy(0.25);

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ();
}

CMatrix random_two_qubit_state(std::mt19937_64& rng) {
  // Random pure state, then a random amount of white noise.
  std::normal_distribution<double> g;
  CVector v(4);
  for (int i = 0; i < 4; ++i) v(i) = Complex(g(rng), g(rng));
  v.normalize();
  const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return p * v * v.adjoint() + (1 - p) * CMatrix::Identity(4, 4) / 4.0;
}

// Reorders qubits: qubit k of the result is qubit perm[k] of rho (qubit 0 most significant).
CMatrix permute_qubits(const CMatrix& rho, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  const int d = 1 << n;
  auto map = [&](int idx) {
    int out = 0;
    for (int k = 0; k < n; ++k) out |= ((idx >> (n - 1 - perm[k])) & 1) << (n - 1 - k);
    return out;
  };
  CMatrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(map(i), map(j)) = rho(i, j);
  return out;
}

// Three sources AB, AC, BC; each party applies a random unitary to its two
// qubits and keeps the first.
DensityMatrix random_pen3_state(std::mt19937_64& rng) {
  const CMatrix ab = random_two_qubit_state(rng), ac = random_two_qubit_state(rng), bc = random_two_qubit_state(rng);
  // Source order: A1 B1 | A2 C1 | B2 C2. Target order: A1 A2 B1 B2 C1 C2.
  const CMatrix sources = bb84::detail::kron(bb84::detail::kron(ab, ac), bc);
  CMatrix rho = permute_qubits(sources, {0, 2, 1, 4, 3, 5});
  const CMatrix u = bb84::detail::kron(bb84::detail::kron(random_unitary(4, rng), random_unitary(4, rng)), random_unitary(4, rng));
  rho = u * rho * u.adjoint();
  const std::size_t dims[] = {2, 2, 2, 2, 2, 2};
  const std::size_t keep[] = {0, 2, 4};
  return partial_trace(DensityMatrix::trusted(rho), dims, keep);
}

}  // namespace

TEST(Correlators, KnownStates) {
  CVector ghz = CVector::Zero(8);
  ghz(0) = ghz(7) = 1 / std::sqrt(2.0);
  const auto c = correlators_from_state(DensityMatrix::projector(ghz));
  EXPECT_NEAR(c.xxx, 1, 1e-12);
  EXPECT_NEAR(c.zab, 1, 1e-12);
  EXPECT_NEAR(c.zac, 1, 1e-12);
  EXPECT_NEAR(c.zb, 0, 1e-12);
  EXPECT_NEAR(c.zc, 0, 1e-12);

  const auto k = correlators_from_state(biseparable_ceiling_state());
  EXPECT_NEAR(k.xxx, 1, 1e-12);
  EXPECT_NEAR(k.zab, 0.5, 1e-12);
  EXPECT_NEAR(k.zac, 0.5, 1e-12);
  EXPECT_NEAR(k.zb, 0, 1e-12);
  EXPECT_NEAR(k.zc, 0, 1e-12);

  const auto mixed = correlators_from_state(DensityMatrix::maximally_mixed(8));
  EXPECT_EQ(mixed, (CorrelatorSet{0, 0, 0, 0, 0}));
  EXPECT_THROW(correlators_from_state(DensityMatrix::maximally_mixed(4)), InputError);
}

TEST(Rate, KnownValues) {
  EXPECT_DOUBLE_EQ(bb84_rate(ghz_correlators()), 1.0);
  EXPECT_NEAR(bb84_rate(correlators_from_state(biseparable_ceiling_state())), kCeiling, 1e-12);
  EXPECT_NEAR(kCeiling, 0.188722, 1e-6);
  EXPECT_DOUBLE_EQ(bb84_rate({0, 0, 0, 0, 0}), -1.0);
  EXPECT_THROW(bb84_rate({1.5, 0, 0, 0, 0}), InputError);
}

TEST(Rate, SymmetricUnderSignFlips) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    const CorrelatorSet c{u(rng), u(rng), u(rng), u(rng), u(rng)};
    EXPECT_NEAR(bb84_rate(c), bb84_rate({-c.xxx, c.zab, c.zac, c.zb, c.zc}), 1e-12);
    EXPECT_NEAR(bb84_rate(c), bb84_rate({c.xxx, -c.zab, -c.zac, c.zb, c.zc}), 1e-12);
  }
}

TEST(Feasibility, KnownPoints) {
  EXPECT_FALSE(pen3_feasible(ghz_correlators()).feasible);
  const auto k = pen3_feasible(correlators_from_state(biseparable_ceiling_state()));
  EXPECT_TRUE(k.feasible);
  EXPECT_NEAR(k.combined_slack, 0.0, 1e-12);
  EXPECT_TRUE(pen3_feasible({0, 0, 0, 0, 0}).feasible);
}

TEST(Feasibility, HoldsForRandomTriangleNetworkStates) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    const auto c = correlators_from_state(random_pen3_state(rng));
    const auto f = pen3_feasible(c);
    EXPECT_TRUE(f.feasible) << "state " << t << ": inflation " << f.inflation_slack << ", combined "
                            << f.combined_slack;
    EXPECT_LE(bb84_rate(c), kCeiling + 1e-9);
  }
}

TEST(Ceiling, ReachesBiseparableValue) {
  const auto r = bb84_ceiling_search();
  EXPECT_NEAR(r.rate, 0.18872, 1e-5);
  EXPECT_NEAR(r.argmax.xxx, 1.0, 1e-6);
  EXPECT_NEAR(r.argmax.zab, 0.5, 1e-4);
  EXPECT_TRUE(pen3_feasible(r.argmax, 0.0).feasible);
}

TEST(Ceiling, NeverExceedsCeilingAtAnyResolution) {
  for (int res : {100, 137, 250, 400}) {
    CeilingOptions opt;
    opt.resolution = res;
    const auto r = bb84_ceiling_search(opt);
    EXPECT_LE(r.rate, kCeiling + 1e-6) << res;
    EXPECT_NEAR(r.rate, kCeiling, 1e-5) << res;
  }
}

TEST(Ceiling, MirroredRangeReachesSameValue) {
  CeilingOptions opt;
  opt.xxx_min = -1;
  opt.xxx_max = 0;
  opt.resolution = 200;
  const auto r = bb84_ceiling_search(opt);
  EXPECT_NEAR(r.rate, kCeiling, 1e-5);
  EXPECT_NEAR(r.argmax.xxx, -1.0, 1e-6);
}

TEST(Ceiling, RejectsBadOptions) {
  CeilingOptions low;
  low.resolution = 99;
  EXPECT_THROW(bb84_ceiling_search(low), InputError);
  CeilingOptions range;
  range.xxx_min = 0.5;
  range.xxx_max = 0.2;
  EXPECT_THROW(bb84_ceiling_search(range), InputError);
}
