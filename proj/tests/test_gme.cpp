#include <gtest/gtest.h>

#include <random>

#include "penkey/gme.hpp"
#include "support.hpp"

using namespace penkey;
using namespace penkey::gme;
using namespace penkey::testing;

namespace {

double cut_entropy(const PenNetwork& net, const std::vector<EdgeIndex>& cut) {
  double s = 0;
  for (EdgeIndex e : cut) s += entanglement_entropy(*as_pure_state(net.edge(e).state)) * net.edge(e).multiplicity;
  return s;
}

// Every I-proper cut, as the edge set crossing a vertex bipartition.
std::vector<std::vector<EdgeIndex>> proper_cuts(const PenNetwork& net) {
  std::vector<std::vector<EdgeIndex>> out;
  const int n = net.n_vertices();
  for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
    const unsigned side = mask << 1;  // vertex 1 stays on the other side
    bool in = false, outside = false;
    for (Vertex s : net.seekers()) ((side >> (s - 1)) & 1u ? in : outside) = true;
    if (!in || !outside) continue;
    std::vector<EdgeIndex> cut;
    for (EdgeIndex e = 0; e < net.n_edges(); ++e)
      if (((side >> (net.edge(e).u - 1)) & 1u) != ((side >> (net.edge(e).v - 1)) & 1u)) cut.push_back(e);
    out.push_back(cut);
  }
  return out;
}

PenNetwork random_pure_network(std::mt19937_64& rng, int max_dim_log2) {
  while (true) {
    const int n = 2 + static_cast<int>(rng() % 3);
    std::vector<EdgeSpec> specs;
    int bits = 0;
    for (auto [u, v] : random_connected(n, 0.4, rng)) {
      const bool qutrit = rng() % 4 == 0;
      specs.push_back({u, v, state::Pure{random_probabilities(qutrit ? 3 : 2, rng)}});
      bits += qutrit ? 4 : 2;  // 9 <= 16
    }
    if (bits > max_dim_log2) continue;
    std::vector<Vertex> seekers;
    for (int v = 1; v <= n; ++v)
      if (v <= 2 || rng() % 2) seekers.push_back(v);
    return PenNetwork(n, specs, seekers);
  }
}

// Random pure product across a random I-proper bipartition, edge ordered.
CVector random_biseparable(const HilbertLayout& layout, const PenNetwork& net, std::mt19937_64& rng) {
  const auto parts = gme::detail::proper_bipartitions(net);
  const auto& in_s = parts[rng() % parts.size()];
  const auto& subs = layout.subsystems();
  std::size_t dim_s = 1, dim_t = 1;
  for (const auto& sub : subs) (in_s[static_cast<std::size_t>(sub.vertex)] ? dim_s : dim_t) *= sub.dim;
  const CVector a = gme::detail::haar_vector(dim_s, rng), b = gme::detail::haar_vector(dim_t, rng);
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
  return phi;
}

}  // namespace

TEST(SigmaStar, SingleBellEdgeIsDephasedBell) {
  const auto s = build_sigma_star(path(2), {0});
  ASSERT_TRUE(s.assembled);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  EXPECT_LT((s.assembled->matrix() - expected).norm(), 1e-12);
  EXPECT_EQ(s.support_rank(), 2u);
}

TEST(SigmaStar, TriangleCutAtVertexOne) {
  const auto net = triangle();
  const auto s = build_sigma_star(net, {0, 1});
  EXPECT_EQ(s.dim(), 64u);
  EXPECT_EQ(s.side, (std::vector<Vertex>{1}));
  ASSERT_TRUE(s.assembled);
  EXPECT_NEAR(s.assembled->matrix().trace().real(), 1.0, 1e-12);
  const DensityMatrix rho = network_density(s.layout);
  EXPECT_NEAR(relative_entropy(rho, *s.assembled), 2.0, 1e-9);
}

TEST(SigmaStar, RejectsInvalidCuts) {
  const auto net = path(3).with_seekers({1, 2});
  EXPECT_THROW(build_sigma_star(net, {1}), InputError);
  EXPECT_THROW(build_sigma_star(triangle(), {0}), InputError);
  EXPECT_THROW(build_sigma_star(triangle(), {7}), InputError);
}

TEST(SigmaStar, DivergenceEqualsCutEntropyForEveryProperCut) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    const auto net = random_pure_network(rng, 10);
    for (const auto& cut : proper_cuts(net)) {
      const auto s = build_sigma_star(net, cut);
      ASSERT_TRUE(s.assembled);
      const double d = relative_entropy(network_density(s.layout), *s.assembled);
      EXPECT_NEAR(d, cut_entropy(net, cut), 1e-8) << "network " << t;
      // Factored spectrum matches the assembled one.
      const auto spec = hermitian_spectrum(s.assembled->matrix());
      double mass = 0;
      for (Eigen::Index k = 0; k < spec.values.size(); ++k) mass += spec.values(k) > 1e-12 ? spec.values(k) : 0;
      EXPECT_NEAR(s.support_eigenvalues().sum(), mass, 1e-9);
    }
  }
}

TEST(MixtureDivergence, MatchesDenseRelativeEntropy) {
  std::mt19937_64 rng(23);
  const auto net = triangle();
  const auto s = build_sigma_star(net, {0, 1});
  const auto& layout = s.layout;
  const CVector psi = layout.network_state();
  const CVector coords = layout.contract(psi, s.factor_vectors);
  const auto lambda = s.support_eigenvalues();
  const DensityMatrix rho = network_density(layout);
  for (int t = 0; t < 30; ++t) {
    const CVector phi = random_biseparable(layout, net, rng);
    const CVector phi_v = layout.to_vertex_order(phi);
    for (double w : {0.0, 0.3, 0.5, 1.0}) {
      const CMatrix mix = w * s.assembled->matrix() + (1 - w) * phi_v * phi_v.adjoint();
      const double dense = relative_entropy(rho, DensityMatrix::trusted(mix));
      const double reduced = gme::detail::mixture_divergence(s, coords, lambda, phi, w);
      if (std::isinf(dense)) {
        EXPECT_TRUE(std::isinf(reduced)) << t << " w=" << w;
      } else {
        EXPECT_NEAR(reduced, dense, 1e-7) << t << " w=" << w;
      }
    }
  }
}

TEST(Identity, KnownNetworks) {
  const auto one = verify_gme_identity(path(2));
  EXPECT_NEAR(one.weakest_cut, 1.0, 1e-12);
  EXPECT_NEAR(one.relative_entropy, 1.0, 1e-9);
  EXPECT_TRUE(one.passed());

  const auto tri = verify_gme_identity(triangle());
  EXPECT_NEAR(tri.relative_entropy, 2.0, 1e-9);
  EXPECT_TRUE(tri.identity_holds);
  EXPECT_TRUE(tri.passed());
  EXPECT_GE(tri.min_sampled, 2.0 - 1e-8);
  EXPECT_EQ(tri.samples, 1000u);

  const auto weak = verify_gme_identity(path(3, state::Pure{{0.9, 0.1}}));
  EXPECT_NEAR(weak.weakest_cut, binary_entropy(0.1), 1e-12);
  EXPECT_NEAR(weak.relative_entropy, binary_entropy(0.1), 1e-8);
  EXPECT_TRUE(weak.passed());
}

TEST(Identity, SpectralRouteAboveAssemblyLimit) {
  const auto k4 = complete_graph(4);  // 2^12 amplitudes
  IdentityOptions opt;
  opt.samples = 100;
  const auto r = verify_gme_identity(k4, opt);
  EXPECT_EQ(r.method, "spectral");
  EXPECT_NEAR(r.relative_entropy, 3.0, 1e-9);
  EXPECT_TRUE(r.passed());
}

TEST(Identity, HoldsOnRandomNetworks) {
  std::mt19937_64 rng(29);
  IdentityOptions opt;
  opt.samples = 60;
  for (int t = 0; t < 20; ++t) {
    const auto net = random_pure_network(rng, 10);
    opt.seed = static_cast<std::uint64_t>(t);
    const auto r = verify_gme_identity(net, opt);
    EXPECT_TRUE(r.passed()) << "network " << t << ": D " << r.relative_entropy << " W " << r.weakest_cut;
  }
}

TEST(Derivative, AlongSigmaStarIsZero) {
  const auto s = build_sigma_star(triangle(), {0, 1});
  const CVector psi = s.layout.to_vertex_order(s.layout.network_state());
  const CMatrix sig = s.assembled->matrix();
  const double one_minus = one_minus_fprime_quadrature(s, psi, [&](const CVector& w) {
    return w.dot(sig * w).real();
  });
  EXPECT_NEAR(one_minus, 1.0, 1e-8);
}

TEST(Derivative, ClosedFormMatchesQuadratureAndIsBounded) {
  const auto r = directional_derivative_check(triangle(), 1000);
  EXPECT_TRUE(r.passed()) << (r.counterexamples.empty() ? "" : r.counterexamples.front());
  EXPECT_LE(r.max_abs_one_minus_fprime, 1.0 + 1e-9);
  EXPECT_LT(r.max_discrepancy, 1e-6);
  const auto p = directional_derivative_check(path(4), 200);
  EXPECT_TRUE(p.passed());
}

TEST(Derivative, RequiresMaximallyEntangledEdges) {
  EXPECT_THROW(directional_derivative_check(path(3, state::Pure{{0.9, 0.1}}), 1), LimitError);
}

TEST(TotalCorrelation, KnownValues) {
  const auto tri = total_correlation_check(triangle(), Partition{{{1}, {2}, {3}}, true});
  EXPECT_NEAR(tri.total_correlation, 3.0, 1e-9);
  EXPECT_TRUE(tri.passed());
  const auto edge = total_correlation_check(path(2), Partition{{{1}, {2}}, true});
  EXPECT_NEAR(edge.total_correlation, 1.0, 1e-9);
  const auto whole = total_correlation_check(triangle(), Partition{{{1, 2, 3}}, false});
  EXPECT_TRUE(whole.cross_edges.empty());
  EXPECT_NEAR(whole.total_correlation, 0.0, 1e-9);
  EXPECT_THROW(total_correlation_check(triangle(), Partition{{{1}, {2}}, true}), InputError);
  EXPECT_THROW(total_correlation_check(triangle(), Partition{{{1, 2}, {2, 3}}, true}), InputError);
}

TEST(TotalCorrelation, EveryPartitionOfLargerNetworks) {
  // Five-cycle with one weak edge and one qutrit edge: 2^8 * 9 outcomes.
  const std::vector<EdgeSpec> edges{{1, 2, state::Bell{}},
                                    {2, 3, state::Pure{{0.9, 0.1}}},
                                    {3, 4, state::Bell{}},
                                    {4, 5, state::Pure{{0.5, 0.3, 0.2}}},
                                    {5, 1, state::Bell{}}};
  const PenNetwork net(5, edges, {1, 2, 3, 4, 5});
  int checked = 0;
  all_set_partitions(5, [&](const std::vector<int>& a) {
    const int blocks = *std::max_element(a.begin(), a.end()) + 1;
    std::vector<std::vector<int>> assignment_blocks(static_cast<std::size_t>(blocks));
    for (int v = 0; v < 5; ++v) assignment_blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(v)])].push_back(v + 1);
    const auto r = total_correlation_check(net, Partition{assignment_blocks, true});
    EXPECT_TRUE(r.passed()) << r.total_correlation << " vs " << r.cross_entropy;
    ++checked;
  });
  EXPECT_EQ(checked, 52);

  // 2^10 dimensional Bell cycle with a doubled edge.
  std::vector<EdgeSpec> cyc{{1, 2, state::Bell{}, 2}, {2, 3, state::Bell{}}, {3, 4, state::Bell{}}, {4, 1, state::Bell{}}};
  const PenNetwork four(4, cyc, {1, 2, 3, 4});
  all_set_partitions(4, [&](const std::vector<int>& a) {
    const int blocks = *std::max_element(a.begin(), a.end()) + 1;
    std::vector<std::vector<int>> bl(static_cast<std::size_t>(blocks));
    for (int v = 0; v < 4; ++v) bl[static_cast<std::size_t>(a[static_cast<std::size_t>(v)])].push_back(v + 1);
    EXPECT_TRUE(total_correlation_check(four, Partition{bl, true}).passed());
  });
}

TEST(Limits, DimensionAndStateCaps) {
  std::vector<EdgeSpec> big{{1, 2, state::Bell{}, 7}};
  EXPECT_THROW(HilbertLayout(PenNetwork(2, big, {1, 2})), LimitError);
  EXPECT_NO_THROW(HilbertLayout(PenNetwork(2, {{1, 2, state::Bell{}, 6}}, {1, 2})));
  const PenNetwork over(2, {{1, 2, state::WeightOverride{1.0}}}, {1, 2});
  EXPECT_THROW(HilbertLayout{over}, LimitError);
  EXPECT_THROW(verify_gme_identity(PenNetwork(2, big, {1, 2})), LimitError);
}
