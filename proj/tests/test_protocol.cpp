#include <gtest/gtest.h>

#include "penkey/protocol.hpp"
#include "support.hpp"

using namespace penkey;
using namespace penkey::testing;

namespace {

std::vector<KeyTranscript> many_runs(const PenNetwork& net, const TreePacking& p, std::size_t n) {
  std::vector<KeyTranscript> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(simulate_conference_key(net, p, CounterRng::mix(i)));
  return out;
}

}  // namespace

TEST(Protocol, TriangleTwoRoundsGivesThreeBits) {
  const auto p = pack_trees_integer(triangle(), 2);
  const auto tr = simulate_conference_key(triangle(), p, kDefaultSeed);
  ASSERT_EQ(tr.conference_keys.size(), 3u);
  for (const auto& [s, key] : tr.conference_keys) EXPECT_EQ(key, tr.conference_keys.at(1)) << s;
  EXPECT_EQ(tr.conference_keys.at(1).size(), 3u);
  // Each tree on three vertices needs two announcements.
  EXPECT_EQ(tr.announcements.size(), 6u);
  EXPECT_TRUE(audit_secrecy(tr).passed());
}

TEST(Protocol, DeterministicInSeed) {
  const auto p = pack_trees_integer(complete_graph(4), 3);
  EXPECT_EQ(simulate_conference_key(complete_graph(4), p, 7), simulate_conference_key(complete_graph(4), p, 7));
  EXPECT_NE(simulate_conference_key(complete_graph(4), p, 7).conference_keys,
            simulate_conference_key(complete_graph(4), p, 8).conference_keys);
}

TEST(Protocol, HelpersRelayWithoutLearningAnything) {
  const auto net = helper_tree();
  const auto p = pack_trees_integer(net, 4);
  const auto tr = simulate_conference_key(net, p, 11);
  EXPECT_EQ(tr.conference_keys.size(), 4u);
  EXPECT_TRUE(audit_secrecy(tr).passed());
  const auto runs = many_runs(net, p, 2000);
  const auto audit = audit_secrecy(runs);
  EXPECT_TRUE(audit.passed()) << audit.max_abs_correlation;
}

TEST(Protocol, ReusedPadIsDetected) {
  const auto p = pack_trees_integer(triangle(), 2);
  auto tr = simulate_conference_key(triangle(), p, 3);
  tr.announcements[1].pad = tr.announcements[0].pad;
  const auto audit = audit_secrecy(tr);
  EXPECT_FALSE(audit.pads_single_use);
  EXPECT_FALSE(audit.passed());
  ASSERT_FALSE(audit.violations.empty());
  EXPECT_NE(audit.violations.front().find("pads more than one"), std::string::npos);
}

TEST(Protocol, AnnouncingTheKeyBitIsDetected) {
  const auto p = pack_trees_integer(triangle(), 2);
  auto runs = many_runs(triangle(), p, 10000);
  for (auto& tr : runs) {
    // Leak: the first announcement of tree 0 carries the raw key bit.
    tr.announcements[0].bit = tr.conference_keys.begin()->second[0];
  }
  const auto audit = audit_secrecy(runs);
  ASSERT_TRUE(audit.uncorrelated.has_value());
  EXPECT_FALSE(*audit.uncorrelated);
  EXPECT_NEAR(audit.max_abs_correlation, 1.0, 1e-12);
}

TEST(Protocol, SeekersAgreeOverManySeeds) {
  const auto p = pack_trees_integer(complete_graph(4), 2);
  const auto runs = many_runs(complete_graph(4), p, 10000);
  const auto audit = audit_secrecy(runs);
  EXPECT_TRUE(audit.seekers_agree);
  EXPECT_TRUE(audit.pads_single_use);
  EXPECT_TRUE(audit.passed()) << audit.max_abs_correlation << " vs " << audit.threshold;
}

TEST(Protocol, KeyBitsAreBalanced) {
  const auto p = pack_trees_integer(triangle(), 2);
  int ones = 0, total = 0;
  for (const auto& tr : many_runs(triangle(), p, 4000)) {
    for (auto b : tr.conference_keys.at(1)) ones += b;
    total += static_cast<int>(tr.conference_keys.at(1).size());
  }
  // 4 sigma around one half.
  EXPECT_NEAR(static_cast<double>(ones) / total, 0.5, 4 * 0.5 / std::sqrt(total));
}

TEST(Protocol, RejectsNonBellEdgesAndFractionalPackings) {
  const auto pure = path(3, state::Pure{{0.9, 0.1}});
  EXPECT_THROW(simulate_conference_key(pure, pack_trees_integer(pure, 1), 1), LimitError);
  const auto frac = pack_trees_fractional(triangle(), default_weights(triangle()));
  EXPECT_THROW(simulate_conference_key(triangle(), frac, 1), InputError);
}

TEST(Protocol, BitsToHex) {
  EXPECT_EQ(bits_to_hex({1, 0, 1, 0}), "a");
  EXPECT_EQ(bits_to_hex({1, 1, 1, 1, 0, 0, 0, 1}), "f1");
  EXPECT_EQ(bits_to_hex({}), "");
  EXPECT_EQ(bits_to_hex({1}), "8");
}
