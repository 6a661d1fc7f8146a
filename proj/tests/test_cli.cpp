#include <gtest/gtest.h>

#include <sstream>

#include "penkey/cli.hpp"

using penkey::cli::Json;
using penkey::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(PENKEY_DATA_DIR) + "/" + name; }

Json structured(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("structured");
  const auto r = invoke(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return Json::parse(r.out);
}

const Json* find_bound(const Json& doc, const std::string& kind) {
  for (const auto& row : doc["bounds"])
    if (row["kind"] == kind) return &row;
  return nullptr;
}

}  // namespace

TEST(Cli, BoundsOnTriangle) {
  const Json doc = structured({"bounds", "--network", data("triangle.json")});
  ASSERT_TRUE(find_bound(doc, "weakest_cut"));
  EXPECT_EQ((*find_bound(doc, "weakest_cut"))["value"], 2.0);
  EXPECT_EQ((*find_bound(doc, "partition_pure"))["value"], 1.5);
  EXPECT_EQ((*find_bound(doc, "partition_pure"))["exact"], "3/2");
  EXPECT_EQ((*find_bound(doc, "devetak_winter"))["value"], 1.0);
  EXPECT_FALSE(find_bound(doc, "tree_exact"));

  const auto human = invoke({"bounds", "--network", data("triangle.json")});
  EXPECT_EQ(human.code, 0);
  EXPECT_NE(human.out.find("3/2"), std::string::npos);
  EXPECT_NE(human.out.find("tree_exact not applicable"), std::string::npos);
}

TEST(Cli, BoundsOnEightNodeAndTree) {
  const Json eight = structured({"bounds", "--network", data("eight_node.json")});
  EXPECT_EQ((*find_bound(eight, "weakest_cut"))["value"], 3.0);
  EXPECT_EQ((*find_bound(eight, "partition_pure"))["value"], 2.5);
  EXPECT_FALSE(find_bound(eight, "devetak_winter"));

  const Json tree = structured({"bounds", "--network", data("helper_tree.json")});
  ASSERT_TRUE(find_bound(tree, "tree_exact"));
  EXPECT_NEAR((*find_bound(tree, "tree_exact"))["value"].get<double>(),
              (*find_bound(tree, "partition_pure"))["value"].get<double>(), 1e-9);
}

TEST(Cli, SeekerOverride) {
  const Json doc = structured({"bounds", "--network", data("triangle.json"), "--seekers", "1,2"});
  EXPECT_EQ((*find_bound(doc, "weakest_cut"))["value"], 2.0);
  EXPECT_EQ((*find_bound(doc, "partition_pure"))["value"], 2.0);
}

TEST(Cli, SimulateReportsRateAndGap) {
  const Json two = structured({"simulate", "--network", data("triangle.json"), "--rounds", "2", "--audit-trials", "300"});
  EXPECT_EQ(two["conference_bits"], 3);
  EXPECT_DOUBLE_EQ(two["achieved_rate"].get<double>(), 1.5);
  EXPECT_NEAR(two["gap"].get<double>(), 0.0, 1e-12);
  EXPECT_TRUE(two["audit"]["passed"].get<bool>());
  const auto& keys = two["keys"];
  EXPECT_EQ(keys["1"], keys["2"]);
  EXPECT_EQ(keys["1"], keys["3"]);

  const Json one = structured({"simulate", "--network", data("triangle.json"), "--audit-trials", "100"});
  EXPECT_DOUBLE_EQ(one["achieved_rate"].get<double>(), 1.0);
  EXPECT_NEAR(one["gap"].get<double>(), 0.5, 1e-12);

  const Json path = structured({"simulate", "--network", data("path.json"), "--rounds", "5", "--audit-trials", "100"});
  EXPECT_DOUBLE_EQ(path["achieved_rate"].get<double>(), 1.0);
}

TEST(Cli, VerifyGme) {
  const Json doc = structured({"verify-gme", "--network", data("triangle.json"), "--samples", "200", "--trials", "200"});
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_NEAR(doc["identity"]["relative_entropy"].get<double>(), 2.0, 1e-9);
  EXPECT_EQ(doc["identity"]["result"], "no counterexample found");
  EXPECT_EQ(doc["total_correlation"]["partitions"], 5);
}

TEST(Cli, Bb84) {
  const Json ceiling = structured({"bb84", "--resolution", "200"});
  EXPECT_NEAR(ceiling["rate"].get<double>(), 0.18872, 1e-5);
  const Json ghz = structured({"bb84", "--correlators", "1,1,1,0,0"});
  EXPECT_EQ(ghz["flag"], "infeasible in PEN-3");
  EXPECT_DOUBLE_EQ(ghz["rate"].get<double>(), 1.0);
  const Json noise = structured({"bb84", "--correlators", "0,0,0,0,0"});
  EXPECT_TRUE(noise["no_key"].get<bool>());
  EXPECT_EQ(noise["flag"], "feasible in PEN-3");
  const auto human = invoke({"bb84", "--correlators", "1,1,1,0,0"});
  EXPECT_NE(human.out.find("infeasible in PEN-3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"bounds", "--network", data("missing.json")}).code, 1);
  EXPECT_EQ(invoke({"bounds"}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"bounds", "--network", data("triangle.json"), "--format", "xml"}).code, 1);
  EXPECT_EQ(invoke({"bounds", "--network", data("triangle.json"), "--seekers", "1,9"}).code, 1);
  EXPECT_EQ(invoke({"bb84", "--resolution", "10"}).code, 1);
  const auto limit = invoke({"simulate", "--network", data("mixed_pair.json")});
  EXPECT_EQ(limit.code, 2);
  EXPECT_NE(limit.err.find("limit"), std::string::npos);
  EXPECT_EQ(invoke({"verify-gme", "--network", data("mixed_pair.json")}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, StructuredOutputIsReproducible) {
  const std::vector<std::string> args{"simulate", "--network", data("eight_node.json"), "--seekers", "1,2,3,4,5,6,7,8",
                                      "--rounds", "2", "--audit-trials", "50", "--format", "structured"};
  const auto a = invoke(args), b = invoke(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto other = invoke({"simulate", "--network", data("triangle.json"), "--seed", "12345", "--audit-trials", "10",
                             "--format", "structured"});
  EXPECT_NE(other.out, invoke({"simulate", "--network", data("triangle.json"), "--audit-trials", "10", "--format",
                               "structured"}).out);
}

TEST(Cli, HexSeedMatchesDefault) {
  const auto hex = invoke({"simulate", "--network", data("triangle.json"), "--seed", "0x5EED", "--audit-trials", "10",
                           "--format", "structured"});
  const auto dflt = invoke({"simulate", "--network", data("triangle.json"), "--audit-trials", "10", "--format",
                            "structured"});
  EXPECT_EQ(hex.code, 0) << hex.err;
  EXPECT_EQ(hex.out, dflt.out);
}

TEST(Cli, ReportSkipsInapplicableSections) {
  const Json doc = structured({"report", "--network", data("mixed_pair.json")});
  EXPECT_TRUE(doc["simulate"].contains("skipped"));
  EXPECT_TRUE(doc["verify_gme"].contains("skipped"));
  EXPECT_FALSE(doc["bounds"].empty());
}
