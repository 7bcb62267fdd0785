// Copyright 2026 The InstaCluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "instacluster/specfile.hpp"

#include <gtest/gtest.h>

#include <random>

#include "instacluster/error.hpp"
#include "instacluster/simulation.hpp"
#include "invariants.hpp"

namespace insta {
namespace {

std::vector<SpecIssue> issues_of(const std::string& doc) {
  auto r = validate_spec(doc);
  if (auto* v = std::get_if<std::vector<SpecIssue>>(&r)) return *v;
  return {};
}

std::vector<std::string> paths_of(const std::string& doc) {
  std::vector<std::string> out;
  for (const auto& i : issues_of(doc)) out.push_back(i.path);
  return out;
}

TEST(SpecfileTest, MinimalDocumentTakesDefaults) {
  const auto r = validate_spec(R"({"version":1,"region":"us-east-1"})");
  ASSERT_TRUE(std::holds_alternative<ClusterSpec>(r));
  const ClusterSpec& s = std::get<ClusterSpec>(r);
  EXPECT_EQ(s.region, "us-east-1");
  EXPECT_EQ(s.slave_count, 0);
  EXPECT_EQ(s.master_instance_type, "c4.xlarge");
  EXPECT_EQ(s.slave_instance_type, "c4.xlarge");
  EXPECT_TRUE(s.services.empty());
  EXPECT_EQ(s.seed, 0u);
  EXPECT_FALSE(s.deactivate_key);
}

TEST(SpecfileTest, FullDocument) {
  const auto r = validate_spec(R"({
    "version": 1, "region": "eu-west-1", "master_instance_type": "m4.large",
    "slave_count": 4, "slave_instance_type": "r3.xlarge", "services": ["spark", "hue"],
    "config_overrides": {"spark.executor_memory": "4g"}, "seed": 18446744073709551615,
    "agent_on_master": true, "deactivate_key": true})");
  ASSERT_TRUE(std::holds_alternative<ClusterSpec>(r));
  const ClusterSpec& s = std::get<ClusterSpec>(r);
  EXPECT_EQ(s.slave_count, 4);
  EXPECT_EQ(s.services, (std::vector<std::string>{"spark", "hue"}));
  EXPECT_EQ(s.config_overrides.at("spark.executor_memory"), "4g");
  EXPECT_EQ(s.seed, 18446744073709551615ull);
  EXPECT_TRUE(s.agent_on_master);
}

TEST(SpecfileTest, NotAnObject) {
  EXPECT_EQ(paths_of("{oops"), (std::vector<std::string>{""}));
  EXPECT_EQ(paths_of("[1,2]"), (std::vector<std::string>{""}));
  EXPECT_EQ(paths_of(""), (std::vector<std::string>{""}));
}

TEST(SpecfileTest, RequiredFields) {
  EXPECT_EQ(paths_of("{}"), (std::vector<std::string>{".version", ".region"}));
  EXPECT_EQ(paths_of(R"({"version":2,"region":"r"})"), (std::vector<std::string>{".version"}));
  EXPECT_EQ(paths_of(R"({"version":"1","region":"r"})"), (std::vector<std::string>{".version"}));
  EXPECT_EQ(paths_of(R"({"version":1,"region":""})"), (std::vector<std::string>{".region"}));
}

TEST(SpecfileTest, UnknownFieldsRejected) {
  EXPECT_EQ(paths_of(R"({"version":1,"region":"r","slaves":3})"), (std::vector<std::string>{".slaves"}));
}

TEST(SpecfileTest, EveryViolationReportedWithPath) {
  const auto paths = paths_of(R"({"version":1,"region":"r","slave_count":-2,
      "services":["spark",7,"impala","spark"],"config_overrides":{"nodot":"x","spark.a":1,"impala.b":"c"},
      "seed":-1,"agent_on_master":"yes","deactivate_key":0,"master_instance_type":3})");
  const std::vector<std::string> want = {
      ".master_instance_type", ".slave_count", ".services[1]", ".services[2]", ".services[3]",
      ".config_overrides.impala.b", ".config_overrides.nodot", ".config_overrides.spark.a",
      ".seed", ".agent_on_master", ".deactivate_key"};
  EXPECT_EQ(paths, want);
}

TEST(SpecfileTest, SlaveCountBounds) {
  EXPECT_EQ(paths_of(R"({"version":1,"region":"r","slave_count":1.5})"), (std::vector<std::string>{".slave_count"}));
  EXPECT_EQ(paths_of(R"({"version":1,"region":"r","slave_count":10001})"), (std::vector<std::string>{".slave_count"}));
  EXPECT_TRUE(paths_of(R"({"version":1,"region":"r","slave_count":10000})").empty());
}

ClusterSpec random_spec(std::mt19937_64& rng) {
  const auto names = ServiceCatalog::standard().names();
  ClusterSpec s;
  s.region = "region-" + std::to_string(rng() % 100);
  s.master_instance_type = rng() % 2 ? "c4.xlarge" : "m4.2xlarge";
  s.slave_count = static_cast<int>(rng() % 50);
  s.slave_instance_type = rng() % 2 ? "c4.xlarge" : "r3.large";
  for (const auto& n : names) {
    if (rng() % 5 == 0) s.services.push_back(n);
  }
  for (int k = 0; k < static_cast<int>(rng() % 4); ++k) {
    s.config_overrides[names[rng() % names.size()] + ".p" + std::to_string(k)] = "v" + std::to_string(rng() % 1000);
  }
  s.seed = rng();
  s.agent_on_master = rng() % 2;
  s.deactivate_key = rng() % 2;
  return s;
}

TEST(SpecfileTest, DocumentRoundTripRandom) {
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 1000; ++i) {
    const ClusterSpec s = random_spec(rng);
    const auto r = validate_spec(to_document(s));
    ASSERT_TRUE(std::holds_alternative<ClusterSpec>(r)) << to_document(s);
    ASSERT_EQ(std::get<ClusterSpec>(r), s);
  }
}

TEST(SpecfileTest, ExportRequiresReadyCluster) {
  Simulation sim;
  sim.provision(testing::make_spec("us-east-1", 1));
  sim.stop("us-east-1");
  try {
    sim.export_spec("us-east-1");
    FAIL() << "export of a stopped cluster";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClusterNotReady);
  }
}

TEST(SpecfileTest, ExportReflectsLiveCluster) {
  Simulation sim(SimulationOptions{9});
  auto spec = testing::make_spec("us-east-1", 2, {"spark"}, 9);
  spec.slave_instance_type = "r3.large";
  spec.config_overrides = {{"spark.cores", "8"}};
  sim.provision(spec);
  sim.install("us-east-1", {"hue"});
  sim.extend("us-east-1", 1, std::nullopt);
  const ClusterSpec out = sim.export_spec("us-east-1");
  EXPECT_EQ(out.slave_count, 3);
  EXPECT_EQ(out.slave_instance_type, "r3.large");
  EXPECT_EQ(out.services, (std::vector<std::string>{"spark", "hue"}));
  EXPECT_EQ(out.config_overrides, spec.config_overrides);
  EXPECT_EQ(out.seed, 9u);
}

TEST(SpecfileTest, ReprovisionFromExportIsStateIdentical) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10; ++i) {
    ClusterSpec spec = testing::make_spec("us-west-2", static_cast<int>(rng() % 5), {"spark", "hue"}, rng());
    spec.agent_on_master = rng() % 2;
    spec.config_overrides = {{"spark.mem", std::to_string(rng() % 64) + "g"}};
    Simulation a(SimulationOptions{spec.seed});
    a.provision(spec);
    const std::string doc = to_document(a.export_spec("us-west-2"));
    const auto parsed = validate_spec(doc);
    ASSERT_TRUE(std::holds_alternative<ClusterSpec>(parsed));
    Simulation b(SimulationOptions{std::get<ClusterSpec>(parsed).seed});
    b.provision(std::get<ClusterSpec>(parsed));
    ASSERT_EQ(a.snapshot(), b.snapshot());
    ASSERT_EQ(a.trace().text(), b.trace().text());
  }
}

}  // namespace
}  // namespace insta
