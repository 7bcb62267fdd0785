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


#include "instacluster.h"

#include <gtest/gtest.h>

#include <string>

#include "json.hpp"

namespace {

using nlohmann::json;

std::string take(char* s) {
  std::string out = s == nullptr ? "" : s;
  ic_free(s);
  return out;
}

class CApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ic_world_options o{};
    o.seed = 3;
    ASSERT_EQ(ic_world_create(&o, &world_), IC_OK);
  }
  void TearDown() override { ic_world_destroy(world_); }

  ic_world* world_ = nullptr;
};

TEST(CApiBasicsTest, VersionAndNames) {
  EXPECT_STREQ(ic_version(), "1.0.0");
  EXPECT_STREQ(ic_status_name(IC_OK), "Ok");
  EXPECT_STREQ(ic_status_name(IC_ERR_CLUSTER_ALREADY_EXISTS), "ClusterAlreadyExists");
  EXPECT_STREQ(ic_status_name(IC_ERR_DISCOVERY_TIMEOUT), "DiscoveryTimeout");
  EXPECT_STREQ(ic_status_name(IC_ERR_INTERNAL), "Internal");
  EXPECT_STREQ(ic_status_name(-1), "Unknown");
  EXPECT_STREQ(ic_status_name(999), "Unknown");
}

TEST(CApiBasicsTest, NullArguments) {
  EXPECT_EQ(ic_world_create(nullptr, nullptr), IC_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ic_stop(nullptr, "r"), IC_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ic_validate_spec(nullptr, nullptr), IC_ERR_INVALID_ARGUMENT);
  ic_world_destroy(nullptr);
  ic_free(nullptr);
}

TEST(CApiBasicsTest, NullOptionsUseDefaults) {
  ic_world* w = nullptr;
  ASSERT_EQ(ic_world_create(nullptr, &w), IC_OK);
  EXPECT_EQ(ic_provision(w, R"({"version":1,"region":"us-east-1"})"), IC_OK);
  ic_world_destroy(w);
}

TEST(CApiBasicsTest, ValidateSpec) {
  char* issues = nullptr;
  EXPECT_EQ(ic_validate_spec(R"({"version":1,"region":"r"})", &issues), IC_OK);
  EXPECT_EQ(take(issues), "[]");
  EXPECT_EQ(ic_validate_spec(R"({"version":1,"region":"r","bogus":1})", &issues), IC_ERR_INVALID_SPEC);
  const json list = json::parse(take(issues));
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["path"], ".bogus");
  EXPECT_EQ(ic_validate_spec("nope", nullptr), IC_ERR_INVALID_SPEC);
}

TEST_F(CApiTest, LifecycleThroughTheCApi) {
  ASSERT_EQ(ic_provision(world_, R"({"version":1,"region":"us-east-1","slave_count":2,"services":["spark"]})"), IC_OK);
  EXPECT_STREQ(ic_last_error(world_), "");
  EXPECT_EQ(ic_provision(world_, R"({"version":1,"region":"us-east-1"})"), IC_ERR_CLUSTER_ALREADY_EXISTS);
  EXPECT_NE(std::string(ic_last_error(world_)).find("ClusterAlreadyExists"), std::string::npos);

  char* text = nullptr;
  ASSERT_EQ(ic_status_report(world_, "us-east-1", &text), IC_OK);
  EXPECT_NE(take(text).find("slave-2"), std::string::npos);

  ASSERT_EQ(ic_stop(world_, "us-east-1"), IC_OK);
  char* report = nullptr;
  ASSERT_EQ(ic_start(world_, "us-east-1", &report), IC_OK);
  const json r = json::parse(take(report));
  EXPECT_EQ(r["new_key_generation"], 2);
  EXPECT_EQ(r["hosts_files_rewritten"], 3);
  EXPECT_EQ(r["rebound"].size(), 3u);

  ASSERT_EQ(ic_extend(world_, "us-east-1", 1, nullptr), IC_OK);
  ASSERT_EQ(ic_install(world_, "us-east-1", "hue, hdfs"), IC_OK);
  EXPECT_EQ(ic_install(world_, "us-east-1", "impala"), IC_ERR_UNKNOWN_SERVICE);
  ASSERT_EQ(ic_advance_clock(world_, 25), IC_OK);
  EXPECT_EQ(ic_advance_clock(world_, -1), IC_ERR_INVALID_ARGUMENT);

  char* spec = nullptr;
  ASSERT_EQ(ic_export_spec(world_, "us-east-1", &spec), IC_OK);
  const json doc = json::parse(take(spec));
  EXPECT_EQ(doc["slave_count"], 3);
  EXPECT_EQ(doc["services"], json::array({"spark", "hue", "hdfs"}));

  char* trace = nullptr;
  ASSERT_EQ(ic_trace(world_, &trace), IC_OK);
  EXPECT_NE(take(trace).find("lifecycle.reconciled"), std::string::npos);
  char* snap = nullptr;
  ASSERT_EQ(ic_snapshot(world_, &snap), IC_OK);
  EXPECT_EQ(json::parse(take(snap))["clusters"][0]["phase"], "ready");
}

TEST_F(CApiTest, ErrorsCarryDistinctCodes) {
  EXPECT_EQ(ic_stop(world_, "us-east-1"), IC_ERR_NO_CLUSTER);
  EXPECT_EQ(ic_provision(world_, "{"), IC_ERR_INVALID_SPEC);
  EXPECT_EQ(ic_provision(world_, R"({"version":1,"region":"Bad Region"})"), IC_ERR_INVALID_REGION);
  EXPECT_EQ(ic_set_credentials(world_, "AKIDWHO", "x"), IC_OK);
  EXPECT_EQ(ic_provision(world_, R"({"version":1,"region":"us-east-1"})"), IC_ERR_INACTIVE_CREDENTIALS);
}

TEST_F(CApiTest, DeactivatedKeyStopsLaterCalls) {
  ASSERT_EQ(ic_provision(world_, R"({"version":1,"region":"us-east-1","slave_count":1,"deactivate_key":true})"), IC_OK);
  EXPECT_EQ(ic_stop(world_, "us-east-1"), IC_ERR_INACTIVE_CREDENTIALS);
}

TEST(CApiDeterminismTest, SameSeedSameTrace) {
  auto run = [](std::uint64_t seed) {
    ic_world_options o{};
    o.seed = seed;
    ic_world* w = nullptr;
    ic_world_create(&o, &w);
    ic_provision(w, R"({"version":1,"region":"us-east-1","slave_count":3})");
    ic_stop(w, "us-east-1");
    ic_start(w, "us-east-1", nullptr);
    char* t = nullptr;
    ic_trace(w, &t);
    ic_world_destroy(w);
    return take(t);
  };
  EXPECT_EQ(run(8), run(8));
  EXPECT_NE(run(8), run(9));
}

}  // namespace
