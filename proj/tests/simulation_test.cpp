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


#include "instacluster/simulation.hpp"

#include <gtest/gtest.h>

#include "instacluster/error.hpp"
#include "invariants.hpp"

namespace insta {
namespace {

using testing::cluster_violations;
using testing::join;
using testing::make_spec;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

TEST(SimulationTest, OneClusterPerRegion) {
  Simulation sim;
  sim.provision(make_spec("us-east-1", 2));
  const auto instances = sim.provider().all_instances().size();
  EXPECT_EQ(code_of([&] { sim.provision(make_spec("us-east-1", 1)); }), ErrorCode::kClusterAlreadyExists);
  EXPECT_EQ(sim.provider().all_instances().size(), instances);
  EXPECT_EQ(sim.provision(make_spec("eu-west-1", 1)).phase, Phase::kReady);
  for (const auto* r : {"us-east-1", "eu-west-1"}) {
    const auto v = cluster_violations(sim, r);
    EXPECT_TRUE(v.empty()) << r << ": " << join(v);
  }
  // Clusters in different regions never share keys.
  EXPECT_NE(sim.registry().get("us-east-1").state.key.private_key,
            sim.registry().get("eu-west-1").state.key.private_key);
}

TEST(SimulationTest, StoppedClusterStillHoldsRegion) {
  Simulation sim;
  sim.provision(make_spec("us-east-1", 1));
  sim.stop("us-east-1");
  EXPECT_EQ(code_of([&] { sim.provision(make_spec("us-east-1", 1)); }), ErrorCode::kClusterAlreadyExists);
}

TEST(SimulationTest, ProvisionRejectsBadSpecs) {
  Simulation sim;
  auto s = make_spec("us-east-1", 1, {"impala"});
  EXPECT_EQ(code_of([&] { sim.provision(s); }), ErrorCode::kUnknownService);
  EXPECT_EQ(code_of([&] { sim.provision(make_spec("us-east-1", -1)); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(code_of([&] { sim.provision(make_spec("Bad Region", 1)); }), ErrorCode::kInvalidRegion);
  EXPECT_TRUE(sim.provider().all_instances().empty());
}

TEST(SimulationTest, StatusReportsEveryHost) {
  Simulation sim;
  sim.provision(make_spec("us-east-1", 2, {"hue"}));
  sim.advance(20);
  const StatusReport r = sim.status("us-east-1");
  EXPECT_EQ(r.phase, Phase::kReady);
  EXPECT_EQ(r.key_generation, 1);
  EXPECT_EQ(r.now, 20);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].hostname, "master");
  EXPECT_EQ(r.rows[1].hostname, "slave-1");
  EXPECT_EQ(r.rows[2].hostname, "slave-2");
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.state, "running");
    EXPECT_EQ(row.health.status, HealthStatus::kHealthy);
    EXPECT_EQ(row.health.last_seen, 20);
    EXPECT_EQ(row.private_ip, sim.provider().inspect(row.instance_id)->private_ip);
  }
  const std::string text = render_status(r);
  EXPECT_EQ(text.rfind("cluster us-east-1 phase=ready key_generation=1 t=20\n", 0), 0u);
  EXPECT_NE(text.find("hue/hue-webui:8808 -> master"), std::string::npos);
}

TEST(SimulationTest, StoppedHostsGoStale) {
  Simulation sim;
  const auto st = sim.provision(make_spec("us-east-1", 2));
  const auto victim = st.hostname_map.slave_ids().back();
  sim.provider().stop_instance(sim.operator_credentials(), victim);
  sim.advance(30);
  EXPECT_EQ(sim.status("us-east-1").rows[2].health.status, HealthStatus::kHealthy);
  sim.advance(1);
  const auto r = sim.status("us-east-1");
  EXPECT_EQ(r.rows[2].health.status, HealthStatus::kStale);
  EXPECT_EQ(r.rows[2].state, "stopped");
  EXPECT_EQ(r.rows[1].health.status, HealthStatus::kHealthy);
}

TEST(SimulationTest, AgentOnMaster) {
  Simulation sim;
  auto spec = make_spec("us-east-1", 1);
  spec.agent_on_master = true;
  const auto st = sim.provision(spec);
  const HostState m = sim.hosts().inspect(st.hostname_map.master_id);
  EXPECT_TRUE(m.daemons.contains(kAgentComponent));
  EXPECT_TRUE(m.daemons.contains(kServerComponent));
}

TEST(SimulationTest, SameSeedSameWorld) {
  auto run = [](std::uint64_t seed) {
    Simulation sim(SimulationOptions{seed});
    sim.provision(make_spec("us-east-1", 3, {"spark"}, seed));
    sim.stop("us-east-1");
    sim.start("us-east-1");
    sim.extend("us-east-1", 2, std::nullopt);
    sim.advance(40);
    return std::make_pair(sim.trace().text(), sim.snapshot());
  };
  const auto a = run(5);
  const auto b = run(5);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(run(6).first, a.first);
}

TEST(SimulationTest, SeededBootDelaysStillConverge) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimulationOptions o;
    o.seed = seed;
    o.max_boot_delay = 90;
    Simulation sim(o);
    sim.provision(make_spec("us-east-1", 4, {}, seed));
    auto v = cluster_violations(sim, "us-east-1");
    ASSERT_TRUE(v.empty()) << join(v);
    sim.stop("us-east-1");
    sim.start("us-east-1");
    v = cluster_violations(sim, "us-east-1");
    ASSERT_TRUE(v.empty()) << join(v);
  }
}

TEST(SimulationTest, CustomClusterUser) {
  SimulationOptions o;
  o.cluster_user = "hadoop";
  Simulation sim(o);
  const auto st = sim.provision(make_spec("us-east-1", 1));
  const HostState s = sim.hosts().inspect(st.hostname_map.slave_ids().front());
  EXPECT_TRUE(s.users.contains("hadoop"));
  EXPECT_FALSE(s.users.contains("ubuntu"));
  const auto v = cluster_violations(sim, "us-east-1");
  EXPECT_TRUE(v.empty()) << join(v);
}

TEST(SimulationTest, SnapshotCoversAllLayers) {
  Simulation sim;
  sim.provision(make_spec("us-east-1", 1, {"hue"}));
  const auto snap = sim.snapshot();
  EXPECT_EQ(snap["instances"].size(), 2u);
  EXPECT_EQ(snap["hosts"].size(), 2u);
  ASSERT_EQ(snap["clusters"].size(), 1u);
  EXPECT_EQ(snap["clusters"][0]["phase"], "ready");
  EXPECT_EQ(snap["clusters"][0]["server"]["services"], nlohmann::json::array({"hue"}));
  EXPECT_TRUE(snap["operator_key_active"].get<bool>());
}

}  // namespace
}  // namespace insta
