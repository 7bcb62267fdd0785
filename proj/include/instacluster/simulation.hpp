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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "instacluster/bootstrap.hpp"
#include "instacluster/host_sim.hpp"
#include "instacluster/lifecycle.hpp"
#include "instacluster/services.hpp"
#include "instacluster/sim_clock.hpp"
#include "instacluster/sim_provider.hpp"
#include "instacluster/specfile.hpp"
#include "instacluster/trace.hpp"
#include "json.hpp"

namespace insta {

struct SimulationOptions {
  std::uint64_t seed = 0;
  std::string access_key_id = "AKIDSIMULATOR";
  std::string secret_key = "simulator-secret";
  bool stable_ips = false;
  Seconds max_boot_delay = 0;
  Seconds heartbeat_interval = kHeartbeatInterval;
  std::string cluster_user = "ubuntu";
};

struct StatusRow {
  std::string hostname;
  std::string instance_id;
  std::string private_ip;
  std::string state;
  AgentHealth health;
};

struct StatusReport {
  std::string region;
  Phase phase = Phase::kDiscovering;
  int key_generation = 0;
  Seconds now = 0;
  std::vector<StatusRow> rows;
  std::optional<DeploymentPlan> plan;
};

std::string render_status(const StatusReport& report);

// One deterministic world: simulated provider, hosts, clock and trace, with
// the provisioning scripts wired into the hosts' boot path. Operator commands
// (provision, stop, start, extend, install) drive it from outside.
class Simulation final : private BootHandler {
 public:
  explicit Simulation(SimulationOptions options = {});
  ~Simulation() override;
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Credentials used by subsequent operator commands. Defaults to the
  // account registered at construction.
  void set_operator_credentials(Credentials creds) { operator_ = std::move(creds); }
  const Credentials& operator_credentials() const noexcept { return operator_; }

  // Launches slaves, then the master, and waits for the master's boot to
  // finish; then starts agents and installs the spec's services.
  ClusterState provision(const ClusterSpec& spec);
  void stop(const std::string& region);
  ReconcileReport start(const std::string& region);
  ClusterState extend(const std::string& region, int count, const std::optional<std::string>& instance_type);
  DeploymentPlan install(const std::string& region, const std::vector<std::string>& services,
                         const std::map<std::string, std::string>& overrides = {});

  // Advances time with heartbeats flowing in every ready cluster.
  void advance(Seconds duration);

  StatusReport status(const std::string& region) const;
  ClusterSpec export_spec(const std::string& region) const;

  // Full observable state, for deep comparisons.
  nlohmann::json snapshot() const;

  SimClock& clock() noexcept { return clock_; }
  Trace& trace() noexcept { return trace_; }
  SimProvider& provider() noexcept { return provider_; }
  HostFleet& hosts() noexcept { return hosts_; }
  ClusterRegistry& registry() noexcept { return registry_; }
  ServiceManager& services() noexcept { return services_; }
  Environment& env() noexcept { return env_; }
  const SimulationOptions& options() const noexcept { return options_; }

 private:
  void on_slave_boot(const std::string& host_id, const UserData& data) override;
  void on_master_boot(const std::string& host_id, const UserData& data) override;

  SimulationOptions options_;
  Credentials operator_;
  SimClock clock_;
  Trace trace_;
  SimProvider provider_;
  HostFleet hosts_;
  ClusterRegistry registry_;
  Environment env_;
  ServiceManager services_;
};

}  // namespace insta
