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

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "instacluster/bootstrap.hpp"
#include "instacluster/error.hpp"

namespace insta {

inline constexpr int kServerPort = 8080;
inline constexpr Seconds kHeartbeatInterval = 10;
inline constexpr int kStaleAfterBeats = 3;
inline constexpr int kWireVersion = 1;

enum class Placement { kMasterOnly, kAllSlaves, kAny };
std::string_view to_string(Placement p) noexcept;

struct ServiceComponent {
  std::string name;
  std::optional<int> port;
  bool operator==(const ServiceComponent&) const = default;
};

struct ServiceDescriptor {
  std::string name;
  std::vector<ServiceComponent> components;
  Placement placement = Placement::kAny;
  bool operator==(const ServiceDescriptor&) const = default;
};

class ServiceCatalog {
 public:
  explicit ServiceCatalog(std::vector<ServiceDescriptor> entries);

  // Spark and Hue with their ports, plus name-only entries for the rest of
  // the Hadoop stack.
  static const ServiceCatalog& standard();

  const ServiceDescriptor* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<ServiceDescriptor> entries_;
};

struct ComponentAssignment {
  std::string service;
  std::string component;
  std::vector<std::string> hosts;
  std::optional<int> port;
  bool operator==(const ComponentAssignment&) const = default;
};

struct DeploymentPlan {
  std::vector<std::string> services;
  std::map<std::string, std::vector<std::string>> service_hosts;  // service -> hostnames
  std::vector<ComponentAssignment> components;

  // Service components placed on `hostname`.
  std::set<std::string> components_on(const std::string& hostname) const;
  // component -> port, for components that have one.
  std::map<std::string, int> ports() const;
  bool operator==(const DeploymentPlan&) const = default;
};

// Placement: master_only on the master, all_slaves on every slave, any on the
// lowest-indexed slave (the master when there are none). Ports come straight
// from the catalog; a repeated port, or one colliding with the server's,
// throws PortConflict. Unknown names throw UnknownService.
DeploymentPlan suggest_configuration(const std::vector<std::string>& services, const ClusterState& cluster,
                                     const ServiceCatalog& catalog = ServiceCatalog::standard());

// ---- wire messages --------------------------------------------------------

struct Heartbeat {
  std::string agent_host;
  Seconds timestamp = 0;
  std::set<std::string> running_components;
  bool operator==(const Heartbeat&) const = default;
};

enum class Action { kInstall, kConfigure, kStart, kStop };
std::string_view to_string(Action a) noexcept;

struct ActionMessage {
  Action action = Action::kInstall;
  std::string service;
  std::vector<std::string> target_hosts;
  std::map<std::string, std::string> params;
  bool operator==(const ActionMessage&) const = default;
};

// One-line JSON carrying "v" and "type" alongside the fields above. Parsing
// throws InvalidMessage on a wrong version, type or shape.
std::string to_wire(const Heartbeat& hb);
std::string to_wire(const ActionMessage& msg);
Heartbeat heartbeat_from_wire(std::string_view text);
ActionMessage action_from_wire(std::string_view text);

// ---- health ---------------------------------------------------------------

enum class HealthStatus { kHealthy, kStale };
std::string_view to_string(HealthStatus s) noexcept;

struct AgentHealth {
  std::string hostname;
  std::optional<Seconds> last_seen;
  HealthStatus status = HealthStatus::kStale;
  bool operator==(const AgentHealth&) const = default;
};

// Stale iff never seen or now - last_seen > kStaleAfterBeats * interval.
bool is_stale(Seconds now, std::optional<Seconds> last_seen, Seconds interval);

// The server half of the agent/server pair: tracks the latest heartbeat per
// agent. last_seen never moves backwards.
class HeartbeatMonitor {
 public:
  explicit HeartbeatMonitor(Seconds interval = kHeartbeatInterval) : interval_(interval) {}

  void receive(const Heartbeat& hb);
  AgentHealth health(const std::string& hostname, Seconds now) const;
  std::optional<Seconds> last_seen(const std::string& hostname) const;
  const std::map<std::string, Seconds>& all_last_seen() const noexcept { return last_seen_; }
  Seconds interval() const noexcept { return interval_; }

 private:
  Seconds interval_;
  std::map<std::string, Seconds> last_seen_;
};

struct ActionResult {
  ErrorCode code = ErrorCode::kOk;
  std::string message;
  bool ok() const noexcept { return code == ErrorCode::kOk; }
  bool operator==(const ActionResult&) const = default;
};

// Provisioning servers for every cluster in an environment. Each server runs
// on its cluster's master, reaches slaves over the cluster key and counts its
// own host as a monitored member.
class ServiceManager {
 public:
  struct ServerState {
    HeartbeatMonitor monitor;
    std::vector<std::string> services;
    std::map<std::string, std::string> overrides;  // "<service>.<param>" -> value
    std::optional<DeploymentPlan> plan;
  };

  explicit ServiceManager(Environment& env, Seconds heartbeat_interval = kHeartbeatInterval,
                          const ServiceCatalog& catalog = ServiceCatalog::standard());

  const ServiceCatalog& catalog() const noexcept { return catalog_; }
  Seconds heartbeat_interval() const noexcept { return interval_; }

  // Starts the agents that are installed on the cluster's hosts, collects a
  // heartbeat round and brings installed services back to the plan.
  void attach(const std::string& region);

  // One heartbeat from the agent on `instance_id` at the current time.
  // Throws ServerUnreachable when the master's server is down.
  Heartbeat agent_tick(const std::string& instance_id);

  // Every running agent in the cluster beats once, plus the server itself.
  void heartbeat_round(const std::string& region);

  // Advances the clock in heartbeat-interval steps, beating after each.
  void run_for(const std::string& region, Seconds duration);

  std::vector<AgentHealth> health(const std::string& region) const;

  std::map<std::string, ActionResult> submit_action(const std::string& region, const ActionMessage& msg);

  // Adds `services` to the cluster's plan and installs, configures and starts
  // them. Throws the first per-host error, if any.
  DeploymentPlan install_services(const std::string& region, const std::vector<std::string>& services,
                                  const std::map<std::string, std::string>& overrides = {});

  std::optional<ServerState> server(const std::string& region) const;

 private:
  ServerState& server_locked(const std::string& region);
  void converge(const std::string& region);
  RemoteSession admin_session(const ClusterState& cluster, const std::string& instance_id);

  Environment& env_;
  Seconds interval_;
  const ServiceCatalog& catalog_;
  mutable std::mutex mu_;
  std::map<std::string, ServerState> servers_;
};

}  // namespace insta
