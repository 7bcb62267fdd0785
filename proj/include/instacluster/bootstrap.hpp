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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "instacluster/host_sim.hpp"
#include "instacluster/keys.hpp"
#include "instacluster/provider.hpp"
#include "instacluster/sim_clock.hpp"
#include "instacluster/trace.hpp"

namespace insta {

inline constexpr char kTempUser[] = "tmpuser";
inline constexpr char kMasterHostname[] = "master";
inline constexpr char kNameTag[] = "Name";
inline constexpr char kDefaultImage[] = "ami-instacluster";
inline constexpr Seconds kDiscoveryPollInterval = 5;
inline constexpr Seconds kDiscoveryTimeout = 300;

struct MasterConfig {
  std::string access_key_id;
  std::string secret_key;
  std::string region;
  bool deactivate_key_after_discovery = false;
  int expected_slave_count = 0;
  std::uint64_t seed = 0;
  bool agent_on_master = false;
  Seconds poll_interval = kDiscoveryPollInterval;
  Seconds discovery_timeout = kDiscoveryTimeout;

  Credentials credentials() const { return {access_key_id, secret_key}; }
  static MasterConfig from_user_data(const UserData& data);
  bool operator==(const MasterConfig&) const = default;
};

// instance id -> hostname. The master is always "master"; slaves are
// "slave-<k>" for k >= 1.
struct HostnameMap {
  std::map<std::string, std::string> bindings;
  std::string master_id;

  // (instance id, hostname): master first, then slaves by index.
  std::vector<std::pair<std::string, std::string>> ordered() const;
  std::vector<std::string> slave_ids() const;
  std::optional<std::string> instance_for(const std::string& hostname) const;
  bool operator==(const HostnameMap&) const = default;
};

// Index k of "slave-k", or nullopt for anything else.
std::optional<int> slave_index(const std::string& hostname);
std::string slave_hostname(int index);

enum class Phase { kDiscovering, kConfiguring, kReady, kStopped, kFailed };
std::string_view to_string(Phase phase) noexcept;

struct ClusterState {
  std::string region;
  HostnameMap hostname_map;
  KeyPair key;
  Phase phase = Phase::kDiscovering;
  std::map<std::string, std::string> ip_table;  // instance id -> private ip
  std::vector<std::string> failures;            // per-slave errors of the last run

  bool operator==(const ClusterState&) const = default;
};

struct Rebinding {
  std::string instance_id;
  std::string old_ip;
  std::string new_ip;
  bool operator==(const Rebinding&) const = default;
};

struct ReconcileReport {
  std::vector<Rebinding> rebound;
  int new_key_generation = 0;
  int hosts_files_rewritten = 0;
  bool operator==(const ReconcileReport&) const = default;
};

// Region -> the master's view of its cluster. Holding a record in a live phase
// is what "one cluster per region" means.
class ClusterRegistry {
 public:
  struct Record {
    ClusterState state;
    MasterConfig config;
    bool ever_ready = false;
    std::optional<ReconcileReport> last_report;
  };

  // Marks the cluster busy for the lifetime of the lease.
  class Lease {
   public:
    Lease(Lease&& other) noexcept : registry_(other.registry_), region_(std::move(other.region_)) {
      other.registry_ = nullptr;
    }
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    Lease& operator=(Lease&&) = delete;
    ~Lease();

   private:
    friend class ClusterRegistry;
    Lease(ClusterRegistry* registry, std::string region)
        : registry_(registry), region_(std::move(region)) {}
    ClusterRegistry* registry_;
    std::string region_;
  };

  // Registers `master_id` as the owner of `region`. Throws ClusterAlreadyExists
  // if a different, non-failed cluster holds it or this master already
  // provisioned it.
  void claim(const std::string& region, const std::string& master_id, const MasterConfig& config);

  // Throws NoCluster / BusyCluster.
  Lease acquire(const std::string& region);

  std::optional<Record> find(const std::string& region) const;
  Record get(const std::string& region) const;  // throws NoCluster
  std::optional<std::string> region_of_master(const std::string& master_id) const;
  std::optional<std::string> region_of_instance(const std::string& instance_id) const;
  std::vector<std::string> regions() const;

  void update_state(const std::string& region, const ClusterState& state);
  void set_phase(const std::string& region, Phase phase);
  void set_report(const std::string& region, const ReconcileReport& report);
  void set_expected_slaves(const std::string& region, int count);

 private:
  mutable std::mutex mu_;
  std::map<std::string, Record> records_;
  std::set<std::string> busy_;
};

// The pieces a provisioning script can reach from inside an instance.
struct Environment {
  Provider& provider;
  HostFleet& hosts;
  SimClock& clock;
  ClusterRegistry& registry;
  Trace& trace;
  std::string image_id = kDefaultImage;
};

// Running instances in `region` built from `image_id`, excluding `self_id`,
// sorted by launch_seq.
std::vector<Instance> discover_slaves(Provider& provider, const Credentials& creds,
                                      const std::string& region, const std::string& self_id,
                                      const std::string& image_id = kDefaultImage);

// instance id -> Name tag value, for instances that carry one.
std::map<std::string, std::string> name_tags(const std::vector<Instance>& instances);

// Binds master and slaves to hostnames. Slaves whose prior tag is a
// "slave-<k>" name keep it; the rest take the lowest free indices in launch
// order. Throws DuplicateTagHostname if two instances claim one name or a
// slave claims "master".
HostnameMap assign_hostnames(const std::string& self_id, const std::vector<Instance>& slaves,
                             const std::optional<std::map<std::string, std::string>>& prior_tags);

std::vector<HostsEntry> hosts_entries(const HostnameMap& map,
                                      const std::map<std::string, std::string>& ip_table);

// Throws MissingIp if any bound instance has no address in `ip_table`.
std::string render_hosts_file(const HostnameMap& map, const std::map<std::string, std::string>& ip_table);

// Per-cluster key seed: different regions never share keys.
std::uint64_t cluster_key_seed(std::uint64_t seed, const std::string& region);

// First-boot script on a slave: temporary password user plus the agent
// package. Safe to run again on a host that already ran it.
void slave_init(HostFleet& hosts, const std::string& host_id, const UserData& data);

// First-boot script on the master. Discovers slaves, names them, hands out
// the cluster key over the temporary-user path, writes hosts files, tags
// instances, optionally deactivates the access key and starts the server.
ClusterState master_init(Environment& env, const std::string& host_id, const MasterConfig& config);

// Polls discovery every config.poll_interval until at least `expected` slaves
// run; throws DiscoveryTimeout once config.discovery_timeout has elapsed.
std::vector<Instance> await_slaves(Environment& env, const std::string& self_id,
                                   const MasterConfig& config, int expected);

// The descriptor of `instance_id` as seen with the master's credentials.
Instance describe_instance(Environment& env, const MasterConfig& config, const std::string& instance_id);

// Opens an administrative session on a slave: the temporary user's password
// first, then the cluster user with each of `private_keys`. Throws the last
// authentication error if nothing works.
RemoteSession open_slave_session(HostFleet& hosts, const std::string& host_id,
                                 const std::string& password,
                                 const std::vector<std::string>& private_keys);

// Brings one host in line with the cluster: authorizes `key` for the cluster
// user (revoking `revoke_public` if given), sets the hostname, writes the
// hosts file and removes the temporary user if it is still there.
void configure_cluster_host(HostFleet& hosts, const RemoteSession& session,
                            const std::string& hostname, const KeyPair& key,
                            const std::optional<std::string>& revoke_public,
                            const std::vector<HostsEntry>& entries);

}  // namespace insta
