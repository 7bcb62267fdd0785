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

#include "instacluster/lifecycle.hpp"

#include <algorithm>

#include "instacluster/error.hpp"

namespace insta {
namespace {

std::map<std::string, InstanceState> instance_states(Environment& env, const std::string& region,
                                                     const Credentials& creds) {
  InstanceFilter filter;
  filter.region = region;
  std::map<std::string, InstanceState> out;
  for (const auto& i : env.provider.describe_instances(creds, filter)) out[i.id] = i.state;
  return out;
}

// Cluster members, slaves by index and the master last.
std::vector<std::string> stop_order(const HostnameMap& map) {
  auto ids = map.slave_ids();
  ids.push_back(map.master_id);
  return ids;
}

void stop_members(Environment& env, const ClusterRegistry::Record& rec, const Credentials& creds) {
  const auto states = instance_states(env, rec.state.region, creds);
  for (const auto& id : stop_order(rec.state.hostname_map)) {
    auto it = states.find(id);
    if (it != states.end() && it->second == InstanceState::kRunning) env.provider.stop_instance(creds, id);
  }
  env.registry.set_phase(rec.state.region, Phase::kStopped);
  env.trace.record("lifecycle.stopped", {{"region", rec.state.region}});
}

void raise_boot_error(const HostState& host) {
  if (host.boot_error) throw Error(*host.boot_error, host.boot_error_message);
}

ReconcileReport start_members(Environment& env, const std::string& region, const Credentials& creds) {
  const auto rec = env.registry.get(region);
  const auto states = instance_states(env, region, creds);
  const auto& map = rec.state.hostname_map;
  for (const auto& id : map.slave_ids()) {
    auto it = states.find(id);
    if (it != states.end() && it->second == InstanceState::kStopped) env.provider.start_instance(creds, id);
  }
  auto master = states.find(map.master_id);
  if (master != states.end() && master->second == InstanceState::kStopped) {
    env.provider.start_instance(creds, map.master_id);
    env.clock.run_until_idle();
    raise_boot_error(env.hosts.inspect(map.master_id));
  } else {
    env.clock.run_until_idle();
    reconcile_on_restart(env, map.master_id, rec.config);
  }
  auto after = env.registry.get(region);
  if (!after.last_report) throw Error(ErrorCode::kInternal, "reconcile left no report");
  return *after.last_report;
}

}  // namespace

void stop_cluster(Environment& env, const std::string& region, const Credentials& creds) {
  auto lease = env.registry.acquire(region);
  const auto rec = env.registry.get(region);
  if (rec.state.phase == Phase::kStopped) return;
  if (rec.state.phase != Phase::kReady && rec.state.phase != Phase::kFailed) {
    throw Error(ErrorCode::kClusterNotReady, std::string(to_string(rec.state.phase)));
  }
  stop_members(env, rec, creds);
}

ReconcileReport start_cluster(Environment& env, const std::string& region, const Credentials& creds) {
  auto lease = env.registry.acquire(region);
  const auto rec = env.registry.get(region);
  if (!rec.ever_ready) throw Error(ErrorCode::kClusterNotReady, "cluster was never provisioned");
  return start_members(env, region, creds);
}

ReconcileReport reconcile_on_restart(Environment& env, const std::string& master_id,
                                     const MasterConfig& config) {
  const auto rec = env.registry.get(config.region);
  const ClusterState prior = rec.state;
  env.trace.record("lifecycle.reconcile", {{"id", master_id}, {"region", config.region}});
  env.registry.set_phase(config.region, Phase::kDiscovering);
  try {
    const int expected = std::max({config.expected_slave_count, rec.config.expected_slave_count,
                                   static_cast<int>(prior.hostname_map.slave_ids().size())});
    const auto slaves = await_slaves(env, master_id, config, expected);
    const Instance self = describe_instance(env, config, master_id);

    ClusterState next;
    next.region = config.region;
    next.hostname_map = assign_hostnames(master_id, slaves, name_tags(slaves));
    next.ip_table[master_id] = self.private_ip;
    for (const auto& s : slaves) next.ip_table[s.id] = s.private_ip;
    next.key = generate_keypair(cluster_key_seed(config.seed, config.region), prior.key.generation + 1);
    next.phase = Phase::kConfiguring;
    env.registry.set_phase(config.region, Phase::kConfiguring);

    const auto entries = hosts_entries(next.hostname_map, next.ip_table);
    const std::vector<std::string> keys = {prior.key.private_key, next.key.private_key};
    int rewritten = 0;
    for (const auto& slave_id : next.hostname_map.slave_ids()) {
      const std::string& name = next.hostname_map.bindings.at(slave_id);
      try {
        const RemoteSession s = open_slave_session(env.hosts, slave_id, config.access_key_id, keys);
        configure_cluster_host(env.hosts, s, name, next.key, prior.key.public_key, entries);
        ++rewritten;
      } catch (const Error& e) {
        next.failures.push_back(name + ":" + std::string(error_name(e.code())));
      }
    }
    if (!next.failures.empty()) {
      std::string detail;
      for (const auto& f : next.failures) detail += (detail.empty() ? "" : ",") + f;
      throw Error(ErrorCode::kSlaveUnreachable, detail);
    }

    const RemoteSession local = env.hosts.open_local(master_id);
    configure_cluster_host(env.hosts, local, kMasterHostname, next.key, prior.key.public_key, entries);
    ++rewritten;

    std::map<std::string, std::string> current = name_tags(slaves);
    if (auto it = self.tags.find(kNameTag); it != self.tags.end()) current[master_id] = it->second;
    for (const auto& [id, name] : next.hostname_map.ordered()) {
      auto it = current.find(id);
      if (it == current.end() || it->second != name) {
        env.provider.tag_instance(config.credentials(), id, kNameTag, name);
      }
    }

    env.hosts.install_component(local, kServerComponent);
    env.hosts.start_component(local, kServerComponent);

    ReconcileReport report;
    for (const auto& [id, old_ip] : prior.ip_table) {
      auto it = next.ip_table.find(id);
      if (it != next.ip_table.end() && it->second != old_ip) report.rebound.push_back({id, old_ip, it->second});
    }
    report.new_key_generation = next.key.generation;
    report.hosts_files_rewritten = rewritten;

    next.phase = Phase::kReady;
    env.registry.update_state(config.region, next);
    env.registry.set_report(config.region, report);
    env.trace.record("lifecycle.reconciled", {{"region", config.region},
                                              {"rebound", std::to_string(report.rebound.size())},
                                              {"key_generation", std::to_string(report.new_key_generation)},
                                              {"rewritten", std::to_string(rewritten)}});
    return report;
  } catch (const Error& e) {
    env.registry.set_phase(config.region, Phase::kFailed);
    env.trace.record("lifecycle.reconcile_failed", {{"region", config.region},
                                                    {"error", std::string(error_name(e.code()))}});
    throw;
  }
}

ClusterState extend_cluster(Environment& env, const std::string& region, const Credentials& creds,
                            int additional, const std::string& instance_type) {
  auto lease = env.registry.acquire(region);
  if (additional < 1) throw Error(ErrorCode::kInvalidArgument, "additional must be positive");
  const auto rec = env.registry.get(region);
  if (rec.state.phase != Phase::kReady && rec.state.phase != Phase::kStopped) {
    throw Error(ErrorCode::kClusterNotReady, std::string(to_string(rec.state.phase)));
  }
  if (rec.state.phase == Phase::kReady) stop_members(env, rec, creds);

  UserData slave;
  slave.role = Role::kSlave;
  slave.access_key_id = rec.config.access_key_id;
  env.trace.record("lifecycle.extend", {{"region", region}, {"additional", std::to_string(additional)}});
  env.provider.launch_instances(creds, region, env.image_id, instance_type, additional,
                                render_user_data(slave));
  const int current = static_cast<int>(rec.state.hostname_map.slave_ids().size());
  env.registry.set_expected_slaves(region, std::max(current, rec.config.expected_slave_count) + additional);

  start_members(env, region, creds);
  return env.registry.get(region).state;
}

}  // namespace insta
