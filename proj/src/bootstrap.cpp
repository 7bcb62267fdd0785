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

#include "instacluster/bootstrap.hpp"

#include <algorithm>
#include <charconv>

#include "instacluster/error.hpp"
#include "mix.hpp"

namespace insta {

MasterConfig MasterConfig::from_user_data(const UserData& data) {
  MasterConfig c;
  c.access_key_id = data.access_key_id;
  c.secret_key = data.secret_key;
  c.region = data.region;
  c.deactivate_key_after_discovery = data.deactivate_key;
  c.expected_slave_count = data.expected_slaves;
  c.seed = data.seed;
  c.agent_on_master = data.agent_on_master;
  return c;
}

std::optional<int> slave_index(const std::string& hostname) {
  constexpr std::string_view prefix = "slave-";
  if (!hostname.starts_with(prefix) || hostname.size() == prefix.size()) return std::nullopt;
  if (hostname[prefix.size()] == '0') return std::nullopt;
  int k = 0;
  const char* first = hostname.data() + prefix.size();
  const char* last = hostname.data() + hostname.size();
  auto [ptr, ec] = std::from_chars(first, last, k);
  if (ec != std::errc{} || ptr != last || k < 1) return std::nullopt;
  return k;
}

std::string slave_hostname(int index) { return "slave-" + std::to_string(index); }

std::vector<std::pair<std::string, std::string>> HostnameMap::ordered() const {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::pair<int, std::string>> slaves;
  for (const auto& [id, name] : bindings) {
    if (id == master_id) continue;
    slaves.emplace_back(slave_index(name).value_or(0), id);
  }
  std::sort(slaves.begin(), slaves.end());
  if (auto it = bindings.find(master_id); it != bindings.end()) out.emplace_back(master_id, it->second);
  for (const auto& [k, id] : slaves) out.emplace_back(id, bindings.at(id));
  return out;
}

std::vector<std::string> HostnameMap::slave_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, name] : ordered()) {
    if (id != master_id) out.push_back(id);
  }
  return out;
}

std::optional<std::string> HostnameMap::instance_for(const std::string& hostname) const {
  for (const auto& [id, name] : bindings) {
    if (name == hostname) return id;
  }
  return std::nullopt;
}

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::kDiscovering: return "discovering";
    case Phase::kConfiguring: return "configuring";
    case Phase::kReady: return "ready";
    case Phase::kStopped: return "stopped";
    case Phase::kFailed: return "failed";
  }
  return "unknown";
}

// ---- ClusterRegistry ------------------------------------------------------

ClusterRegistry::Lease::~Lease() {
  if (registry_ != nullptr) {
    std::lock_guard lock(registry_->mu_);
    registry_->busy_.erase(region_);
  }
}

void ClusterRegistry::claim(const std::string& region, const std::string& master_id,
                            const MasterConfig& config) {
  std::lock_guard lock(mu_);
  auto it = records_.find(region);
  if (it != records_.end()) {
    const Record& r = it->second;
    const bool same_master = r.state.hostname_map.master_id == master_id;
    if (!(same_master && !r.ever_ready && r.state.phase == Phase::kFailed) &&
        !(!same_master && r.state.phase == Phase::kFailed)) {
      throw Error(ErrorCode::kClusterAlreadyExists, region);
    }
  }
  Record rec;
  rec.state.region = region;
  rec.state.phase = Phase::kDiscovering;
  rec.state.hostname_map.master_id = master_id;
  rec.config = config;
  records_[region] = std::move(rec);
}

ClusterRegistry::Lease ClusterRegistry::acquire(const std::string& region) {
  std::lock_guard lock(mu_);
  if (!records_.contains(region)) throw Error(ErrorCode::kNoCluster, region);
  if (!busy_.insert(region).second) throw Error(ErrorCode::kBusyCluster, region);
  return Lease(this, region);
}

std::optional<ClusterRegistry::Record> ClusterRegistry::find(const std::string& region) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(region);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

ClusterRegistry::Record ClusterRegistry::get(const std::string& region) const {
  auto r = find(region);
  if (!r) throw Error(ErrorCode::kNoCluster, region);
  return *r;
}

std::optional<std::string> ClusterRegistry::region_of_master(const std::string& master_id) const {
  std::lock_guard lock(mu_);
  for (const auto& [region, rec] : records_) {
    if (rec.state.hostname_map.master_id == master_id) return region;
  }
  return std::nullopt;
}

std::optional<std::string> ClusterRegistry::region_of_instance(const std::string& instance_id) const {
  std::lock_guard lock(mu_);
  for (const auto& [region, rec] : records_) {
    if (rec.state.hostname_map.master_id == instance_id ||
        rec.state.hostname_map.bindings.contains(instance_id)) {
      return region;
    }
  }
  return std::nullopt;
}

std::vector<std::string> ClusterRegistry::regions() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [region, rec] : records_) out.push_back(region);
  return out;
}

void ClusterRegistry::update_state(const std::string& region, const ClusterState& state) {
  std::lock_guard lock(mu_);
  Record& r = records_.at(region);
  r.state = state;
  if (state.phase == Phase::kReady) r.ever_ready = true;
}

void ClusterRegistry::set_phase(const std::string& region, Phase phase) {
  std::lock_guard lock(mu_);
  Record& r = records_.at(region);
  r.state.phase = phase;
  if (phase == Phase::kReady) r.ever_ready = true;
}

void ClusterRegistry::set_report(const std::string& region, const ReconcileReport& report) {
  std::lock_guard lock(mu_);
  records_.at(region).last_report = report;
}

void ClusterRegistry::set_expected_slaves(const std::string& region, int count) {
  std::lock_guard lock(mu_);
  records_.at(region).config.expected_slave_count = count;
}

// ---- protocol steps -------------------------------------------------------

std::vector<Instance> discover_slaves(Provider& provider, const Credentials& creds,
                                      const std::string& region, const std::string& self_id,
                                      const std::string& image_id) {
  InstanceFilter filter;
  filter.region = region;
  filter.states = {InstanceState::kRunning};
  filter.image_id = image_id;
  auto found = provider.describe_instances(creds, filter);
  std::erase_if(found, [&](const Instance& i) { return i.id == self_id; });
  return found;
}

std::map<std::string, std::string> name_tags(const std::vector<Instance>& instances) {
  std::map<std::string, std::string> out;
  for (const auto& i : instances) {
    if (auto it = i.tags.find(kNameTag); it != i.tags.end()) out[i.id] = it->second;
  }
  return out;
}

HostnameMap assign_hostnames(const std::string& self_id, const std::vector<Instance>& slaves,
                             const std::optional<std::map<std::string, std::string>>& prior_tags) {
  HostnameMap map;
  map.master_id = self_id;
  map.bindings[self_id] = kMasterHostname;

  std::set<int> taken;
  std::vector<const Instance*> untagged;
  for (const auto& slave : slaves) {
    std::optional<std::string> tag;
    if (prior_tags) {
      if (auto it = prior_tags->find(slave.id); it != prior_tags->end()) tag = it->second;
    }
    if (tag && *tag == kMasterHostname) {
      throw Error(ErrorCode::kDuplicateTagHostname, slave.id + " is tagged master");
    }
    const auto k = tag ? slave_index(*tag) : std::nullopt;
    if (!k) {
      untagged.push_back(&slave);
      continue;
    }
    if (!taken.insert(*k).second) throw Error(ErrorCode::kDuplicateTagHostname, *tag);
    map.bindings[slave.id] = *tag;
  }

  int next = 1;
  for (const Instance* slave : untagged) {
    while (taken.contains(next)) ++next;
    taken.insert(next);
    map.bindings[slave->id] = slave_hostname(next);
  }
  return map;
}

std::vector<HostsEntry> hosts_entries(const HostnameMap& map,
                                      const std::map<std::string, std::string>& ip_table) {
  std::vector<HostsEntry> out;
  for (const auto& [id, name] : map.ordered()) {
    auto it = ip_table.find(id);
    if (it == ip_table.end() || it->second.empty()) {
      throw Error(ErrorCode::kMissingIp, name + " (" + id + ")");
    }
    out.push_back({it->second, name});
  }
  return out;
}

std::string render_hosts_file(const HostnameMap& map, const std::map<std::string, std::string>& ip_table) {
  return hosts_file_text(hosts_entries(map, ip_table));
}

std::uint64_t cluster_key_seed(std::uint64_t seed, const std::string& region) {
  return detail::splitmix64(seed) ^ detail::fnv1a(region);
}

void slave_init(HostFleet& hosts, const std::string& host_id, const UserData& data) {
  if (data.access_key_id.empty()) throw Error(ErrorCode::kMalformedUserData, "missing access_key_id");
  const HostState before = hosts.inspect(host_id);
  // Once a cluster key is authorized the slave belongs to a cluster; a reboot
  // must not reopen the password path.
  const bool joined = before.users.contains(hosts.cluster_user()) &&
                      !before.users.at(hosts.cluster_user()).authorized_public_keys.empty();
  if (!joined && !before.users.contains(kTempUser)) {
    hosts.create_user(host_id, kTempUser, data.access_key_id);
  }
  const RemoteSession local = hosts.open_local(host_id);
  hosts.install_component(local, kAgentComponent);
}

RemoteSession open_slave_session(HostFleet& hosts, const std::string& host_id,
                                 const std::string& password,
                                 const std::vector<std::string>& private_keys) {
  try {
    return hosts.authenticate(host_id, kTempUser, PasswordCredential{password});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAuthFailed || private_keys.empty()) throw;
  }
  for (std::size_t i = 0; i < private_keys.size(); ++i) {
    try {
      return hosts.authenticate(host_id, hosts.cluster_user(), KeyCredential{private_keys[i]});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAuthFailed || i + 1 == private_keys.size()) throw;
    }
  }
  throw Error(ErrorCode::kAuthFailed, host_id);
}

void configure_cluster_host(HostFleet& hosts, const RemoteSession& session,
                            const std::string& hostname, const KeyPair& key,
                            const std::optional<std::string>& revoke_public,
                            const std::vector<HostsEntry>& entries) {
  hosts.install_authorized_key(session, hosts.cluster_user(), key.public_key);
  if (revoke_public && *revoke_public != key.public_key) {
    hosts.revoke_authorized_key(session, hosts.cluster_user(), *revoke_public);
  }
  hosts.set_hostname(session, hostname);
  hosts.write_hosts_file(session, entries);
  if (hosts.inspect(session.host_id()).users.contains(kTempUser)) {
    hosts.delete_user(session, kTempUser);
  }
}

std::vector<Instance> await_slaves(Environment& env, const std::string& self_id,
                                   const MasterConfig& config, int expected) {
  const Seconds started = env.clock.now();
  for (;;) {
    auto slaves = discover_slaves(env.provider, config.credentials(), config.region, self_id, env.image_id);
    const Seconds elapsed = env.clock.now() - started;
    env.trace.record("bootstrap.poll", {{"found", std::to_string(slaves.size())},
                                        {"expected", std::to_string(expected)},
                                        {"elapsed", std::to_string(elapsed)}});
    if (static_cast<int>(slaves.size()) >= expected) return slaves;
    if (elapsed >= config.discovery_timeout) {
      throw Error(ErrorCode::kDiscoveryTimeout, std::to_string(slaves.size()) + " of " +
                                                    std::to_string(expected) + " slaves after " +
                                                    std::to_string(elapsed) + "s");
    }
    env.clock.advance(std::min(config.poll_interval, config.discovery_timeout - elapsed));
  }
}

Instance describe_instance(Environment& env, const MasterConfig& config, const std::string& self_id) {
  InstanceFilter filter;
  filter.region = config.region;
  for (auto& i : env.provider.describe_instances(config.credentials(), filter)) {
    if (i.id == self_id) return i;
  }
  throw Error(ErrorCode::kUnknownInstance, self_id + " not visible in " + config.region);
}

ClusterState master_init(Environment& env, const std::string& host_id, const MasterConfig& config) {
  if (config.expected_slave_count < 0) throw Error(ErrorCode::kInvalidArgument, "expected_slave_count < 0");
  env.registry.claim(config.region, host_id, config);
  env.trace.record("bootstrap.master_init", {{"id", host_id}, {"region", config.region}});

  ClusterState state;
  state.region = config.region;
  state.hostname_map.master_id = host_id;
  try {
    // (1) discovery
    const auto slaves = await_slaves(env, host_id, config, config.expected_slave_count);
    const Instance self = describe_instance(env, config, host_id);

    // (2) naming
    state.hostname_map = assign_hostnames(host_id, slaves, name_tags(slaves));
    state.ip_table[host_id] = self.private_ip;
    for (const auto& s : slaves) state.ip_table[s.id] = s.private_ip;
    state.phase = Phase::kConfiguring;
    env.registry.update_state(config.region, state);

    // (3) cluster key
    state.key = generate_keypair(cluster_key_seed(config.seed, config.region), 1);
    const auto entries = hosts_entries(state.hostname_map, state.ip_table);

    // (4) slaves, over the temporary user
    for (const auto& slave_id : state.hostname_map.slave_ids()) {
      const std::string& name = state.hostname_map.bindings.at(slave_id);
      try {
        const RemoteSession s =
            open_slave_session(env.hosts, slave_id, config.access_key_id, {state.key.private_key});
        configure_cluster_host(env.hosts, s, name, state.key, std::nullopt, entries);
      } catch (const Error& e) {
        state.failures.push_back(name + ":" + std::string(error_name(e.code())));
      }
    }
    if (!state.failures.empty()) {
      state.phase = Phase::kFailed;
      env.registry.update_state(config.region, state);
      std::string detail;
      for (const auto& f : state.failures) detail += (detail.empty() ? "" : ",") + f;
      env.trace.record("bootstrap.failed", {{"region", config.region}, {"slaves", detail}});
      throw Error(ErrorCode::kSlaveUnreachable, detail);
    }

    // (5) the master itself
    const RemoteSession local = env.hosts.open_local(host_id);
    configure_cluster_host(env.hosts, local, kMasterHostname, state.key, std::nullopt, entries);
    if (config.agent_on_master) env.hosts.install_component(local, kAgentComponent);

    // (6) tags
    std::map<std::string, std::string> current = name_tags(slaves);
    if (auto it = self.tags.find(kNameTag); it != self.tags.end()) current[host_id] = it->second;
    for (const auto& [id, name] : state.hostname_map.ordered()) {
      auto it = current.find(id);
      if (it == current.end() || it->second != name) {
        env.provider.tag_instance(config.credentials(), id, kNameTag, name);
      }
    }

    // (7) optional key deactivation
    if (config.deactivate_key_after_discovery) env.provider.deactivate_credentials(config.access_key_id);

    // (8) provisioning server
    env.hosts.install_component(local, kServerComponent);
    env.hosts.start_component(local, kServerComponent);

    state.phase = Phase::kReady;
    env.registry.update_state(config.region, state);
    env.trace.record("bootstrap.ready", {{"region", config.region},
                                         {"hosts", std::to_string(state.hostname_map.bindings.size())},
                                         {"key_generation", std::to_string(state.key.generation)}});
    return state;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSlaveUnreachable) {
      state.phase = Phase::kFailed;
      env.registry.update_state(config.region, state);
      env.trace.record("bootstrap.failed", {{"region", config.region},
                                            {"error", std::string(error_name(e.code()))}});
    }
    throw;
  }
}

}  // namespace insta
