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

#include "instacluster/services.hpp"

#include <algorithm>

#include "json.hpp"

namespace insta {

using nlohmann::json;

std::string_view to_string(Placement p) noexcept {
  switch (p) {
    case Placement::kMasterOnly: return "master_only";
    case Placement::kAllSlaves: return "all_slaves";
    case Placement::kAny: return "any";
  }
  return "unknown";
}

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::kInstall: return "install";
    case Action::kConfigure: return "configure";
    case Action::kStart: return "start";
    case Action::kStop: return "stop";
  }
  return "unknown";
}

std::string_view to_string(HealthStatus s) noexcept {
  return s == HealthStatus::kHealthy ? "healthy" : "stale";
}

// ---- catalog ----------------------------------------------------------------

ServiceCatalog::ServiceCatalog(std::vector<ServiceDescriptor> entries) : entries_(std::move(entries)) {}

const ServiceCatalog& ServiceCatalog::standard() {
  static const ServiceCatalog catalog = [] {
    std::vector<ServiceDescriptor> e;
    e.push_back({"spark",
                 {{"spark-driver", 7077}, {"spark-webui", 8888}, {"spark-jobserver", 8090}},
                 Placement::kAny});
    e.push_back({"hue", {{"hue-webui", 8808}}, Placement::kMasterOnly});
    auto name_only = [&](const char* name, Placement p) {
      e.push_back({name, {{name, std::nullopt}}, p});
    };
    name_only("hdfs", Placement::kAllSlaves);
    name_only("yarn", Placement::kAllSlaves);
    name_only("mapreduce", Placement::kAllSlaves);
    name_only("tez", Placement::kAny);
    name_only("hive", Placement::kAny);
    name_only("hbase", Placement::kAllSlaves);
    name_only("pig", Placement::kAny);
    name_only("sqoop", Placement::kAny);
    name_only("oozie", Placement::kAny);
    name_only("zookeeper", Placement::kAllSlaves);
    name_only("falcon", Placement::kAny);
    name_only("storm", Placement::kAny);
    name_only("flume", Placement::kAny);
    name_only("slider", Placement::kAny);
    name_only("knox", Placement::kMasterOnly);
    name_only("kafka", Placement::kAny);
    name_only("nagios", Placement::kMasterOnly);
    name_only("ganglia", Placement::kAllSlaves);
    return ServiceCatalog(std::move(e));
  }();
  return catalog;
}

const ServiceDescriptor* ServiceCatalog::find(std::string_view name) const {
  for (const auto& d : entries_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<std::string> ServiceCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& d : entries_) out.push_back(d.name);
  return out;
}

// ---- plan -------------------------------------------------------------------

std::set<std::string> DeploymentPlan::components_on(const std::string& hostname) const {
  std::set<std::string> out;
  for (const auto& c : components) {
    if (std::find(c.hosts.begin(), c.hosts.end(), hostname) != c.hosts.end()) out.insert(c.component);
  }
  return out;
}

std::map<std::string, int> DeploymentPlan::ports() const {
  std::map<std::string, int> out;
  for (const auto& c : components) {
    if (c.port) out[c.component] = *c.port;
  }
  return out;
}

DeploymentPlan suggest_configuration(const std::vector<std::string>& services, const ClusterState& cluster,
                                     const ServiceCatalog& catalog) {
  std::vector<std::string> slaves;
  for (const auto& id : cluster.hostname_map.slave_ids()) slaves.push_back(cluster.hostname_map.bindings.at(id));

  DeploymentPlan plan;
  std::map<int, std::string> used_ports = {{kServerPort, kServerComponent}};
  for (const auto& name : services) {
    if (std::find(plan.services.begin(), plan.services.end(), name) != plan.services.end()) continue;
    const ServiceDescriptor* d = catalog.find(name);
    if (d == nullptr) throw Error(ErrorCode::kUnknownService, name);

    std::vector<std::string> hosts;
    switch (d->placement) {
      case Placement::kMasterOnly: hosts = {kMasterHostname}; break;
      case Placement::kAllSlaves: hosts = slaves.empty() ? std::vector<std::string>{kMasterHostname} : slaves; break;
      case Placement::kAny: hosts = {slaves.empty() ? std::string(kMasterHostname) : slaves.front()}; break;
    }
    plan.services.push_back(name);
    plan.service_hosts[name] = hosts;
    for (const auto& c : d->components) {
      if (c.port) {
        auto [it, fresh] = used_ports.emplace(*c.port, c.name);
        if (!fresh) {
          throw Error(ErrorCode::kPortConflict,
                      std::to_string(*c.port) + " claimed by " + it->second + " and " + c.name);
        }
      }
      plan.components.push_back({name, c.name, hosts, c.port});
    }
  }
  return plan;
}

// ---- wire -------------------------------------------------------------------

namespace {

json parse_envelope(std::string_view text, std::string_view type) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kInvalidMessage, "not a JSON object");
  if (!j.contains("v") || j["v"] != kWireVersion) throw Error(ErrorCode::kInvalidMessage, "unsupported version");
  if (!j.contains("type") || j["type"] != type) throw Error(ErrorCode::kInvalidMessage, "expected " + std::string(type));
  return j;
}

Action action_from_string(const std::string& s) {
  for (Action a : {Action::kInstall, Action::kConfigure, Action::kStart, Action::kStop}) {
    if (to_string(a) == s) return a;
  }
  throw Error(ErrorCode::kInvalidMessage, "unknown action " + s);
}

}  // namespace

std::string to_wire(const Heartbeat& hb) {
  json j = {{"v", kWireVersion},
            {"type", "heartbeat"},
            {"agent_host", hb.agent_host},
            {"timestamp", hb.timestamp},
            {"running_components", hb.running_components}};
  return j.dump();
}

std::string to_wire(const ActionMessage& msg) {
  json j = {{"v", kWireVersion},
            {"type", "action"},
            {"action", to_string(msg.action)},
            {"service", msg.service},
            {"target_hosts", msg.target_hosts},
            {"params", msg.params}};
  return j.dump();
}

Heartbeat heartbeat_from_wire(std::string_view text) {
  const json j = parse_envelope(text, "heartbeat");
  try {
    Heartbeat hb;
    hb.agent_host = j.at("agent_host").get<std::string>();
    hb.timestamp = j.at("timestamp").get<Seconds>();
    hb.running_components = j.at("running_components").get<std::set<std::string>>();
    return hb;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidMessage, e.what());
  }
}

ActionMessage action_from_wire(std::string_view text) {
  const json j = parse_envelope(text, "action");
  try {
    ActionMessage msg;
    msg.action = action_from_string(j.at("action").get<std::string>());
    msg.service = j.at("service").get<std::string>();
    msg.target_hosts = j.at("target_hosts").get<std::vector<std::string>>();
    msg.params = j.at("params").get<std::map<std::string, std::string>>();
    return msg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidMessage, e.what());
  }
}

// ---- health -----------------------------------------------------------------

bool is_stale(Seconds now, std::optional<Seconds> last_seen, Seconds interval) {
  return !last_seen || now - *last_seen > kStaleAfterBeats * interval;
}

void HeartbeatMonitor::receive(const Heartbeat& hb) {
  auto [it, fresh] = last_seen_.emplace(hb.agent_host, hb.timestamp);
  if (!fresh) it->second = std::max(it->second, hb.timestamp);
}

std::optional<Seconds> HeartbeatMonitor::last_seen(const std::string& hostname) const {
  auto it = last_seen_.find(hostname);
  if (it == last_seen_.end()) return std::nullopt;
  return it->second;
}

AgentHealth HeartbeatMonitor::health(const std::string& hostname, Seconds now) const {
  AgentHealth h;
  h.hostname = hostname;
  h.last_seen = last_seen(hostname);
  h.status = is_stale(now, h.last_seen, interval_) ? HealthStatus::kStale : HealthStatus::kHealthy;
  return h;
}

// ---- ServiceManager ----------------------------------------------------------

ServiceManager::ServiceManager(Environment& env, Seconds heartbeat_interval, const ServiceCatalog& catalog)
    : env_(env), interval_(heartbeat_interval), catalog_(catalog) {}

ServiceManager::ServerState& ServiceManager::server_locked(const std::string& region) {
  auto it = servers_.find(region);
  if (it == servers_.end()) it = servers_.emplace(region, ServerState{HeartbeatMonitor(interval_), {}, {}, {}}).first;
  return it->second;
}

std::optional<ServiceManager::ServerState> ServiceManager::server(const std::string& region) const {
  std::lock_guard lock(mu_);
  auto it = servers_.find(region);
  if (it == servers_.end()) return std::nullopt;
  return it->second;
}

RemoteSession ServiceManager::admin_session(const ClusterState& cluster, const std::string& instance_id) {
  if (instance_id == cluster.hostname_map.master_id) return env_.hosts.open_local(instance_id);
  return env_.hosts.authenticate(instance_id, env_.hosts.cluster_user(), KeyCredential{cluster.key.private_key});
}

void ServiceManager::attach(const std::string& region) {
  const auto rec = env_.registry.get(region);
  if (rec.state.phase != Phase::kReady) throw Error(ErrorCode::kClusterNotReady, std::string(to_string(rec.state.phase)));
  {
    std::lock_guard lock(mu_);
    server_locked(region);
  }
  for (const auto& [id, name] : rec.state.hostname_map.ordered()) {
    const HostState h = env_.hosts.inspect(id);
    if (!h.running || !h.components.contains(kAgentComponent)) continue;
    env_.hosts.start_component(admin_session(rec.state, id), kAgentComponent);
  }
  heartbeat_round(region);
  converge(region);
}

Heartbeat ServiceManager::agent_tick(const std::string& instance_id) {
  const HostState host = env_.hosts.inspect(instance_id);
  if (!host.running) throw Error(ErrorCode::kHostUnreachable, instance_id);
  if (!host.daemons.contains(kAgentComponent)) {
    throw Error(ErrorCode::kInvalidArgument, "agent not running on " + instance_id);
  }
  const auto region = env_.registry.region_of_instance(instance_id);
  if (!region) throw Error(ErrorCode::kNoCluster, instance_id);
  const auto rec = env_.registry.get(*region);
  const HostState master = env_.hosts.inspect(rec.state.hostname_map.master_id);
  if (!master.running || !master.daemons.contains(kServerComponent)) {
    throw Error(ErrorCode::kServerUnreachable, *region);
  }
  Heartbeat hb;
  hb.agent_host = rec.state.hostname_map.bindings.at(instance_id);
  hb.timestamp = env_.clock.now();
  hb.running_components = host.daemons;
  {
    std::lock_guard lock(mu_);
    server_locked(*region).monitor.receive(hb);
  }
  env_.trace.record("services.heartbeat", {{"msg", to_wire(hb)}});
  return hb;
}

void ServiceManager::heartbeat_round(const std::string& region) {
  const auto rec = env_.registry.get(region);
  const std::string& master_id = rec.state.hostname_map.master_id;
  const HostState master = env_.hosts.inspect(master_id);
  if (!master.running || !master.daemons.contains(kServerComponent)) return;
  for (const auto& [id, name] : rec.state.hostname_map.ordered()) {
    if (!env_.hosts.has_host(id)) continue;
    const HostState h = env_.hosts.inspect(id);
    if (h.running && h.daemons.contains(kAgentComponent)) {
      agent_tick(id);
    } else if (id == master_id) {
      std::lock_guard lock(mu_);
      server_locked(region).monitor.receive({kMasterHostname, env_.clock.now(), master.daemons});
    }
  }
}

void ServiceManager::run_for(const std::string& region, Seconds duration) {
  Seconds left = duration;
  while (left > 0) {
    const Seconds step = std::min(left, interval_);
    env_.clock.advance(step);
    left -= step;
    heartbeat_round(region);
  }
}

std::vector<AgentHealth> ServiceManager::health(const std::string& region) const {
  const auto rec = env_.registry.get(region);
  std::lock_guard lock(mu_);
  auto it = servers_.find(region);
  const HeartbeatMonitor empty(interval_);
  const HeartbeatMonitor& monitor = it == servers_.end() ? empty : it->second.monitor;
  std::vector<AgentHealth> out;
  for (const auto& [id, name] : rec.state.hostname_map.ordered()) {
    out.push_back(monitor.health(name, env_.clock.now()));
  }
  return out;
}

std::map<std::string, ActionResult> ServiceManager::submit_action(const std::string& region,
                                                                  const ActionMessage& msg) {
  const ServiceDescriptor* d = catalog_.find(msg.service);
  if (d == nullptr) throw Error(ErrorCode::kUnknownService, msg.service);
  const auto rec = env_.registry.get(region);
  if (rec.state.phase != Phase::kReady) throw Error(ErrorCode::kClusterNotReady, std::string(to_string(rec.state.phase)));
  env_.trace.record("services.action", {{"msg", to_wire(msg)}});

  std::map<std::string, ActionResult> results;
  for (const auto& target : msg.target_hosts) {
    ActionResult& result = results[target];
    const auto id = rec.state.hostname_map.instance_for(target);
    if (!id) {
      result = {ErrorCode::kUnknownHost, target};
      continue;
    }
    AgentHealth h;
    {
      std::lock_guard lock(mu_);
      h = server_locked(region).monitor.health(target, env_.clock.now());
    }
    if (h.status == HealthStatus::kStale) {
      result = {ErrorCode::kStaleAgent, target};
      continue;
    }
    try {
      const RemoteSession s = admin_session(rec.state, *id);
      const HostState before = env_.hosts.inspect(*id);
      switch (msg.action) {
        case Action::kInstall:
          for (const auto& c : d->components) env_.hosts.install_component(s, c.name);
          break;
        case Action::kConfigure:
          for (const auto& c : d->components) {
            if (!before.components.contains(c.name)) throw Error(ErrorCode::kNotInstalled, c.name + "@" + target);
          }
          env_.hosts.configure_service(s, msg.service, msg.params);
          break;
        case Action::kStart:
          for (const auto& c : d->components) env_.hosts.start_component(s, c.name);
          break;
        case Action::kStop:
          for (const auto& c : d->components) env_.hosts.stop_component(s, c.name);
          break;
      }
    } catch (const Error& e) {
      result = {e.code(), e.what()};
    }
  }
  for (const auto& [host, r] : results) {
    env_.trace.record("services.result", {{"host", host}, {"status", std::string(error_name(r.code))}});
  }
  return results;
}

void ServiceManager::converge(const std::string& region) {
  const auto rec = env_.registry.get(region);
  std::vector<std::string> services;
  std::map<std::string, std::string> overrides;
  {
    std::lock_guard lock(mu_);
    const ServerState& s = server_locked(region);
    services = s.services;
    overrides = s.overrides;
  }
  const DeploymentPlan plan = suggest_configuration(services, rec.state, catalog_);
  {
    std::lock_guard lock(mu_);
    server_locked(region).plan = plan;
  }
  for (const auto& service : plan.services) {
    const auto& hosts = plan.service_hosts.at(service);
    std::map<std::string, std::string> params;
    const std::string prefix = service + ".";
    for (const auto& [k, v] : overrides) {
      if (k.starts_with(prefix)) params[k.substr(prefix.size())] = v;
    }
    std::vector<ActionMessage> steps = {{Action::kInstall, service, hosts, {}}};
    if (!params.empty()) steps.push_back({Action::kConfigure, service, hosts, params});
    steps.push_back({Action::kStart, service, hosts, {}});
    for (const auto& msg : steps) {
      for (const auto& [host, r] : submit_action(region, msg)) {
        if (!r.ok()) throw Error(r.code, r.message);
      }
    }
  }
}

DeploymentPlan ServiceManager::install_services(const std::string& region, const std::vector<std::string>& services,
                                                const std::map<std::string, std::string>& overrides) {
  const auto rec = env_.registry.get(region);
  if (rec.state.phase != Phase::kReady) throw Error(ErrorCode::kClusterNotReady, std::string(to_string(rec.state.phase)));
  std::vector<std::string> all;
  std::map<std::string, std::string> all_overrides;
  {
    std::lock_guard lock(mu_);
    const ServerState& s = server_locked(region);
    all = s.services;
    all_overrides = s.overrides;
  }
  for (const auto& name : services) {
    if (std::find(all.begin(), all.end(), name) == all.end()) all.push_back(name);
  }
  for (const auto& [k, v] : overrides) all_overrides[k] = v;
  // Validates names and ports before touching any host.
  suggest_configuration(all, rec.state, catalog_);
  {
    std::lock_guard lock(mu_);
    ServerState& s = server_locked(region);
    s.services = all;
    s.overrides = all_overrides;
  }
  converge(region);
  return *server(region)->plan;
}

}  // namespace insta
