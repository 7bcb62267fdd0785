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

#include <iomanip>
#include <sstream>

namespace insta {

using nlohmann::json;

namespace {

void raise_boot_error(const HostState& host) {
  if (host.boot_error) throw Error(*host.boot_error, host.boot_error_message);
}

json plan_json(const DeploymentPlan& plan) {
  json components = json::array();
  for (const auto& c : plan.components) {
    components.push_back({{"service", c.service},
                          {"component", c.component},
                          {"hosts", c.hosts},
                          {"port", c.port ? json(*c.port) : json(nullptr)}});
  }
  return {{"services", plan.services}, {"service_hosts", plan.service_hosts}, {"components", components}};
}

}  // namespace

std::string render_status(const StatusReport& report) {
  std::ostringstream out;
  out << "cluster " << report.region << " phase=" << to_string(report.phase)
      << " key_generation=" << report.key_generation << " t=" << report.now << "\n";
  out << std::left << std::setw(12) << "HOSTNAME" << std::setw(12) << "INSTANCE" << std::setw(16)
      << "PRIVATE_IP" << std::setw(10) << "STATE" << std::setw(9) << "HEALTH"
      << "LAST_SEEN\n";
  for (const auto& row : report.rows) {
    out << std::setw(12) << row.hostname << std::setw(12) << row.instance_id << std::setw(16)
        << (row.private_ip.empty() ? "-" : row.private_ip) << std::setw(10) << row.state << std::setw(9)
        << to_string(row.health.status)
        << (row.health.last_seen ? std::to_string(*row.health.last_seen) : "-") << "\n";
  }
  if (report.plan && !report.plan->services.empty()) {
    out << "services:\n";
    for (const auto& c : report.plan->components) {
      out << "  " << c.service << "/" << c.component;
      if (c.port) out << ":" << *c.port;
      out << " ->";
      for (const auto& h : c.hosts) out << " " << h;
      out << "\n";
    }
  }
  return out.str();
}

Simulation::Simulation(SimulationOptions options)
    : options_(std::move(options)),
      operator_{options_.access_key_id, options_.secret_key},
      trace_(clock_),
      provider_(clock_, trace_,
                SimProviderOptions{options_.seed, options_.stable_ips, options_.max_boot_delay, {}}),
      hosts_(trace_, HostFleetOptions{options_.cluster_user}),
      env_{provider_, hosts_, clock_, registry_, trace_},
      services_(env_, options_.heartbeat_interval) {
  provider_.register_credentials(options_.access_key_id, options_.secret_key);
  provider_.set_boot_hook([this](const std::string& id, const std::string& user_data) {
    hosts_.on_boot(id, user_data);
  });
  provider_.set_stop_hook([this](const std::string& id) { hosts_.on_stop(id); });
  hosts_.set_boot_handler(this);
}

Simulation::~Simulation() {
  hosts_.set_boot_handler(nullptr);
  provider_.set_boot_hook({});
  provider_.set_stop_hook({});
}

void Simulation::on_slave_boot(const std::string& host_id, const UserData& data) {
  slave_init(hosts_, host_id, data);
}

void Simulation::on_master_boot(const std::string& host_id, const UserData& data) {
  const MasterConfig config = MasterConfig::from_user_data(data);
  const auto rec = registry_.find(config.region);
  if (rec && rec->state.hostname_map.master_id == host_id && rec->ever_ready) {
    reconcile_on_restart(env_, host_id, config);
  } else {
    master_init(env_, host_id, config);
  }
}

ClusterState Simulation::provision(const ClusterSpec& spec) {
  if (spec.version != kSpecVersion) throw Error(ErrorCode::kInvalidSpec, "version");
  if (spec.slave_count < 0) throw Error(ErrorCode::kInvalidSpec, "slave_count < 0");
  for (const auto& s : spec.services) {
    if (services_.catalog().find(s) == nullptr) throw Error(ErrorCode::kUnknownService, s);
  }
  if (auto rec = registry_.find(spec.region); rec && rec->state.phase != Phase::kFailed) {
    throw Error(ErrorCode::kClusterAlreadyExists, spec.region);
  }
  trace_.record("sim.provision", {{"region", spec.region}, {"slaves", std::to_string(spec.slave_count)}});

  if (spec.slave_count > 0) {
    UserData slave;
    slave.role = Role::kSlave;
    slave.access_key_id = operator_.key_id;
    provider_.launch_instances(operator_, spec.region, env_.image_id, spec.slave_instance_type,
                               spec.slave_count, render_user_data(slave));
  }
  UserData master;
  master.role = Role::kMaster;
  master.access_key_id = operator_.key_id;
  master.secret_key = operator_.secret;
  master.region = spec.region;
  master.deactivate_key = spec.deactivate_key;
  master.expected_slaves = spec.slave_count;
  master.seed = spec.seed;
  master.agent_on_master = spec.agent_on_master;
  const auto ids = provider_.launch_instances(operator_, spec.region, env_.image_id,
                                              spec.master_instance_type, 1, render_user_data(master));
  clock_.run_until_idle();
  raise_boot_error(hosts_.inspect(ids.front()));

  services_.attach(spec.region);
  if (!spec.services.empty() || !spec.config_overrides.empty()) {
    services_.install_services(spec.region, spec.services, spec.config_overrides);
  }
  return registry_.get(spec.region).state;
}

void Simulation::stop(const std::string& region) {
  trace_.record("sim.stop", {{"region", region}});
  stop_cluster(env_, region, operator_);
}

ReconcileReport Simulation::start(const std::string& region) {
  trace_.record("sim.start", {{"region", region}});
  ReconcileReport report = start_cluster(env_, region, operator_);
  services_.attach(region);
  return report;
}

ClusterState Simulation::extend(const std::string& region, int count,
                                const std::optional<std::string>& instance_type) {
  const auto rec = registry_.get(region);
  std::string type = kDefaultInstanceType;
  if (instance_type) {
    type = *instance_type;
  } else if (const auto slaves = rec.state.hostname_map.slave_ids(); !slaves.empty()) {
    if (auto inst = provider_.inspect(slaves.front())) type = inst->instance_type;
  }
  trace_.record("sim.extend", {{"region", region}, {"count", std::to_string(count)}});
  extend_cluster(env_, region, operator_, count, type);
  services_.attach(region);
  return registry_.get(region).state;
}

DeploymentPlan Simulation::install(const std::string& region, const std::vector<std::string>& services,
                                   const std::map<std::string, std::string>& overrides) {
  trace_.record("sim.install", {{"region", region}});
  return services_.install_services(region, services, overrides);
}

void Simulation::advance(Seconds duration) {
  Seconds left = duration;
  const Seconds interval = services_.heartbeat_interval();
  while (left > 0) {
    const Seconds step = std::min(left, interval);
    clock_.advance(step);
    left -= step;
    for (const auto& region : registry_.regions()) {
      if (registry_.get(region).state.phase == Phase::kReady) services_.heartbeat_round(region);
    }
  }
}

StatusReport Simulation::status(const std::string& region) const {
  const auto rec = registry_.get(region);
  StatusReport report;
  report.region = region;
  report.phase = rec.state.phase;
  report.key_generation = rec.state.key.generation;
  report.now = clock_.now();
  const auto health = services_.health(region);
  std::size_t i = 0;
  for (const auto& [id, name] : rec.state.hostname_map.ordered()) {
    StatusRow row;
    row.hostname = name;
    row.instance_id = id;
    if (auto inst = provider_.inspect(id)) {
      row.private_ip = inst->private_ip;
      row.state = std::string(to_string(inst->state));
    }
    row.health = health.at(i++);
    report.rows.push_back(std::move(row));
  }
  if (auto server = services_.server(region)) report.plan = server->plan;
  return report;
}

ClusterSpec Simulation::export_spec(const std::string& region) const {
  const auto rec = registry_.get(region);
  const auto server = services_.server(region);
  std::string master_type = kDefaultInstanceType;
  std::string slave_type = kDefaultInstanceType;
  if (auto inst = provider_.inspect(rec.state.hostname_map.master_id)) master_type = inst->instance_type;
  if (const auto slaves = rec.state.hostname_map.slave_ids(); !slaves.empty()) {
    if (auto inst = provider_.inspect(slaves.front())) slave_type = inst->instance_type;
  }
  return insta::export_spec(rec, server ? &*server : nullptr, master_type, slave_type);
}

json Simulation::snapshot() const {
  json out;
  out["now"] = clock_.now();
  out["operator_key_active"] = provider_.credentials_active(options_.access_key_id);

  json instances = json::array();
  for (const auto& i : provider_.all_instances()) {
    instances.push_back({{"id", i.id},
                         {"region", i.region},
                         {"image_id", i.image_id},
                         {"instance_type", i.instance_type},
                         {"state", to_string(i.state)},
                         {"private_ip", i.private_ip},
                         {"launch_seq", i.launch_seq},
                         {"tags", i.tags},
                         {"user_data", i.user_data}});
  }
  out["instances"] = instances;

  json hosts = json::array();
  for (const auto& id : hosts_.host_ids()) {
    const HostState h = hosts_.inspect(id);
    json users = json::array();
    for (const auto& [name, u] : h.users) {
      users.push_back({{"name", name},
                       {"password", u.password ? json(*u.password) : json(nullptr)},
                       {"authorized_public_keys", u.authorized_public_keys}});
    }
    hosts.push_back({{"instance_id", h.instance_id},
                     {"running", h.running},
                     {"hostname", h.hostname},
                     {"users", users},
                     {"hosts_file", hosts_file_text(h.hosts_file)},
                     {"components", h.components},
                     {"daemons", h.daemons},
                     {"service_config", h.service_config},
                     {"agent_version", h.agent_version},
                     {"boot_count", h.boot_count},
                     {"boot_error", h.boot_error ? json(std::string(error_name(*h.boot_error))) : json(nullptr)}});
  }
  out["hosts"] = hosts;

  json clusters = json::array();
  for (const auto& region : registry_.regions()) {
    const auto rec = registry_.get(region);
    json c = {{"region", region},
              {"phase", to_string(rec.state.phase)},
              {"master_id", rec.state.hostname_map.master_id},
              {"bindings", rec.state.hostname_map.bindings},
              {"ip_table", rec.state.ip_table},
              {"key", {{"public", rec.state.key.public_key},
                       {"private", rec.state.key.private_key},
                       {"generation", rec.state.key.generation}}},
              {"failures", rec.state.failures},
              {"ever_ready", rec.ever_ready},
              {"expected_slaves", rec.config.expected_slave_count}};
    if (auto server = services_.server(region)) {
      c["server"] = {{"last_seen", server->monitor.all_last_seen()},
                     {"services", server->services},
                     {"overrides", server->overrides},
                     {"plan", server->plan ? plan_json(*server->plan) : json(nullptr)}};
    }
    clusters.push_back(std::move(c));
  }
  out["clusters"] = clusters;
  return out;
}

}  // namespace insta
