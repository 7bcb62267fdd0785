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

// insta: operator CLI for InstaCluster on the deterministic simulator.
//
// The simulator lives in memory, so the CLI keeps a small state file with the
// world seed and every mutating command issued so far. Each invocation
// rebuilds the world by replaying that history, which is exact because the
// simulation is deterministic, and then runs the new command.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "instacluster.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitOperational = 1;
constexpr int kExitUsage = 2;
constexpr char kDefaultKeyId[] = "AKIDSIMULATOR";
constexpr char kDefaultSecret[] = "simulator-secret";

struct Flags {
  std::string region = "us-east-1";
  int slaves = 0;
  std::string instance_type;
  std::string master_instance_type = "c4.xlarge";
  std::string services;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool deactivate_key = false;
  bool agent_on_master = false;
  int count = 0;
  std::string spec;
  std::string trace;
  std::string state = "instacluster.state.json";
  std::string backend = "sim";
  std::string access_key_id;
  std::string secret_key;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class OperationalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string take(char* s) {
  std::string out = s == nullptr ? "" : s;
  ic_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OperationalError("cannot write " + path);
  out << text;
}

class World {
 public:
  World(std::uint64_t seed, const std::string& key_id, const std::string& secret) {
    ic_world_options o{};
    o.seed = seed;
    o.access_key_id = key_id.c_str();
    o.secret_key = secret.c_str();
    if (ic_world_create(&o, &world_) != IC_OK) throw OperationalError("cannot create simulator");
  }
  ~World() { ic_world_destroy(world_); }
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  ic_world* get() const { return world_; }

  // Applies one recorded operation and returns its status.
  int apply(const json& op) {
    ic_set_credentials(world_, op.at("access_key_id").get<std::string>().c_str(),
                       op.at("secret_key").get<std::string>().c_str());
    const std::string kind = op.at("op");
    const std::string region = op.value("region", "");
    if (kind == "provision") return ic_provision(world_, op.at("spec").dump().c_str());
    if (kind == "stop") return ic_stop(world_, region.c_str());
    if (kind == "start") return ic_start(world_, region.c_str(), &last_report_);
    if (kind == "extend") {
      const std::string type = op.value("instance_type", "");
      return ic_extend(world_, region.c_str(), op.at("count").get<int>(), type.empty() ? nullptr : type.c_str());
    }
    if (kind == "install") return ic_install(world_, region.c_str(), op.at("services").get<std::string>().c_str());
    throw OperationalError("unknown operation in state file: " + kind);
  }

  std::string take_report() {
    std::string r = take(last_report_);
    last_report_ = nullptr;
    return r;
  }

  std::string error() const { return ic_last_error(world_); }

 private:
  ic_world* world_ = nullptr;
  char* last_report_ = nullptr;
};

json load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) return nullptr;
  json state = json::parse(in, nullptr, false);
  if (state.is_discarded() || !state.is_object() || state.value("version", 0) != 1) {
    throw OperationalError("state file " + path + " is corrupt");
  }
  return state;
}

std::string status_name(int code) { return ic_status_name(code); }

[[noreturn]] void fail(int code, const std::string& detail) {
  throw OperationalError(detail.empty() ? status_name(code) : detail);
}

std::string status_text(World& world, const std::string& region) {
  char* text = nullptr;
  const int rc = ic_status_report(world.get(), region.c_str(), &text);
  if (rc != IC_OK) fail(rc, world.error());
  return take(text);
}

json provision_spec(const Flags& f) {
  if (!f.spec.empty()) {
    const std::string doc = read_file(f.spec);
    char* issues = nullptr;
    const int rc = ic_validate_spec(doc.c_str(), &issues);
    const json list = json::parse(take(issues), nullptr, false);
    if (rc != IC_OK) {
      std::string detail;
      for (const auto& i : list) {
        detail += (detail.empty() ? "" : "; ") + i["path"].get<std::string>() + " " + i["message"].get<std::string>();
      }
      throw OperationalError("InvalidSpec: " + detail);
    }
    return json::parse(doc);
  }
  json services = json::array();
  std::stringstream ss(f.services);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) services.push_back(item);
  }
  const std::string slave_type = f.instance_type.empty() ? "c4.xlarge" : f.instance_type;
  return {{"version", 1},
          {"region", f.region},
          {"master_instance_type", f.master_instance_type},
          {"slave_count", f.slaves},
          {"slave_instance_type", slave_type},
          {"services", services},
          {"seed", f.seed},
          {"agent_on_master", f.agent_on_master},
          {"deactivate_key", f.deactivate_key}};
}

int run(const std::string& command, const Flags& f) {
  if (f.backend != "sim") throw UsageError("unsupported backend '" + f.backend + "' (only 'sim' is available)");

  if (command == "validate-spec") {
    if (f.spec.empty()) throw UsageError("validate-spec requires --spec");
    char* issues = nullptr;
    const int rc = ic_validate_spec(read_file(f.spec).c_str(), &issues);
    const json list = json::parse(take(issues), nullptr, false);
    if (rc == IC_OK) {
      std::cout << "valid\n";
      return kExitOk;
    }
    if (rc != IC_ERR_INVALID_SPEC) fail(rc, "");
    for (const auto& i : list) {
      std::cout << (i["path"].get<std::string>().empty() ? "$" : i["path"].get<std::string>()) << ": "
                << i["message"].get<std::string>() << "\n";
    }
    throw OperationalError("InvalidSpec: " + std::to_string(list.size()) + " issue(s)");
  }

  json state = load_state(f.state);
  std::string key_id = f.access_key_id;
  std::string secret = f.secret_key;
  if (state.is_null()) {
    json spec_seed = nullptr;
    if (command == "provision" && !f.spec.empty()) spec_seed = provision_spec(f).value("seed", json(0));
    state = {{"version", 1},
             {"seed", spec_seed.is_null() ? json(f.seed) : spec_seed},
             {"access_key_id", key_id.empty() ? kDefaultKeyId : key_id},
             {"secret_key", secret.empty() ? kDefaultSecret : secret},
             {"history", json::array()}};
  }
  if (key_id.empty()) key_id = state["access_key_id"];
  if (secret.empty()) secret = state["secret_key"];

  World world(state["seed"].get<std::uint64_t>(), state["access_key_id"], state["secret_key"]);
  for (const auto& op : state["history"]) {
    const int rc = world.apply(op);
    world.take_report();
    if (rc != op.at("status").get<int>()) {
      throw OperationalError("state file replay diverged at '" + op.at("op").get<std::string>() + "'");
    }
  }

  json op = {{"access_key_id", key_id}, {"secret_key", secret}, {"region", f.region}};
  std::string output;
  if (command == "provision") {
    op["op"] = "provision";
    op["spec"] = provision_spec(f);
    op["region"] = op["spec"].value("region", f.region);
  } else if (command == "stop" || command == "start") {
    op["op"] = command;
  } else if (command == "extend") {
    if (f.count < 1) throw UsageError("extend requires --count >= 1");
    op["op"] = "extend";
    op["count"] = f.count;
    op["instance_type"] = f.instance_type;
  } else if (command == "install") {
    if (f.services.empty()) throw UsageError("install requires --services");
    op["op"] = "install";
    op["services"] = f.services;
  } else if (command == "status") {
    output = status_text(world, f.region);
  } else if (command == "export-spec") {
    char* doc = nullptr;
    const int rc = ic_export_spec(world.get(), f.region.c_str(), &doc);
    if (rc != IC_OK) fail(rc, world.error());
    output = take(doc);
    if (!f.spec.empty()) {
      write_file(f.spec, output);
      output = "wrote " + f.spec + "\n";
    }
  } else {
    throw UsageError("unknown command " + command);
  }

  int rc = IC_OK;
  if (op.contains("op")) {
    rc = world.apply(op);
    op["status"] = rc;
    state["history"].push_back(op);
    write_file(f.state, state.dump(2) + "\n");
    if (rc == IC_OK) {
      const std::string region = op["region"];
      if (command == "start") {
        const json report = json::parse(world.take_report());
        output += "reconciled: " + std::to_string(report["rebound"].size()) + " address(es) changed, key generation " +
                  std::to_string(report["new_key_generation"].get<int>()) + ", " +
                  std::to_string(report["hosts_files_rewritten"].get<int>()) + " hosts files rewritten\n";
      }
      output += status_text(world, region);
    }
  }

  if (!f.trace.empty()) {
    char* text = nullptr;
    if (ic_trace(world.get(), &text) == IC_OK) write_file(f.trace, take(text));
  }
  if (rc != IC_OK) fail(rc, world.error());
  std::cout << output;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"InstaCluster: provision and manage clusters on the deterministic simulator", "insta"};
  app.require_subcommand(1, 1);

  Flags f;
  auto common = [&f](CLI::App* cmd) {
    cmd->add_option("--region", f.region, "Region the cluster lives in")->capture_default_str();
    cmd->add_option("--trace", f.trace, "Write the full simulation trace to this file");
    cmd->add_option("--state", f.state, "Simulator state file")->capture_default_str();
    cmd->add_option("--backend", f.backend, "Provider backend (only 'sim')")->capture_default_str();
    cmd->add_option("--access-key-id", f.access_key_id, "Access key id")->envname("INSTA_ACCESS_KEY_ID");
    cmd->add_option("--secret-key", f.secret_key, "Secret access key")->envname("INSTA_SECRET_KEY");
  };

  auto* provision = app.add_subcommand("provision", "Launch and bootstrap a new cluster");
  common(provision);
  provision->add_option("--slaves", f.slaves, "Number of slave instances")->check(CLI::NonNegativeNumber);
  provision->add_option("--instance-type", f.instance_type, "Slave instance type");
  provision->add_option("--master-instance-type", f.master_instance_type, "Master instance type");
  provision->add_option("--services", f.services, "Comma-separated services to install");
  provision->add_option("--seed", f.seed, "Seed for every random choice");
  provision->add_flag("--deactivate-key", f.deactivate_key, "Deactivate the access key after discovery");
  provision->add_flag("--agent-on-master", f.agent_on_master, "Also run an agent on the master");
  provision->add_option("--spec", f.spec, "Provision from a .cluster.json file instead of flags");

  auto* status = app.add_subcommand("status", "Show hosts, health and service plan");
  common(status);
  auto* stop = app.add_subcommand("stop", "Stop every instance of the cluster");
  common(stop);
  auto* start = app.add_subcommand("start", "Start the cluster (slaves first) and reconcile");
  common(start);
  auto* extend = app.add_subcommand("extend", "Add slaves to the cluster");
  common(extend);
  extend->add_option("--count", f.count, "Slaves to add")->required();
  extend->add_option("--instance-type", f.instance_type, "Instance type of the new slaves");
  auto* install = app.add_subcommand("install", "Install services on the cluster");
  common(install);
  install->add_option("--services", f.services, "Comma-separated services")->required();
  auto* export_spec = app.add_subcommand("export-spec", "Write the cluster's .cluster.json");
  common(export_spec);
  export_spec->add_option("--spec", f.spec, "Output file (stdout when omitted)");
  auto* validate = app.add_subcommand("validate-spec", "Check a .cluster.json file");
  validate->add_option("--spec", f.spec, "File to validate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, f);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OperationalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperational;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return kExitOperational;
  }
}
