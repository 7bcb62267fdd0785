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

#include "instacluster/specfile.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace insta {

using nlohmann::json;

namespace {

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "version",  "region",           "master_instance_type", "slave_count",     "slave_instance_type",
      "services", "config_overrides", "seed",                 "agent_on_master", "deactivate_key"};
  return fields;
}

class Checker {
 public:
  explicit Checker(const json& doc) : doc_(doc) {}

  void fail(std::string path, std::string message) { issues.push_back({std::move(path), std::move(message)}); }

  const json* field(const char* name, bool required) {
    auto it = doc_.find(name);
    if (it == doc_.end()) {
      if (required) fail(std::string(".") + name, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  void string_field(const char* name, std::string& out, bool required) {
    const json* v = field(name, required);
    if (v == nullptr) return;
    if (!v->is_string() || v->get<std::string>().empty()) {
      fail(std::string(".") + name, "expected non-empty string");
      return;
    }
    out = v->get<std::string>();
  }

  void bool_field(const char* name, bool& out) {
    const json* v = field(name, false);
    if (v == nullptr) return;
    if (!v->is_boolean()) {
      fail(std::string(".") + name, "expected boolean");
      return;
    }
    out = v->get<bool>();
  }

  std::vector<SpecIssue> issues;

 private:
  const json& doc_;
};

}  // namespace

SpecValidation validate_spec(std::string_view document, const ServiceCatalog& catalog) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) return std::vector<SpecIssue>{{"", "not valid JSON"}};
  if (!doc.is_object()) return std::vector<SpecIssue>{{"", "expected a JSON object"}};

  ClusterSpec spec;
  Checker c(doc);
  for (const auto& [key, value] : doc.items()) {
    if (!known_fields().contains(key)) c.fail("." + key, "unknown field");
  }

  if (const json* v = c.field("version", true)) {
    if (!v->is_number_integer() || v->get<std::int64_t>() != kSpecVersion) {
      c.fail(".version", "unsupported version (expected 1)");
    }
  }
  c.string_field("region", spec.region, true);
  c.string_field("master_instance_type", spec.master_instance_type, false);
  c.string_field("slave_instance_type", spec.slave_instance_type, false);

  if (const json* v = c.field("slave_count", false)) {
    if (!v->is_number_integer()) {
      c.fail(".slave_count", "expected integer");
    } else if (v->get<std::int64_t>() < 0) {
      c.fail(".slave_count", "must be >= 0");
    } else if (v->get<std::int64_t>() > 10000) {
      c.fail(".slave_count", "too large");
    } else {
      spec.slave_count = v->get<int>();
    }
  }

  if (const json* v = c.field("services", false)) {
    if (!v->is_array()) {
      c.fail(".services", "expected array of service names");
    } else {
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string path = ".services[" + std::to_string(i) + "]";
        const json& s = (*v)[i];
        if (!s.is_string()) {
          c.fail(path, "expected string");
        } else if (catalog.find(s.get<std::string>()) == nullptr) {
          c.fail(path, "unknown service '" + s.get<std::string>() + "'");
        } else if (std::find(spec.services.begin(), spec.services.end(), s.get<std::string>()) != spec.services.end()) {
          c.fail(path, "duplicate service");
        } else {
          spec.services.push_back(s.get<std::string>());
        }
      }
    }
  }

  if (const json* v = c.field("config_overrides", false)) {
    if (!v->is_object()) {
      c.fail(".config_overrides", "expected object");
    } else {
      for (const auto& [key, value] : v->items()) {
        const std::string path = ".config_overrides." + key;
        const auto dot = key.find('.');
        if (!value.is_string()) {
          c.fail(path, "expected string value");
        } else if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
          c.fail(path, "key must be <service>.<parameter>");
        } else if (catalog.find(key.substr(0, dot)) == nullptr) {
          c.fail(path, "unknown service '" + key.substr(0, dot) + "'");
        } else {
          spec.config_overrides[key] = value.get<std::string>();
        }
      }
    }
  }

  if (const json* v = c.field("seed", false)) {
    if (!v->is_number_unsigned()) {
      c.fail(".seed", "expected non-negative integer");
    } else {
      spec.seed = v->get<std::uint64_t>();
    }
  }
  c.bool_field("agent_on_master", spec.agent_on_master);
  c.bool_field("deactivate_key", spec.deactivate_key);

  if (!c.issues.empty()) return c.issues;
  return spec;
}

std::string to_document(const ClusterSpec& spec) {
  json j = {{"version", spec.version},
            {"region", spec.region},
            {"master_instance_type", spec.master_instance_type},
            {"slave_count", spec.slave_count},
            {"slave_instance_type", spec.slave_instance_type},
            {"services", spec.services},
            {"config_overrides", spec.config_overrides},
            {"seed", spec.seed},
            {"agent_on_master", spec.agent_on_master},
            {"deactivate_key", spec.deactivate_key}};
  return j.dump(2) + "\n";
}

ClusterSpec export_spec(const ClusterRegistry::Record& cluster, const ServiceManager::ServerState* server,
                        const std::string& master_instance_type, const std::string& slave_instance_type) {
  if (cluster.state.phase != Phase::kReady) {
    throw Error(ErrorCode::kClusterNotReady, std::string(to_string(cluster.state.phase)));
  }
  ClusterSpec spec;
  spec.region = cluster.state.region;
  spec.master_instance_type = master_instance_type;
  spec.slave_count = static_cast<int>(cluster.state.hostname_map.slave_ids().size());
  spec.slave_instance_type = slave_instance_type;
  if (server != nullptr) {
    spec.services = server->services;
    spec.config_overrides = server->overrides;
  }
  spec.seed = cluster.config.seed;
  spec.agent_on_master = cluster.config.agent_on_master;
  spec.deactivate_key = cluster.config.deactivate_key_after_discovery;
  return spec;
}

}  // namespace insta
