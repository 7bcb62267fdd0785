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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "instacluster/bootstrap.hpp"
#include "instacluster/services.hpp"

namespace insta {

inline constexpr int kSpecVersion = 1;
inline constexpr char kDefaultInstanceType[] = "c4.xlarge";

// Everything needed to rebuild a cluster: the `.cluster.json` document.
struct ClusterSpec {
  int version = kSpecVersion;
  std::string region;
  std::string master_instance_type = kDefaultInstanceType;
  int slave_count = 0;
  std::string slave_instance_type = kDefaultInstanceType;
  std::vector<std::string> services;
  std::map<std::string, std::string> config_overrides;  // "<service>.<param>" -> value
  std::uint64_t seed = 0;
  bool agent_on_master = false;
  bool deactivate_key = false;

  bool operator==(const ClusterSpec&) const = default;
};

struct SpecIssue {
  std::string path;  // e.g. ".services[0]"
  std::string message;
  bool operator==(const SpecIssue&) const = default;
};

using SpecValidation = std::variant<ClusterSpec, std::vector<SpecIssue>>;

// Strict: unknown fields, wrong types and out-of-range values are all
// reported, each with its field path. Only `version` and `region` are
// required; everything else has the defaults above.
SpecValidation validate_spec(std::string_view document,
                             const ServiceCatalog& catalog = ServiceCatalog::standard());

// Pretty-printed JSON with every field present.
std::string to_document(const ClusterSpec& spec);

// Snapshot of a ready cluster. Throws ClusterNotReady otherwise.
ClusterSpec export_spec(const ClusterRegistry::Record& cluster, const ServiceManager::ServerState* server,
                        const std::string& master_instance_type, const std::string& slave_instance_type);

}  // namespace insta
