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
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace insta {

enum class InstanceState { kPending, kRunning, kStopped, kTerminated };

std::string_view to_string(InstanceState state) noexcept;

// Credentials presented with an authenticated provider call.
struct Credentials {
  std::string key_id;
  std::string secret;
};

struct Instance {
  std::string id;
  std::string region;
  std::string image_id;
  std::string instance_type;
  InstanceState state = InstanceState::kPending;
  std::string private_ip;  // empty while stopped or terminated
  std::uint64_t launch_seq = 0;
  std::map<std::string, std::string> tags;
  std::string user_data;

  bool operator==(const Instance&) const = default;
};

// A tag predicate with no value only requires the key to be present.
struct TagPredicate {
  std::string key;
  std::optional<std::string> value;
};

// Empty `states`, no `image_id` and no tag predicates match every instance in
// the region.
struct InstanceFilter {
  std::string region;
  std::set<InstanceState> states;
  std::optional<std::string> image_id;
  std::vector<TagPredicate> tags;

  bool matches(const Instance& instance) const;
};

// IaaS provider surface used by the provisioning protocol. The simulator is the
// only implementation shipped; a real cloud adapter would implement this too.
// All calls are linearizable.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual std::vector<std::string> launch_instances(const Credentials& creds,
                                                    const std::string& region,
                                                    const std::string& image_id,
                                                    const std::string& instance_type,
                                                    int count,
                                                    const std::string& user_data) = 0;

  // Sorted by launch_seq.
  virtual std::vector<Instance> describe_instances(const Credentials& creds,
                                                   const InstanceFilter& filter) = 0;

  virtual void tag_instance(const Credentials& creds, const std::string& instance_id,
                            const std::string& key, const std::string& value) = 0;

  virtual void stop_instance(const Credentials& creds, const std::string& instance_id) = 0;
  virtual void start_instance(const Credentials& creds, const std::string& instance_id) = 0;
  virtual void terminate_instance(const Credentials& creds, const std::string& instance_id) = 0;

  // Idempotent.
  virtual void deactivate_credentials(const std::string& key_id) = 0;
};

}  // namespace insta
