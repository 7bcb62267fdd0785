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
#include <string>
#include <string_view>

namespace insta {

enum class Role { kMaster, kSlave };

// Launch-time parameters handed to an instance. Wire format is line-oriented
// `key=value` text; recognised keys are role, access_key_id, secret_key,
// region, deactivate_key, expected_slaves, seed and agent_on_master. Unknown
// keys and blank lines are ignored.
struct UserData {
  Role role = Role::kSlave;
  std::string access_key_id;
  std::string secret_key;
  std::string region;
  bool deactivate_key = false;
  int expected_slaves = 0;
  std::uint64_t seed = 0;
  bool agent_on_master = false;

  bool operator==(const UserData&) const = default;
};

// Throws MalformedUserData when the role is missing/unknown, a slave lacks
// access_key_id, a master lacks any of its required keys, or a numeric value
// does not parse.
UserData parse_user_data(std::string_view text);

// Slaves only carry role and access_key_id.
std::string render_user_data(const UserData& data);

}  // namespace insta
