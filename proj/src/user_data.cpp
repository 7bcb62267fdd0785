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

#include "instacluster/user_data.hpp"

#include <charconv>
#include <map>

#include "instacluster/error.hpp"

namespace insta {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_bool(std::string_view key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::kMalformedUserData, std::string(key) + "=" + v);
}

template <typename T>
T parse_number(std::string_view key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kMalformedUserData, std::string(key) + "=" + v);
  }
  return out;
}

}  // namespace

UserData parse_user_data(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kMalformedUserData, "line without '=': " + std::string(line));
    }
    kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }

  UserData out;
  auto role = kv.find("role");
  if (role == kv.end()) throw Error(ErrorCode::kMalformedUserData, "missing role");
  if (role->second == "master") {
    out.role = Role::kMaster;
  } else if (role->second == "slave") {
    out.role = Role::kSlave;
  } else {
    throw Error(ErrorCode::kMalformedUserData, "unknown role " + role->second);
  }

  auto get = [&](std::string_view key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](std::string_view key) -> const std::string& {
    const std::string* v = get(key);
    if (v == nullptr || v->empty()) {
      throw Error(ErrorCode::kMalformedUserData, "missing " + std::string(key));
    }
    return *v;
  };

  out.access_key_id = require("access_key_id");
  if (out.role == Role::kMaster) {
    out.secret_key = require("secret_key");
    out.region = require("region");
    if (auto* v = get("deactivate_key")) out.deactivate_key = parse_bool("deactivate_key", *v);
    if (auto* v = get("expected_slaves")) out.expected_slaves = parse_number<int>("expected_slaves", *v);
    if (out.expected_slaves < 0) throw Error(ErrorCode::kMalformedUserData, "expected_slaves < 0");
    if (auto* v = get("seed")) out.seed = parse_number<std::uint64_t>("seed", *v);
    if (auto* v = get("agent_on_master")) out.agent_on_master = parse_bool("agent_on_master", *v);
  }
  return out;
}

std::string render_user_data(const UserData& data) {
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) {
    out.append(k);
    out.push_back('=');
    out.append(v);
    out.push_back('\n');
  };
  line("role", data.role == Role::kMaster ? "master" : "slave");
  line("access_key_id", data.access_key_id);
  if (data.role == Role::kMaster) {
    line("secret_key", data.secret_key);
    line("region", data.region);
    line("deactivate_key", data.deactivate_key ? "true" : "false");
    line("expected_slaves", std::to_string(data.expected_slaves));
    line("seed", std::to_string(data.seed));
    line("agent_on_master", data.agent_on_master ? "true" : "false");
  }
  return out;
}

}  // namespace insta
