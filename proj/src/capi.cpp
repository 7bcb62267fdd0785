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

#include "instacluster.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "instacluster/simulation.hpp"
#include "json.hpp"

struct ic_world {
  explicit ic_world(insta::SimulationOptions options) : sim(std::move(options)) {}
  insta::Simulation sim;
  std::string last_error;
};

namespace {

using nlohmann::json;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(ic_world* world, Fn&& fn) {
  if (world == nullptr) return IC_ERR_INVALID_ARGUMENT;
  try {
    fn();
    world->last_error.clear();
    return IC_OK;
  } catch (const insta::Error& e) {
    world->last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    world->last_error = e.what();
    return IC_ERR_INTERNAL;
  }
}

std::string required(const char* s, const char* what) {
  if (s == nullptr) throw insta::Error(insta::ErrorCode::kInvalidArgument, std::string(what) + " is null");
  return s;
}

}  // namespace

extern "C" {

const char* ic_version(void) { return "1.0.0"; }

const char* ic_status_name(int status) {
  if (status < 0 || status >= insta::kErrorCodeCount) return "Unknown";
  // error_name returns views of string literals, so data() is NUL-terminated.
  return insta::error_name(static_cast<insta::ErrorCode>(status)).data();
}

int ic_world_create(const ic_world_options* options, ic_world** out) {
  if (out == nullptr) return IC_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  insta::SimulationOptions o;
  if (options != nullptr) {
    o.seed = options->seed;
    if (options->access_key_id != nullptr) o.access_key_id = options->access_key_id;
    if (options->secret_key != nullptr) o.secret_key = options->secret_key;
    o.stable_ips = options->stable_ips != 0;
    o.max_boot_delay = options->max_boot_delay;
    if (o.max_boot_delay < 0 || o.access_key_id.empty()) return IC_ERR_INVALID_ARGUMENT;
  }
  try {
    *out = new ic_world(std::move(o));
  } catch (const std::exception&) {
    return IC_ERR_INTERNAL;
  }
  return IC_OK;
}

void ic_world_destroy(ic_world* world) { delete world; }

const char* ic_last_error(const ic_world* world) {
  return world == nullptr ? "null world" : world->last_error.c_str();
}

int ic_set_credentials(ic_world* world, const char* access_key_id, const char* secret_key) {
  return guarded(world, [&] {
    world->sim.set_operator_credentials({required(access_key_id, "access_key_id"), required(secret_key, "secret_key")});
  });
}

int ic_provision(ic_world* world, const char* spec_json) {
  return guarded(world, [&] {
    auto result = insta::validate_spec(required(spec_json, "spec"), world->sim.services().catalog());
    if (auto* issues = std::get_if<std::vector<insta::SpecIssue>>(&result)) {
      std::string detail;
      for (const auto& i : *issues) detail += (detail.empty() ? "" : "; ") + i.path + " " + i.message;
      throw insta::Error(insta::ErrorCode::kInvalidSpec, detail);
    }
    world->sim.provision(std::get<insta::ClusterSpec>(result));
  });
}

int ic_stop(ic_world* world, const char* region) {
  return guarded(world, [&] { world->sim.stop(required(region, "region")); });
}

int ic_start(ic_world* world, const char* region, char** report_json) {
  if (report_json != nullptr) *report_json = nullptr;
  return guarded(world, [&] {
    const insta::ReconcileReport r = world->sim.start(required(region, "region"));
    if (report_json == nullptr) return;
    json rebound = json::array();
    for (const auto& b : r.rebound) {
      rebound.push_back({{"instance_id", b.instance_id}, {"old_ip", b.old_ip}, {"new_ip", b.new_ip}});
    }
    *report_json = dup_string(json{{"rebound", rebound},
                                   {"new_key_generation", r.new_key_generation},
                                   {"hosts_files_rewritten", r.hosts_files_rewritten}}
                                  .dump());
  });
}

int ic_extend(ic_world* world, const char* region, int count, const char* instance_type) {
  return guarded(world, [&] {
    std::optional<std::string> type;
    if (instance_type != nullptr && *instance_type != '\0') type = instance_type;
    world->sim.extend(required(region, "region"), count, type);
  });
}

int ic_install(ic_world* world, const char* region, const char* services_csv) {
  return guarded(world, [&] {
    std::vector<std::string> services;
    const std::string csv = required(services_csv, "services");
    std::size_t start = 0;
    while (start <= csv.size()) {
      auto end = csv.find(',', start);
      if (end == std::string::npos) end = csv.size();
      std::string item = csv.substr(start, end - start);
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) services.push_back(item);
      start = end + 1;
    }
    if (services.empty()) throw insta::Error(insta::ErrorCode::kInvalidArgument, "no services given");
    world->sim.install(required(region, "region"), services);
  });
}

int ic_advance_clock(ic_world* world, int64_t seconds) {
  return guarded(world, [&] {
    if (seconds < 0) throw insta::Error(insta::ErrorCode::kInvalidArgument, "negative duration");
    world->sim.advance(seconds);
  });
}

int ic_status_report(ic_world* world, const char* region, char** text) {
  if (text == nullptr) return IC_ERR_INVALID_ARGUMENT;
  *text = nullptr;
  return guarded(world, [&] {
    *text = dup_string(insta::render_status(world->sim.status(required(region, "region"))));
  });
}

int ic_export_spec(ic_world* world, const char* region, char** spec_json) {
  if (spec_json == nullptr) return IC_ERR_INVALID_ARGUMENT;
  *spec_json = nullptr;
  return guarded(world, [&] {
    *spec_json = dup_string(insta::to_document(world->sim.export_spec(required(region, "region"))));
  });
}

int ic_validate_spec(const char* spec_json, char** issues_json) {
  if (issues_json != nullptr) *issues_json = nullptr;
  if (spec_json == nullptr) return IC_ERR_INVALID_ARGUMENT;
  try {
    auto result = insta::validate_spec(spec_json);
    json issues = json::array();
    if (auto* list = std::get_if<std::vector<insta::SpecIssue>>(&result)) {
      for (const auto& i : *list) issues.push_back({{"path", i.path}, {"message", i.message}});
    }
    if (issues_json != nullptr) *issues_json = dup_string(issues.dump());
    return issues.empty() ? IC_OK : IC_ERR_INVALID_SPEC;
  } catch (const std::exception&) {
    return IC_ERR_INTERNAL;
  }
}

int ic_trace(ic_world* world, char** text) {
  if (text == nullptr) return IC_ERR_INVALID_ARGUMENT;
  *text = nullptr;
  return guarded(world, [&] { *text = dup_string(world->sim.trace().text()); });
}

int ic_snapshot(ic_world* world, char** out) {
  if (out == nullptr) return IC_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(world, [&] { *out = dup_string(world->sim.snapshot().dump()); });
}

void ic_free(void* ptr) { std::free(ptr); }

}  // extern "C"
