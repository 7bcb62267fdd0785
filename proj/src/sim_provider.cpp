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

#include "instacluster/sim_provider.hpp"

#include <algorithm>
#include <cstdio>

#include "instacluster/error.hpp"
#include "mix.hpp"

namespace insta {
namespace {

constexpr std::uint32_t kAddressSpace = 254u * 256u;  // 10.0.0.0/16 minus .0/.255 hosts
constexpr std::uint32_t kOffsetRange = 4096;

std::string address_at(std::uint32_t index) {
  return "10.0." + std::to_string(index / 254) + "." + std::to_string(index % 254 + 1);
}

std::string instance_name(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "i-%08llx", static_cast<unsigned long long>(n));
  return buf;
}

bool well_formed_region(const std::string& region) {
  return !region.empty() && std::all_of(region.begin(), region.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

}  // namespace

std::string_view to_string(InstanceState state) noexcept {
  switch (state) {
    case InstanceState::kPending: return "pending";
    case InstanceState::kRunning: return "running";
    case InstanceState::kStopped: return "stopped";
    case InstanceState::kTerminated: return "terminated";
  }
  return "unknown";
}

bool InstanceFilter::matches(const Instance& instance) const {
  if (instance.region != region) return false;
  if (!states.empty() && !states.contains(instance.state)) return false;
  if (image_id && instance.image_id != *image_id) return false;
  for (const auto& pred : tags) {
    auto it = instance.tags.find(pred.key);
    if (it == instance.tags.end()) return false;
    if (pred.value && it->second != *pred.value) return false;
  }
  return true;
}

SimProvider::SimProvider(SimClock& clock, Trace& trace, SimProviderOptions options)
    : clock_(clock), trace_(trace), options_(std::move(options)), rng_(options_.seed) {}

void SimProvider::register_credentials(const std::string& key_id, const std::string& secret) {
  std::lock_guard lock(mu_);
  accounts_[key_id] = Account{secret, true};
}

void SimProvider::check_credentials_locked(const Credentials& creds) const {
  auto it = accounts_.find(creds.key_id);
  if (it == accounts_.end() || it->second.secret != creds.secret || !it->second.active) {
    throw Error(ErrorCode::kInactiveCredentials, creds.key_id);
  }
}

void SimProvider::check_region(const std::string& region) const {
  if (!well_formed_region(region) ||
      (!options_.regions.empty() && !options_.regions.contains(region))) {
    throw Error(ErrorCode::kInvalidRegion, region);
  }
}

SimProvider::Record& SimProvider::find_locked(const std::string& instance_id) {
  auto it = instances_.find(instance_id);
  if (it == instances_.end()) throw Error(ErrorCode::kUnknownInstance, instance_id);
  return it->second;
}

std::string SimProvider::allocate_ip_locked(const std::string& region) {
  auto [it, inserted] = next_address_.try_emplace(region, 0);
  if (inserted) {
    it->second = static_cast<std::uint32_t>(
        detail::splitmix64(options_.seed ^ detail::fnv1a(region)) % kOffsetRange);
  }
  if (it->second >= kAddressSpace) throw Error(ErrorCode::kInternal, "address space exhausted");
  return address_at(it->second++);
}

Seconds SimProvider::draw_boot_delay_locked() {
  if (options_.max_boot_delay <= 0) return 0;
  return static_cast<Seconds>(rng_() % static_cast<std::uint64_t>(options_.max_boot_delay + 1));
}

void SimProvider::promote(const std::string& instance_id, std::uint64_t epoch) {
  std::string user_data;
  {
    std::lock_guard lock(mu_);
    auto it = instances_.find(instance_id);
    if (it == instances_.end() || it->second.boot_epoch != epoch ||
        it->second.instance.state != InstanceState::kPending) {
      return;
    }
    it->second.instance.state = InstanceState::kRunning;
    user_data = it->second.instance.user_data;
    trace_.record("provider.running",
                  {{"id", instance_id}, {"ip", it->second.instance.private_ip}});
  }
  if (boot_hook_) boot_hook_(instance_id, user_data);
}

void SimProvider::boot_or_schedule(const std::vector<std::pair<std::string, std::uint64_t>>& booting,
                                   const std::vector<Seconds>& delays) {
  for (std::size_t i = 0; i < booting.size(); ++i) {
    const auto& [id, epoch] = booting[i];
    if (delays[i] == 0) {
      promote(id, epoch);
    } else {
      clock_.schedule_at(clock_.now() + delays[i], [this, id, epoch] { promote(id, epoch); });
    }
  }
}

std::vector<std::string> SimProvider::launch_instances(const Credentials& creds,
                                                       const std::string& region,
                                                       const std::string& image_id,
                                                       const std::string& instance_type,
                                                       int count,
                                                       const std::string& user_data) {
  std::vector<std::string> ids;
  std::vector<std::pair<std::string, std::uint64_t>> booting;
  std::vector<Seconds> delays;
  {
    std::lock_guard lock(mu_);
    check_credentials_locked(creds);
    check_region(region);
    if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
    if (image_id.empty() || instance_type.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "image and instance type required");
    }
    for (int n = 0; n < count; ++n) {
      Record rec;
      rec.instance.launch_seq = ++launch_counter_;
      rec.instance.id = instance_name(rec.instance.launch_seq);
      rec.instance.region = region;
      rec.instance.image_id = image_id;
      rec.instance.instance_type = instance_type;
      rec.instance.state = InstanceState::kPending;
      rec.instance.private_ip = allocate_ip_locked(region);
      rec.instance.user_data = user_data;
      rec.reserved_ip = rec.instance.private_ip;
      rec.boot_epoch = 1;
      trace_.record("provider.launch", {{"id", rec.instance.id},
                                        {"region", region},
                                        {"type", instance_type},
                                        {"ip", rec.instance.private_ip}});
      ids.push_back(rec.instance.id);
      booting.emplace_back(rec.instance.id, rec.boot_epoch);
      delays.push_back(draw_boot_delay_locked());
      instances_.emplace(rec.instance.id, std::move(rec));
    }
  }
  boot_or_schedule(booting, delays);
  return ids;
}

std::vector<Instance> SimProvider::describe_instances(const Credentials& creds,
                                                      const InstanceFilter& filter) {
  std::lock_guard lock(mu_);
  check_credentials_locked(creds);
  std::vector<Instance> out;
  for (const auto& [id, rec] : instances_) {
    if (filter.matches(rec.instance)) out.push_back(rec.instance);
  }
  std::sort(out.begin(), out.end(),
            [](const Instance& a, const Instance& b) { return a.launch_seq < b.launch_seq; });
  return out;
}

void SimProvider::tag_instance(const Credentials& creds, const std::string& instance_id,
                               const std::string& key, const std::string& value) {
  std::lock_guard lock(mu_);
  check_credentials_locked(creds);
  Record& rec = find_locked(instance_id);
  if (rec.instance.state == InstanceState::kTerminated) {
    throw Error(ErrorCode::kUnknownInstance, instance_id + " is terminated");
  }
  rec.instance.tags[key] = value;
  trace_.record("provider.tag", {{"id", instance_id}, {"key", key}, {"value", value}});
}

void SimProvider::stop_instance(const Credentials& creds, const std::string& instance_id) {
  {
    std::lock_guard lock(mu_);
    check_credentials_locked(creds);
    Record& rec = find_locked(instance_id);
    if (rec.instance.state != InstanceState::kRunning) {
      throw Error(ErrorCode::kInvalidTransition,
                  instance_id + " " + std::string(to_string(rec.instance.state)) + "->stopped");
    }
    rec.instance.state = InstanceState::kStopped;
    rec.instance.private_ip.clear();
    ++rec.boot_epoch;
    trace_.record("provider.stop", {{"id", instance_id}});
  }
  if (stop_hook_) stop_hook_(instance_id);
}

void SimProvider::start_instance(const Credentials& creds, const std::string& instance_id) {
  std::vector<std::pair<std::string, std::uint64_t>> booting;
  std::vector<Seconds> delays;
  {
    std::lock_guard lock(mu_);
    check_credentials_locked(creds);
    Record& rec = find_locked(instance_id);
    if (rec.instance.state != InstanceState::kStopped) {
      throw Error(ErrorCode::kInvalidTransition,
                  instance_id + " " + std::string(to_string(rec.instance.state)) + "->running");
    }
    if (!options_.stable_ips) rec.reserved_ip = allocate_ip_locked(rec.instance.region);
    rec.instance.private_ip = rec.reserved_ip;
    rec.instance.state = InstanceState::kPending;
    ++rec.boot_epoch;
    trace_.record("provider.start", {{"id", instance_id}, {"ip", rec.instance.private_ip}});
    booting.emplace_back(instance_id, rec.boot_epoch);
    delays.push_back(draw_boot_delay_locked());
  }
  boot_or_schedule(booting, delays);
}

void SimProvider::terminate_instance(const Credentials& creds, const std::string& instance_id) {
  bool was_running = false;
  {
    std::lock_guard lock(mu_);
    check_credentials_locked(creds);
    Record& rec = find_locked(instance_id);
    if (rec.instance.state == InstanceState::kTerminated) {
      throw Error(ErrorCode::kInvalidTransition, instance_id + " already terminated");
    }
    was_running = rec.instance.state == InstanceState::kRunning;
    rec.instance.state = InstanceState::kTerminated;
    rec.instance.private_ip.clear();
    ++rec.boot_epoch;
    trace_.record("provider.terminate", {{"id", instance_id}});
  }
  if (was_running && stop_hook_) stop_hook_(instance_id);
}

void SimProvider::deactivate_credentials(const std::string& key_id) {
  std::lock_guard lock(mu_);
  auto it = accounts_.find(key_id);
  if (it == accounts_.end()) throw Error(ErrorCode::kUnknownKey, key_id);
  if (it->second.active) trace_.record("provider.deactivate", {{"key_id", key_id}});
  it->second.active = false;
}

std::optional<Instance> SimProvider::inspect(const std::string& instance_id) const {
  std::lock_guard lock(mu_);
  auto it = instances_.find(instance_id);
  if (it == instances_.end()) return std::nullopt;
  return it->second.instance;
}

std::vector<Instance> SimProvider::all_instances() const {
  std::lock_guard lock(mu_);
  std::vector<Instance> out;
  for (const auto& [id, rec] : instances_) out.push_back(rec.instance);
  std::sort(out.begin(), out.end(),
            [](const Instance& a, const Instance& b) { return a.launch_seq < b.launch_seq; });
  return out;
}

bool SimProvider::credentials_active(const std::string& key_id) const {
  std::lock_guard lock(mu_);
  auto it = accounts_.find(key_id);
  return it != accounts_.end() && it->second.active;
}

}  // namespace insta
