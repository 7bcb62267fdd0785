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

#include <functional>
#include <mutex>
#include <random>

#include "instacluster/provider.hpp"
#include "instacluster/sim_clock.hpp"
#include "instacluster/trace.hpp"

namespace insta {

struct SimProviderOptions {
  std::uint64_t seed = 0;
  // Keep an instance's private IP across stop/start. Off by default, so every
  // restart hands out a fresh address.
  bool stable_ips = false;
  // When positive, each launch/start stays pending for a seeded random delay in
  // [0, max_boot_delay] simulated seconds before it runs.
  Seconds max_boot_delay = 0;
  // Allowed regions; empty accepts any well-formed name.
  std::set<std::string> regions;
};

// Deterministic in-memory IaaS. Private IPs come from a per-region counter in
// 10.0.0.0/16 whose starting point is derived from the seed; addresses are
// never reused within a run.
class SimProvider final : public Provider {
 public:
  using BootHook = std::function<void(const std::string& instance_id, const std::string& user_data)>;
  using StopHook = std::function<void(const std::string& instance_id)>;

  SimProvider(SimClock& clock, Trace& trace, SimProviderOptions options = {});

  // Simulator administration; no authentication.
  void register_credentials(const std::string& key_id, const std::string& secret);
  void set_boot_hook(BootHook hook) { boot_hook_ = std::move(hook); }
  void set_stop_hook(StopHook hook) { stop_hook_ = std::move(hook); }

  std::vector<std::string> launch_instances(const Credentials& creds, const std::string& region,
                                            const std::string& image_id,
                                            const std::string& instance_type, int count,
                                            const std::string& user_data) override;
  std::vector<Instance> describe_instances(const Credentials& creds,
                                           const InstanceFilter& filter) override;
  void tag_instance(const Credentials& creds, const std::string& instance_id,
                    const std::string& key, const std::string& value) override;
  void stop_instance(const Credentials& creds, const std::string& instance_id) override;
  void start_instance(const Credentials& creds, const std::string& instance_id) override;
  void terminate_instance(const Credentials& creds, const std::string& instance_id) override;
  void deactivate_credentials(const std::string& key_id) override;

  // Test-only introspection; bypasses credentials.
  std::optional<Instance> inspect(const std::string& instance_id) const;
  std::vector<Instance> all_instances() const;
  bool credentials_active(const std::string& key_id) const;
  const SimProviderOptions& options() const noexcept { return options_; }

 private:
  struct Account {
    std::string secret;
    bool active = true;
  };
  struct Record {
    Instance instance;
    std::string reserved_ip;  // remembered across stop when stable_ips
    std::uint64_t boot_epoch = 0;
  };

  void check_credentials_locked(const Credentials& creds) const;
  void check_region(const std::string& region) const;
  Record& find_locked(const std::string& instance_id);
  std::string allocate_ip_locked(const std::string& region);
  Seconds draw_boot_delay_locked();
  // Moves a pending instance to running and fires the boot hook. Called with
  // the lock released.
  void promote(const std::string& instance_id, std::uint64_t epoch);
  void boot_or_schedule(const std::vector<std::pair<std::string, std::uint64_t>>& booting,
                        const std::vector<Seconds>& delays);

  SimClock& clock_;
  Trace& trace_;
  SimProviderOptions options_;
  BootHook boot_hook_;
  StopHook stop_hook_;

  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::map<std::string, Account> accounts_;
  std::map<std::string, Record> instances_;
  std::map<std::string, std::uint32_t> next_address_;  // per region
  std::uint64_t launch_counter_ = 0;
};

}  // namespace insta
