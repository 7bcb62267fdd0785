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
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "instacluster/error.hpp"
#include "instacluster/trace.hpp"
#include "instacluster/user_data.hpp"

namespace insta {

inline constexpr char kAgentComponent[] = "agent";
inline constexpr char kServerComponent[] = "server";
inline constexpr char kAgentVersion[] = "2.1.0";

struct PasswordCredential {
  std::string password;
};
struct KeyCredential {
  std::string private_key;
};
using LoginCredential = std::variant<PasswordCredential, KeyCredential>;

struct UserAccount {
  std::string name;
  std::optional<std::string> password;
  std::set<std::string> authorized_public_keys;
  std::uint64_t incarnation = 0;

  bool operator==(const UserAccount&) const = default;
};

struct HostsEntry {
  std::string ip;
  std::string hostname;

  bool operator==(const HostsEntry&) const = default;
};

// Bytes of /etc/hosts for the given cluster entries: a loopback line followed
// by one "<ip> <hostname>" line per entry, newline-terminated.
std::string hosts_file_text(const std::vector<HostsEntry>& entries);

// Everything on an instance's disk plus its live process state. Disk state
// (users, keys, hosts file, hostname, components, service config) survives a
// stop/start; daemons and sessions do not.
struct HostState {
  std::string instance_id;
  bool running = false;
  std::string hostname;
  std::map<std::string, UserAccount> users;
  std::vector<HostsEntry> hosts_file;
  std::set<std::string> components;
  std::set<std::string> daemons;
  std::map<std::string, std::map<std::string, std::string>> service_config;
  std::string agent_version;
  std::uint64_t boot_count = 0;
  std::optional<ErrorCode> boot_error;  // outcome of the most recent boot
  std::string boot_error_message;

  bool operator==(const HostState&) const = default;
};

// An authenticated shell on a host. Only HostFleet creates these; a session
// dies when the host stops or its user is deleted.
class RemoteSession {
 public:
  const std::string& host_id() const noexcept { return host_id_; }
  const std::string& user() const noexcept { return user_; }

 private:
  friend class HostFleet;
  RemoteSession(std::string host_id, std::string user, std::uint64_t boot_epoch,
                std::uint64_t incarnation)
      : host_id_(std::move(host_id)), user_(std::move(user)), boot_epoch_(boot_epoch),
        incarnation_(incarnation) {}

  std::string host_id_;
  std::string user_;
  std::uint64_t boot_epoch_;
  std::uint64_t incarnation_;
};

// Receives parsed user-data when a host boots.
class BootHandler {
 public:
  virtual ~BootHandler() = default;
  virtual void on_slave_boot(const std::string& host_id, const UserData& data) = 0;
  virtual void on_master_boot(const std::string& host_id, const UserData& data) = 0;
};

struct HostFleetOptions {
  std::string cluster_user = "ubuntu";
};

// Simulated operating systems for every instance, keyed by instance id.
// Mutations on one host are serialized.
class HostFleet {
 public:
  HostFleet(Trace& trace, HostFleetOptions options = {});

  const std::string& cluster_user() const noexcept { return options_.cluster_user; }
  void set_boot_handler(BootHandler* handler) { handler_ = handler; }

  // Provider hooks. on_boot parses user-data and dispatches by role; a
  // failure is recorded in HostState::boot_error rather than thrown.
  void on_boot(const std::string& host_id, const std::string& user_data);
  void on_stop(const std::string& host_id);

  RemoteSession authenticate(const std::string& host_id, const std::string& user,
                             const LoginCredential& credential);
  // Root shell for scripts running on the host itself.
  RemoteSession open_local(const std::string& host_id);

  void create_user(const std::string& host_id, const std::string& name, const std::string& password);
  void delete_user(const RemoteSession& session, const std::string& name);

  void install_authorized_key(const RemoteSession& session, const std::string& user,
                              const std::string& public_key);
  void revoke_authorized_key(const RemoteSession& session, const std::string& user,
                             const std::string& public_key);

  void write_hosts_file(const RemoteSession& session, const std::vector<HostsEntry>& entries);
  std::vector<HostsEntry> read_hosts_file(const RemoteSession& session) const;
  void set_hostname(const RemoteSession& session, const std::string& hostname);

  void install_component(const RemoteSession& session, const std::string& component);
  void start_component(const RemoteSession& session, const std::string& component);
  void stop_component(const RemoteSession& session, const std::string& component);
  void configure_service(const RemoteSession& session, const std::string& service,
                         const std::map<std::string, std::string>& params);

  // Introspection for tests and reports.
  bool has_host(const std::string& host_id) const;
  HostState inspect(const std::string& host_id) const;
  std::vector<std::string> host_ids() const;

 private:
  struct Host {
    mutable std::mutex mu;
    HostState state;
    std::uint64_t boot_epoch = 0;
    std::uint64_t next_incarnation = 1;
  };

  Host& host(const std::string& host_id) const;
  Host& ensure_host(const std::string& host_id);
  // Requires `h.mu` held.
  void check_session_locked(const Host& h, const RemoteSession& s) const;
  UserAccount& user_locked(Host& h, const std::string& name) const;

  Trace& trace_;
  HostFleetOptions options_;
  BootHandler* handler_ = nullptr;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Host>> hosts_;
};

}  // namespace insta
