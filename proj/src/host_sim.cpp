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

#include "instacluster/host_sim.hpp"

#include "instacluster/error.hpp"
#include "instacluster/keys.hpp"

namespace insta {
namespace {

constexpr char kRootUser[] = "root";

}  // namespace

std::string hosts_file_text(const std::vector<HostsEntry>& entries) {
  std::string out = "127.0.0.1 localhost\n";
  for (const auto& e : entries) {
    out += e.ip;
    out += ' ';
    out += e.hostname;
    out += '\n';
  }
  return out;
}

HostFleet::HostFleet(Trace& trace, HostFleetOptions options)
    : trace_(trace), options_(std::move(options)) {}

HostFleet::Host& HostFleet::host(const std::string& host_id) const {
  std::lock_guard lock(mu_);
  auto it = hosts_.find(host_id);
  if (it == hosts_.end()) throw Error(ErrorCode::kHostUnreachable, host_id);
  return *it->second;
}

HostFleet::Host& HostFleet::ensure_host(const std::string& host_id) {
  std::lock_guard lock(mu_);
  auto& slot = hosts_[host_id];
  if (!slot) {
    slot = std::make_unique<Host>();
    slot->state.instance_id = host_id;
    // Image baseline: the key-only login user exists from first boot.
    slot->state.users[options_.cluster_user] =
        UserAccount{options_.cluster_user, std::nullopt, {}, slot->next_incarnation++};
  }
  return *slot;
}

void HostFleet::check_session_locked(const Host& h, const RemoteSession& s) const {
  if (!h.state.running || s.boot_epoch_ != h.boot_epoch) {
    throw Error(ErrorCode::kInvalidSession, s.host_id_ + " restarted or stopped");
  }
  if (s.user_ == kRootUser) return;
  auto it = h.state.users.find(s.user_);
  if (it == h.state.users.end() || it->second.incarnation != s.incarnation_) {
    throw Error(ErrorCode::kInvalidSession, s.user_ + "@" + s.host_id_ + " no longer exists");
  }
}

UserAccount& HostFleet::user_locked(Host& h, const std::string& name) const {
  auto it = h.state.users.find(name);
  if (it == h.state.users.end()) throw Error(ErrorCode::kUnknownUser, name + "@" + h.state.instance_id);
  return it->second;
}

void HostFleet::on_boot(const std::string& host_id, const std::string& user_data) {
  Host& h = ensure_host(host_id);
  {
    std::lock_guard lock(h.mu);
    h.state.running = true;
    h.state.boot_error.reset();
    h.state.boot_error_message.clear();
    ++h.state.boot_count;
    ++h.boot_epoch;
  }
  trace_.record("host.boot", {{"id", host_id}});
  try {
    const UserData data = parse_user_data(user_data);
    if (handler_ != nullptr) {
      if (data.role == Role::kMaster) {
        handler_->on_master_boot(host_id, data);
      } else {
        handler_->on_slave_boot(host_id, data);
      }
    }
  } catch (const Error& e) {
    {
      std::lock_guard lock(h.mu);
      h.state.boot_error = e.code();
      h.state.boot_error_message = e.what();
    }
    trace_.record("host.boot_failed", {{"id", host_id}, {"error", std::string(error_name(e.code()))}});
  }
}

void HostFleet::on_stop(const std::string& host_id) {
  Host& h = host(host_id);
  std::lock_guard lock(h.mu);
  h.state.running = false;
  h.state.daemons.clear();
  ++h.boot_epoch;
}

RemoteSession HostFleet::authenticate(const std::string& host_id, const std::string& user,
                                      const LoginCredential& credential) {
  Host& h = host(host_id);
  std::lock_guard lock(h.mu);
  if (!h.state.running) throw Error(ErrorCode::kHostUnreachable, host_id);
  auto it = h.state.users.find(user);
  if (it == h.state.users.end()) throw Error(ErrorCode::kAuthFailed, user + "@" + host_id);
  const UserAccount& acct = it->second;
  const bool ok = std::visit(
      [&](const auto& cred) {
        using T = std::decay_t<decltype(cred)>;
        if constexpr (std::is_same_v<T, PasswordCredential>) {
          return acct.password.has_value() && *acct.password == cred.password;
        } else {
          const std::string pub = public_key_of(cred.private_key);
          return !pub.empty() && acct.authorized_public_keys.contains(pub);
        }
      },
      credential);
  if (!ok) throw Error(ErrorCode::kAuthFailed, user + "@" + host_id);
  return RemoteSession(host_id, user, h.boot_epoch, acct.incarnation);
}

RemoteSession HostFleet::open_local(const std::string& host_id) {
  Host& h = host(host_id);
  std::lock_guard lock(h.mu);
  if (!h.state.running) throw Error(ErrorCode::kHostUnreachable, host_id);
  return RemoteSession(host_id, kRootUser, h.boot_epoch, 0);
}

void HostFleet::create_user(const std::string& host_id, const std::string& name,
                            const std::string& password) {
  Host& h = host(host_id);
  {
    std::lock_guard lock(h.mu);
    if (name == kRootUser || h.state.users.contains(name)) {
      throw Error(ErrorCode::kUserExists, name + "@" + host_id);
    }
    h.state.users[name] = UserAccount{name, password, {}, h.next_incarnation++};
  }
  trace_.record("host.user_created", {{"id", host_id}, {"user", name}});
}

void HostFleet::delete_user(const RemoteSession& session, const std::string& name) {
  Host& h = host(session.host_id());
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    if (h.state.users.erase(name) == 0) {
      throw Error(ErrorCode::kUnknownUser, name + "@" + session.host_id());
    }
  }
  trace_.record("host.user_deleted", {{"id", session.host_id()}, {"user", name}});
}

void HostFleet::install_authorized_key(const RemoteSession& session, const std::string& user,
                                       const std::string& public_key) {
  Host& h = host(session.host_id());
  bool added = false;
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    added = user_locked(h, user).authorized_public_keys.insert(public_key).second;
  }
  if (added) {
    trace_.record("host.key_installed", {{"id", session.host_id()}, {"user", user}, {"key", public_key}});
  }
}

void HostFleet::revoke_authorized_key(const RemoteSession& session, const std::string& user,
                                      const std::string& public_key) {
  Host& h = host(session.host_id());
  bool removed = false;
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    removed = user_locked(h, user).authorized_public_keys.erase(public_key) > 0;
  }
  if (removed) {
    trace_.record("host.key_revoked", {{"id", session.host_id()}, {"user", user}, {"key", public_key}});
  }
}

void HostFleet::write_hosts_file(const RemoteSession& session, const std::vector<HostsEntry>& entries) {
  std::set<std::string> names;
  for (const auto& e : entries) {
    if (e.hostname.empty() || e.ip.empty() || !names.insert(e.hostname).second) {
      throw Error(ErrorCode::kInvalidArgument, "bad or duplicate hosts entry '" + e.hostname + "'");
    }
  }
  Host& h = host(session.host_id());
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    h.state.hosts_file = entries;
  }
  trace_.record("host.hosts_written",
                {{"id", session.host_id()}, {"entries", std::to_string(entries.size())}});
}

std::vector<HostsEntry> HostFleet::read_hosts_file(const RemoteSession& session) const {
  Host& h = host(session.host_id());
  std::lock_guard lock(h.mu);
  check_session_locked(h, session);
  return h.state.hosts_file;
}

void HostFleet::set_hostname(const RemoteSession& session, const std::string& hostname) {
  Host& h = host(session.host_id());
  std::lock_guard lock(h.mu);
  check_session_locked(h, session);
  h.state.hostname = hostname;
}

void HostFleet::install_component(const RemoteSession& session, const std::string& component) {
  Host& h = host(session.host_id());
  bool added = false;
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    added = h.state.components.insert(component).second;
    if (component == kAgentComponent) h.state.agent_version = kAgentVersion;
  }
  if (added) trace_.record("host.installed", {{"id", session.host_id()}, {"component", component}});
}

void HostFleet::start_component(const RemoteSession& session, const std::string& component) {
  Host& h = host(session.host_id());
  bool started = false;
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    if (!h.state.components.contains(component)) {
      throw Error(ErrorCode::kNotInstalled, component + "@" + session.host_id());
    }
    started = h.state.daemons.insert(component).second;
  }
  if (started) trace_.record("host.started", {{"id", session.host_id()}, {"component", component}});
}

void HostFleet::stop_component(const RemoteSession& session, const std::string& component) {
  Host& h = host(session.host_id());
  bool stopped = false;
  {
    std::lock_guard lock(h.mu);
    check_session_locked(h, session);
    if (!h.state.components.contains(component)) {
      throw Error(ErrorCode::kNotInstalled, component + "@" + session.host_id());
    }
    stopped = h.state.daemons.erase(component) > 0;
  }
  if (stopped) trace_.record("host.stopped", {{"id", session.host_id()}, {"component", component}});
}

void HostFleet::configure_service(const RemoteSession& session, const std::string& service,
                                  const std::map<std::string, std::string>& params) {
  Host& h = host(session.host_id());
  std::lock_guard lock(h.mu);
  check_session_locked(h, session);
  auto& cfg = h.state.service_config[service];
  for (const auto& [k, v] : params) cfg[k] = v;
}

bool HostFleet::has_host(const std::string& host_id) const {
  std::lock_guard lock(mu_);
  return hosts_.contains(host_id);
}

HostState HostFleet::inspect(const std::string& host_id) const {
  Host& h = host(host_id);
  std::lock_guard lock(h.mu);
  return h.state;
}

std::vector<std::string> HostFleet::host_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, h] : hosts_) out.push_back(id);
  return out;
}

}  // namespace insta
