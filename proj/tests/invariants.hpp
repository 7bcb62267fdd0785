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

// Cluster invariant checks shared by the unit tests and the acceptance
// binary. Expectations are rebuilt from the provider's view of the world
// (Name tags and private IPs), never from the bootstrap code under test.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "instacluster/simulation.hpp"

namespace insta::testing {

struct Member {
  std::string id;
  std::string name;
  std::string ip;
};

// Running instances of `region`, master first and then slave-1, slave-2, ...
// ordered by the numeric suffix of their Name tag.
inline std::vector<Member> members_from_provider(Simulation& sim, const std::string& region) {
  std::vector<Member> out;
  for (const auto& i : sim.provider().all_instances()) {
    if (i.region != region || i.state != InstanceState::kRunning) continue;
    auto tag = i.tags.find("Name");
    out.push_back({i.id, tag == i.tags.end() ? "" : tag->second, i.private_ip});
  }
  auto rank = [](const std::string& name) -> long {
    if (name == "master") return 0;
    if (name.rfind("slave-", 0) == 0) return std::stol(name.substr(6));
    return 1L << 40;
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const Member& a, const Member& b) { return rank(a.name) < rank(b.name); });
  return out;
}

inline std::string expected_hosts_file(const std::vector<Member>& members) {
  std::string text = "127.0.0.1 localhost\n";
  for (const auto& m : members) text += m.ip + " " + m.name + "\n";
  return text;
}

// Every violated invariant of a ready cluster, as readable strings. Checks
// hostname tags, hosts-file consistency, post-provision cleanliness and key
// reachability.
inline std::vector<std::string> cluster_violations(Simulation& sim, const std::string& region) {
  std::vector<std::string> v;
  const auto rec = sim.registry().find(region);
  if (!rec) return {"no cluster in " + region};
  if (rec->state.phase != Phase::kReady) v.push_back("phase is " + std::string(to_string(rec->state.phase)));

  const auto members = members_from_provider(sim, region);
  const std::size_t n = members.size();
  if (n != rec->state.hostname_map.bindings.size()) {
    v.push_back("running instances " + std::to_string(n) + " != bindings " +
                std::to_string(rec->state.hostname_map.bindings.size()));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::string want = k == 0 ? "master" : "slave-" + std::to_string(k);
    if (members[k].name != want) v.push_back(members[k].id + " tagged '" + members[k].name + "', want " + want);
  }

  const std::string hosts = expected_hosts_file(members);
  const std::string user = sim.hosts().cluster_user();
  for (const auto& m : members) {
    const HostState h = sim.hosts().inspect(m.id);
    if (hosts_file_text(h.hosts_file) != hosts) v.push_back(m.name + ": hosts file differs");
    if (h.hosts_file.size() != n) v.push_back(m.name + ": hosts file entry count");
    if (h.hostname != m.name) v.push_back(m.name + ": hostname is '" + h.hostname + "'");
    for (const auto& [uname, acct] : h.users) {
      if (uname == "tmpuser") v.push_back(m.name + ": tmpuser present");
      if (acct.password) v.push_back(m.name + ": user " + uname + " has a password");
    }
    if (m.name == "master") continue;
    try {
      sim.hosts().authenticate(m.id, user, KeyCredential{rec->state.key.private_key});
    } catch (const Error& e) {
      v.push_back(m.name + ": cluster key rejected (" + e.what() + ")");
    }
    auto u = h.users.find(user);
    if (u == h.users.end() || u->second.authorized_public_keys.size() != 1) {
      v.push_back(m.name + ": expected exactly one authorized key");
    }
  }
  return v;
}

inline std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

inline ClusterSpec make_spec(const std::string& region, int slaves, std::vector<std::string> services = {},
                             std::uint64_t seed = 0) {
  ClusterSpec s;
  s.region = region;
  s.slave_count = slaves;
  s.services = std::move(services);
  s.seed = seed;
  return s;
}

}  // namespace insta::testing
