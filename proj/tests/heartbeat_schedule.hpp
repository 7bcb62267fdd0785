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

// Seeded heartbeat schedules checked against a brute-force staleness oracle.
//
// A schedule provisions a small cluster, then interleaves clock advances of
// random length, heartbeat rounds, agent deaths (daemon stop or whole-host
// stop) and health queries. The oracle only remembers when rounds ran and
// when each agent died; it never looks at the monitor.

#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>

#include "instacluster/simulation.hpp"

namespace insta::testing {

struct ScheduleOutcome {
  long comparisons = 0;
  std::optional<std::string> mismatch;
};

inline ScheduleOutcome run_heartbeat_schedule(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SimulationOptions o;
  o.seed = seed;
  o.heartbeat_interval = 1 + static_cast<Seconds>(rng() % 15);
  Simulation sim(o);
  ClusterSpec spec;
  spec.region = "us-east-1";
  spec.slave_count = 1 + static_cast<int>(rng() % 4);
  spec.seed = seed;
  const ClusterState st = sim.provision(spec);
  const Seconds interval = o.heartbeat_interval;

  // Events are numbered so that a death and a round at the same instant are
  // still ordered. Provisioning ends with one round.
  long seq = 0;
  std::vector<std::pair<long, Seconds>> rounds = {{seq++, sim.clock().now()}};
  std::map<std::string, long> death;  // hostname -> event number
  std::vector<std::pair<std::string, std::string>> agents;  // (instance id, hostname)
  for (const auto& id : st.hostname_map.slave_ids()) agents.emplace_back(id, st.hostname_map.bindings.at(id));

  auto oracle = [&](const std::string& host, Seconds now) {
    std::optional<Seconds> last;
    for (const auto& [n, t] : rounds) {
      auto d = death.find(host);
      const bool alive = d == death.end() || n < d->second;
      if (alive && t <= now) last = t;
    }
    const bool stale = !last || now - *last > 3 * interval;
    return stale ? HealthStatus::kStale : HealthStatus::kHealthy;
  };

  ScheduleOutcome out;
  const int steps = 10 + static_cast<int>(rng() % 30);
  for (int step = 0; step < steps; ++step) {
    switch (rng() % 4) {
      case 0:
        sim.clock().advance(static_cast<Seconds>(rng() % (4 * interval + 3)));
        break;
      case 1:
        sim.services().heartbeat_round(spec.region);
        rounds.emplace_back(seq++, sim.clock().now());
        break;
      case 2: {
        const auto& [id, host] = agents[rng() % agents.size()];
        if (death.contains(host)) break;
        if (rng() % 2 == 0) {
          sim.hosts().stop_component(sim.hosts().open_local(id), kAgentComponent);
        } else {
          sim.provider().stop_instance(sim.operator_credentials(), id);
        }
        death[host] = seq++;
        break;
      }
      default:
        break;
    }
    const Seconds now = sim.clock().now();
    const auto health = sim.services().health(spec.region);
    for (const auto& h : health) {
      if (h.hostname == "master") continue;
      ++out.comparisons;
      const HealthStatus want = oracle(h.hostname, now);
      if (h.status != want) {
        out.mismatch = "seed " + std::to_string(seed) + " t=" + std::to_string(now) + " " + h.hostname +
                       " got " + std::string(to_string(h.status)) + " want " + std::string(to_string(want));
        return out;
      }
    }
  }
  return out;
}

}  // namespace insta::testing
