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

#include "instacluster/sim_clock.hpp"

#include <algorithm>

#include "instacluster/error.hpp"

namespace insta {

void SimClock::schedule_at(Seconds at, std::function<void()> fn) {
  queue_.emplace(std::make_pair(std::max(at, now_), next_seq_++), std::move(fn));
}

bool SimClock::fire_next_due(Seconds limit) {
  if (queue_.empty() || queue_.begin()->first.first > limit) return false;
  auto node = queue_.extract(queue_.begin());
  now_ = std::max(now_, node.key().first);
  node.mapped()();
  return true;
}

void SimClock::advance(Seconds dt) {
  if (dt < 0) throw Error(ErrorCode::kInvalidArgument, "negative clock advance");
  const Seconds target = now_ + dt;
  while (fire_next_due(target)) {
  }
  // A callback may have advanced past `target` already.
  now_ = std::max(now_, target);
}

void SimClock::run_until_idle() {
  while (!queue_.empty()) {
    fire_next_due(queue_.begin()->first.first);
  }
}

}  // namespace insta
