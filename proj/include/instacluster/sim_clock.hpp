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
#include <functional>
#include <map>
#include <utility>

namespace insta {

// Simulated time, in whole seconds since the start of a run.
using Seconds = std::int64_t;

// Discrete-event clock driving a single simulation run. Time only moves when
// a caller advances it; scheduled callbacks fire in (time, insertion) order.
// Callbacks may themselves advance the clock. Not thread-safe: one run, one
// thread.
class SimClock {
 public:
  Seconds now() const noexcept { return now_; }

  void schedule_at(Seconds at, std::function<void()> fn);

  void advance(Seconds dt);

  // Fires every pending event, moving time to each in turn.
  void run_until_idle();

  bool idle() const noexcept { return queue_.empty(); }

 private:
  bool fire_next_due(Seconds limit);

  Seconds now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::map<std::pair<Seconds, std::uint64_t>, std::function<void()>> queue_;
};

}  // namespace insta
