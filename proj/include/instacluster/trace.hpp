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

#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "instacluster/sim_clock.hpp"

namespace insta {

using TraceField = std::pair<std::string_view, std::string>;

// Append-only event log of a run. Each line is
//   t=<sim seconds> <event> key=value ...
// and depends only on simulated state, so identical runs give identical text.
class Trace {
 public:
  explicit Trace(const SimClock& clock) : clock_(clock) {}

  void record(std::string_view event, std::initializer_list<TraceField> fields = {});

  std::vector<std::string> lines() const;
  std::string text() const;

 private:
  const SimClock& clock_;
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
};

}  // namespace insta
