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

#include "instacluster/trace.hpp"

namespace insta {

void Trace::record(std::string_view event, std::initializer_list<TraceField> fields) {
  std::string line = "t=" + std::to_string(clock_.now()) + " ";
  line.append(event);
  for (const auto& [key, value] : fields) {
    line.push_back(' ');
    line.append(key);
    line.push_back('=');
    line.append(value);
  }
  std::lock_guard lock(mu_);
  lines_.push_back(std::move(line));
}

std::vector<std::string> Trace::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

std::string Trace::text() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace insta
