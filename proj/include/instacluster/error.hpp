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

#include <stdexcept>
#include <string>
#include <string_view>

namespace insta {

// Every failure the library can report. The numeric values are part of the
// C API (see instacluster.h) and must stay stable.
enum class ErrorCode : int {
  kOk = 0,
  kInactiveCredentials = 1,
  kInvalidRegion = 2,
  kUnknownInstance = 3,
  kInvalidTransition = 4,
  kUnknownKey = 5,
  kAuthFailed = 6,
  kHostUnreachable = 7,
  kUserExists = 8,
  kUnknownUser = 9,
  kNotInstalled = 10,
  kMalformedUserData = 11,
  kDuplicateTagHostname = 12,
  kMissingIp = 13,
  kClusterAlreadyExists = 14,
  kDiscoveryTimeout = 15,
  kSlaveUnreachable = 16,
  kBusyCluster = 17,
  kClusterNotReady = 18,
  kUnknownService = 19,
  kStaleAgent = 20,
  kPortConflict = 21,
  kServerUnreachable = 22,
  kNoCluster = 23,
  kInvalidSpec = 24,
  kInvalidSession = 25,
  kInvalidArgument = 26,
  kInvalidMessage = 27,
  kUnknownHost = 28,
  kInternal = 29,
};

inline constexpr int kErrorCodeCount = 30;

// Stable identifier, e.g. "ClusterAlreadyExists". Used in reports and traces.
std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}
  explicit Error(ErrorCode code) : Error(code, "") {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace insta
