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

#include "instacluster/error.hpp"

namespace insta {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInactiveCredentials: return "InactiveCredentials";
    case ErrorCode::kInvalidRegion: return "InvalidRegion";
    case ErrorCode::kUnknownInstance: return "UnknownInstance";
    case ErrorCode::kInvalidTransition: return "InvalidTransition";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kAuthFailed: return "AuthFailed";
    case ErrorCode::kHostUnreachable: return "HostUnreachable";
    case ErrorCode::kUserExists: return "UserExists";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kNotInstalled: return "NotInstalled";
    case ErrorCode::kMalformedUserData: return "MalformedUserData";
    case ErrorCode::kDuplicateTagHostname: return "DuplicateTagHostname";
    case ErrorCode::kMissingIp: return "MissingIp";
    case ErrorCode::kClusterAlreadyExists: return "ClusterAlreadyExists";
    case ErrorCode::kDiscoveryTimeout: return "DiscoveryTimeout";
    case ErrorCode::kSlaveUnreachable: return "SlaveUnreachable";
    case ErrorCode::kBusyCluster: return "BusyCluster";
    case ErrorCode::kClusterNotReady: return "ClusterNotReady";
    case ErrorCode::kUnknownService: return "UnknownService";
    case ErrorCode::kStaleAgent: return "StaleAgent";
    case ErrorCode::kPortConflict: return "PortConflict";
    case ErrorCode::kServerUnreachable: return "ServerUnreachable";
    case ErrorCode::kNoCluster: return "NoCluster";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidSession: return "InvalidSession";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidMessage: return "InvalidMessage";
    case ErrorCode::kUnknownHost: return "UnknownHost";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace insta
