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

#include "instacluster/keys.hpp"

#include <cstdio>

#include "instacluster/error.hpp"
#include "mix.hpp"

namespace insta {
namespace {

constexpr std::string_view kPrivatePrefix = "ic-priv-g";
constexpr std::string_view kPublicPrefix = "ic-pub-g";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

KeyPair generate_keypair(std::uint64_t seed, int generation) {
  if (generation < 1) throw Error(ErrorCode::kInvalidArgument, "key generation must be >= 1");
  const std::uint64_t a = detail::splitmix64(seed ^ detail::splitmix64(generation));
  const std::uint64_t b = detail::splitmix64(a);
  KeyPair kp;
  kp.generation = generation;
  kp.private_key = std::string(kPrivatePrefix) + std::to_string(generation) + "-" + hex64(a) + hex64(b);
  kp.public_key = public_key_of(kp.private_key);
  return kp;
}

std::string public_key_of(const std::string& private_key) {
  if (!private_key.starts_with(kPrivatePrefix)) return {};
  const auto dash = private_key.find('-', kPrivatePrefix.size());
  if (dash == std::string::npos) return {};
  const std::string generation = private_key.substr(kPrivatePrefix.size(), dash - kPrivatePrefix.size());
  return std::string(kPublicPrefix) + generation + "-" +
         hex64(detail::splitmix64(detail::fnv1a(private_key)));
}

}  // namespace insta
