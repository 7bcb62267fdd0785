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
#include <string>

namespace insta {

// Cluster-wide login credential. Tokens are opaque; only the protocol around
// them (generation, distribution, revocation) matters here.
struct KeyPair {
  std::string public_key;
  std::string private_key;
  int generation = 0;

  bool operator==(const KeyPair&) const = default;
};

// Deterministic in (seed, generation); different generations never collide.
// Throws InvalidArgument for generation < 1.
KeyPair generate_keypair(std::uint64_t seed, int generation);

// The public half that matches `private_key`. Returns an empty string for
// tokens that are not well-formed private keys.
std::string public_key_of(const std::string& private_key);

}  // namespace insta
