// Copyright 2026 The drugresp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRUGRESP_SEEDS_HPP_
#define DRUGRESP_SEEDS_HPP_

#include <cstdint>
#include <string_view>

namespace drugresp {

// Expands a top-level seed into an independent per-purpose stream seed
// ("split", "init", "dropout", "shuffle", "lodo", ...). Streams for different
// purposes do not depend on one another.
std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose);

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                                 std::uint64_t index) {
  return derive_seed(derive_seed(root, purpose) ^ (index * 0x9E3779B97F4A7C15ULL), "index");
}

}  // namespace drugresp

#endif  // DRUGRESP_SEEDS_HPP_
