// Copyright 2026 The bayespc Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bayespc {

/// Full binary assignment, indexed by global variable id.
using Assignment = std::vector<std::uint8_t>;

/// Partial assignment indexed by global variable id: 0, 1, or kUnobserved.
/// Ids past the end of the vector are unobserved.
using Evidence = std::vector<std::int8_t>;
inline constexpr std::int8_t kUnobserved = -1;

/// All randomness in the library flows through this generator type.
using Rng = std::mt19937_64;

/// Uniform draw in [0, 1) from the top 53 bits; unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool observed(const Evidence& e, int var) {
  return static_cast<std::size_t>(var) < e.size() && e[var] != kUnobserved;
}

}  // namespace bayespc
