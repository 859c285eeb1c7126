// Copyright 2026 The f2sketch Authors
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

#include <cmath>
#include <cstdint>
#include <string>

namespace f2sketch {

/// Universe element identifier. Richer keys are mapped to 64 bits upstream.
using ElementId = std::uint64_t;

/// Unsigned 128-bit accumulator for sums of squared counters.
__extension__ typedef unsigned __int128 Wide;

std::string to_string(Wide value);

inline double to_double(Wide value) { return static_cast<double>(value); }

/// Smallest integer >= value, treating values within a relative 1e-9 of an
/// integer as that integer. Parameters such as 4/eps^2 for eps = 0.1 land a
/// few ulps on either side of the intended integer.
inline std::uint64_t ceil_tolerant(double value) {
  const double nearest = std::nearbyint(value);
  if (std::fabs(value - nearest) <= 1e-9 * std::fmax(1.0, std::fabs(value))) {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::ceil(value));
}

/// Same tolerance policy as ceil_tolerant, rounding down.
inline std::uint64_t floor_tolerant(double value) {
  const double nearest = std::nearbyint(value);
  if (std::fabs(value - nearest) <= 1e-9 * std::fmax(1.0, std::fabs(value))) {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::floor(value));
}

}  // namespace f2sketch
