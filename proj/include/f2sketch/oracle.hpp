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

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "f2sketch/types.hpp"

namespace f2sketch {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact frequency of every element that occurs in a stream.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(std::span<const ElementId> stream);

  void add(ElementId x, std::uint64_t count = 1);

  std::uint64_t total() const { return total_; }
  std::size_t distinct() const { return frequencies_.size(); }
  std::uint64_t frequency(ElementId x) const;
  const std::unordered_map<ElementId, std::uint64_t>& frequencies() const { return frequencies_; }

  /// Frequencies in non-increasing order.
  std::vector<std::uint64_t> sorted_frequencies() const;

 private:
  std::unordered_map<ElementId, std::uint64_t> frequencies_;
  std::uint64_t total_ = 0;
};

Histogram histogram(std::span<const ElementId> stream);

inline constexpr unsigned kMaxMomentOrder = 8;

/// F_p = sum_x f_x^p. F_0 is the number of distinct elements, F_1 = n.
/// Throws std::invalid_argument for p > 8.
BigInt exact_moment(const Histogram& h, unsigned p);

/// F2 in native 128-bit arithmetic; exact for n < 2^62.
Wide exact_f2(const Histogram& h);
/// F4 in native 128-bit arithmetic; exact for n < 2^31.
Wide exact_f4(const Histogram& h);

struct ExhaustiveMoments {
  Rational mean;
  Rational variance;
  std::uint64_t assignments = 0;
};

/// Mean and variance of sum_i A[i]^2 over every bucket/sign assignment of
/// the given frequencies, i.e. under truly random hashing. Exact.
/// Throws std::invalid_argument if P == 0 or P^u * 2^u > 10^7.
ExhaustiveMoments exhaustive_sketch_moments(std::span<const std::uint64_t> frequencies,
                                            std::uint64_t bucket_count);

/// (2/P) * (F2^2 - F4) for the given frequencies.
Rational predicted_variance(std::span<const std::uint64_t> frequencies, std::uint64_t bucket_count);

}  // namespace f2sketch
