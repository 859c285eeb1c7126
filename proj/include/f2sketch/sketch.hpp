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

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "f2sketch/hashing.hpp"
#include "f2sketch/types.hpp"

namespace f2sketch {

/// Maximum number of updates a sketch accepts; keeps every counter and the
/// 128-bit estimate exact.
inline constexpr std::uint64_t kMaxItems = std::uint64_t{1} << 62;

/// P = ceil(4 / eps^2) + 1. Throws std::invalid_argument unless eps is in
/// (0, 1] and P <= 2^32.
std::uint64_t bucket_count_for(double epsilon);

/// Partition-based F2 sketch over any bucket/sign source.
///
/// Every element is routed to one of P counters by the bucket hash and adds
/// its sign there. The sum of squared counters is an unbiased estimate of F2
/// with variance (2/P)(F2^2 - F4).
template <BucketSignHash Hash>
class BasicPartitionSketch {
 public:
  explicit BasicPartitionSketch(Hash hash)
      : hash_(std::move(hash)), counters_(static_cast<std::size_t>(hash_.bucket_count()), 0) {}

  void update(ElementId x) {
    if (items_seen_ >= kMaxItems) throw std::overflow_error("sketch saw 2^62 items");
    counters_[static_cast<std::size_t>(hash_.bucket(x))] += hash_.sign(x);
    ++items_seen_;
  }

  template <typename Range>
  void update_all(const Range& elements) {
    for (ElementId x : elements) update(x);
  }

  /// Sum of squared counters, exact.
  Wide estimate() const {
    Wide total = 0;
    for (std::int64_t c : counters_) {
      const auto magnitude = static_cast<std::uint64_t>(c < 0 ? -c : c);
      total += static_cast<Wide>(magnitude) * magnitude;
    }
    return total;
  }

  /// Adds other's counters into this one. Both must share the same hash.
  void merge(const BasicPartitionSketch& other) {
    if (!(hash_ == other.hash_)) {
      throw std::invalid_argument("cannot merge sketches with different hash seeds or bucket counts");
    }
    if (items_seen_ > kMaxItems - other.items_seen_) {
      throw std::overflow_error("merged sketch would exceed 2^62 items");
    }
    for (std::size_t i = 0; i < counters_.size(); ++i) counters_[i] += other.counters_[i];
    items_seen_ += other.items_seen_;
  }

  std::span<const std::int64_t> counters() const { return counters_; }
  std::uint64_t items_seen() const { return items_seen_; }
  std::uint64_t bucket_count() const { return counters_.size(); }
  const Hash& hash() const { return hash_; }

  friend bool operator==(const BasicPartitionSketch&, const BasicPartitionSketch&) = default;

 protected:
  BasicPartitionSketch(Hash hash, std::vector<std::int64_t> counters, std::uint64_t items_seen)
      : hash_(std::move(hash)), counters_(std::move(counters)), items_seen_(items_seen) {}

 private:
  Hash hash_;
  std::vector<std::int64_t> counters_;
  std::uint64_t items_seen_ = 0;
};

/// The production sketch: seeded 4-wise independent hashing with
/// P = ceil(4/eps^2) + 1, giving E[((A - F2)/F2)^2] < eps^2.
class PartitionSketch : public BasicPartitionSketch<HashFamily> {
 public:
  PartitionSketch(double epsilon, std::uint64_t seed);

  /// Rebuilds a sketch from serialized parts. Validates the counter count,
  /// the mass bound sum|A[i]| <= items_seen and its parity.
  static PartitionSketch from_parts(double epsilon, std::uint64_t seed,
                                    std::vector<std::int64_t> counters, std::uint64_t items_seen);

  double epsilon() const { return epsilon_; }
  std::uint64_t seed() const { return hash().seed(); }

  void merge(const PartitionSketch& other);

  friend bool operator==(const PartitionSketch&, const PartitionSketch&) = default;

 private:
  PartitionSketch(double epsilon, HashFamily family, std::vector<std::int64_t> counters,
                  std::uint64_t items_seen);

  double epsilon_;
};

/// Returns a copy of `a` with `b` merged in.
PartitionSketch merge(const PartitionSketch& a, const PartitionSketch& b);

/// Classic AMS tug-of-war: r independent sign accumulators Z_j, estimate
/// (1/r) * sum_j Z_j^2.
template <typename Sign>
class BasicAmsSketch {
 public:
  explicit BasicAmsSketch(std::vector<Sign> signs)
      : signs_(std::move(signs)), accumulators_(signs_.size(), 0) {
    if (signs_.empty()) throw std::invalid_argument("estimator_count must be at least 1");
  }

  void update(ElementId x) {
    if (items_seen_ >= kMaxItems) throw std::overflow_error("sketch saw 2^62 items");
    for (std::size_t j = 0; j < signs_.size(); ++j) accumulators_[j] += signs_[j].sign(x);
    ++items_seen_;
  }

  template <typename Range>
  void update_all(const Range& elements) {
    for (ElementId x : elements) update(x);
  }

  /// sum_j Z_j^2, exact.
  Wide sum_of_squares() const {
    Wide total = 0;
    for (std::int64_t z : accumulators_) {
      const auto magnitude = static_cast<std::uint64_t>(z < 0 ? -z : z);
      total += static_cast<Wide>(magnitude) * magnitude;
    }
    return total;
  }

  double estimate() const { return to_double(sum_of_squares()) / static_cast<double>(signs_.size()); }

  std::size_t estimator_count() const { return signs_.size(); }
  std::span<const std::int64_t> accumulators() const { return accumulators_; }
  std::uint64_t items_seen() const { return items_seen_; }

 private:
  std::vector<Sign> signs_;
  std::vector<std::int64_t> accumulators_;
  std::uint64_t items_seen_ = 0;
};

/// r = ceil(4 / eps^2), matching the partition sketch's variance budget.
std::size_t ams_estimator_count_for(double epsilon);

class AmsSketch : public BasicAmsSketch<SignHash> {
 public:
  AmsSketch(double epsilon, std::size_t estimator_count, std::uint64_t seed);
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

/// Outcome of one sketch trial scored against the exact moments.
struct MomentReport {
  Wide exact_f2 = 0;
  Wide exact_f4 = 0;
  Wide estimate = 0;
  double relative_error = 0.0;
  std::uint64_t encoded_bits = 0;
};

/// |estimate - f2| / f2, or 0 when both are 0 and +inf when only f2 is 0.
double relative_error(Wide estimate, Wide exact_f2);
double relative_error(double estimate, Wide exact_f2);

}  // namespace f2sketch
