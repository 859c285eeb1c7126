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

#include "f2sketch/sketch.hpp"

#include <cmath>
#include <limits>

#include "f2sketch/random.hpp"

namespace f2sketch {

std::string to_string(Wide value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return digits;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
  }
}

}  // namespace

std::uint64_t bucket_count_for(double epsilon) {
  check_epsilon(epsilon);
  const double ratio = 4.0 / (epsilon * epsilon);
  if (!(ratio < 0x1.0p63)) throw std::invalid_argument("epsilon too small: bucket count overflows");
  const std::uint64_t buckets = ceil_tolerant(ratio) + 1;
  if (buckets > kMaxBucketCount) {
    throw std::invalid_argument("epsilon " + std::to_string(epsilon) + " needs " +
                                std::to_string(buckets) + " buckets, more than 2^32");
  }
  return buckets;
}

PartitionSketch::PartitionSketch(double epsilon, std::uint64_t seed)
    : BasicPartitionSketch<HashFamily>(HashFamily(seed, bucket_count_for(epsilon))),
      epsilon_(epsilon) {}

PartitionSketch::PartitionSketch(double epsilon, HashFamily family,
                                 std::vector<std::int64_t> counters, std::uint64_t items_seen)
    : BasicPartitionSketch<HashFamily>(std::move(family), std::move(counters), items_seen),
      epsilon_(epsilon) {}

PartitionSketch PartitionSketch::from_parts(double epsilon, std::uint64_t seed,
                                            std::vector<std::int64_t> counters,
                                            std::uint64_t items_seen) {
  const std::uint64_t buckets = bucket_count_for(epsilon);
  if (counters.size() != buckets) {
    throw std::invalid_argument("expected " + std::to_string(buckets) + " counters, got " +
                                std::to_string(counters.size()));
  }
  if (items_seen > kMaxItems) throw std::invalid_argument("items_seen exceeds 2^62");
  std::uint64_t mass = 0;
  for (std::int64_t c : counters) {
    if (c == std::numeric_limits<std::int64_t>::min()) {
      throw std::invalid_argument("counter magnitude exceeds items_seen");
    }
    const auto magnitude = static_cast<std::uint64_t>(std::llabs(c));
    if (magnitude > items_seen - mass) {
      throw std::invalid_argument("counter mass exceeds items_seen");
    }
    mass += magnitude;
  }
  // Each update moves the total mass by exactly one.
  if ((mass & 1) != (items_seen & 1)) {
    throw std::invalid_argument("counter mass parity disagrees with items_seen");
  }
  return PartitionSketch(epsilon, HashFamily(seed, buckets), std::move(counters), items_seen);
}

void PartitionSketch::merge(const PartitionSketch& other) {
  if (epsilon_ != other.epsilon_) throw std::invalid_argument("cannot merge sketches with different epsilon");
  BasicPartitionSketch<HashFamily>::merge(other);
}

PartitionSketch merge(const PartitionSketch& a, const PartitionSketch& b) {
  PartitionSketch merged = a;
  merged.merge(b);
  return merged;
}

std::size_t ams_estimator_count_for(double epsilon) {
  check_epsilon(epsilon);
  return static_cast<std::size_t>(ceil_tolerant(4.0 / (epsilon * epsilon)));
}

namespace {

std::vector<SignHash> make_signs(std::size_t count, std::uint64_t seed) {
  std::vector<SignHash> signs;
  signs.reserve(count);
  for (std::size_t j = 0; j < count; ++j) signs.emplace_back(derive_seed(sign_seed_from(seed), j));
  return signs;
}

}  // namespace

AmsSketch::AmsSketch(double epsilon, std::size_t estimator_count, std::uint64_t seed)
    : BasicAmsSketch<SignHash>((check_epsilon(epsilon), make_signs(estimator_count, seed))),
      epsilon_(epsilon) {}

double relative_error(Wide estimate, Wide exact_f2) {
  if (exact_f2 == 0) return estimate == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  const Wide diff = estimate > exact_f2 ? estimate - exact_f2 : exact_f2 - estimate;
  return to_double(diff) / to_double(exact_f2);
}

double relative_error(double estimate, Wide exact_f2) {
  if (exact_f2 == 0) return estimate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  const double f2 = to_double(exact_f2);
  return std::fabs(estimate - f2) / f2;
}

}  // namespace f2sketch
