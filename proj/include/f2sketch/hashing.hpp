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

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <vector>

#include "f2sketch/types.hpp"

namespace f2sketch {

/// Order of the prime field used by the polynomial hashes, 2^61 - 1.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Largest bucket count accepted by HashFamily. Keeps the field order at
/// least 2^29 times the range, so range-mapping bias stays below 2^-20.
inline constexpr std::uint64_t kMaxBucketCount = std::uint64_t{1} << 32;

/// Independence degree of every hash in this library.
inline constexpr std::size_t kIndependence = 4;

/// (a * b) mod 2^61-1 for a, b < 2^61-1.
inline std::uint64_t mul_mod_mersenne61(std::uint64_t a, std::uint64_t b) {
  const Wide product = static_cast<Wide>(a) * b;
  std::uint64_t folded = static_cast<std::uint64_t>(product & kMersenne61) +
                         static_cast<std::uint64_t>(product >> 61);
  if (folded >= kMersenne61) folded -= kMersenne61;
  return folded;
}

inline std::uint64_t add_mod_mersenne61(std::uint64_t a, std::uint64_t b) {
  std::uint64_t sum = a + b;
  if (sum >= kMersenne61) sum -= kMersenne61;
  return sum;
}

/// Degree-3 polynomial over GF(2^61-1). A uniformly drawn coefficient vector
/// gives a 4-wise independent family of functions into the field.
class PolynomialHash {
 public:
  PolynomialHash() = default;
  explicit PolynomialHash(std::uint64_t seed);
  explicit PolynomialHash(const std::array<std::uint64_t, kIndependence>& coefficients);

  /// Field value in [0, 2^61-1). Throws std::out_of_range for x >= 2^61-1.
  std::uint64_t operator()(ElementId x) const;

  const std::array<std::uint64_t, kIndependence>& coefficients() const {
    return coefficients_;
  }

  friend bool operator==(const PolynomialHash&, const PolynomialHash&) = default;

 private:
  // coefficients_[i] multiplies x^i
  std::array<std::uint64_t, kIndependence> coefficients_{};
};

/// Maps a field value to [0, range) by multiply-then-shift.
inline std::uint64_t scale_to_range(std::uint64_t field_value, std::uint64_t range) {
  return static_cast<std::uint64_t>((static_cast<Wide>(field_value) * range) >> 61);
}

inline int sign_of_field_value(std::uint64_t field_value) {
  return scale_to_range(field_value, 2) == 0 ? -1 : 1;
}

/// A source of bucket indices and +/-1 signs, the two random functions the
/// partition sketch consumes.
template <typename H>
concept BucketSignHash = requires(const H& h, ElementId x) {
  { h.bucket(x) } -> std::convertible_to<std::uint64_t>;
  { h.sign(x) } -> std::convertible_to<int>;
  { h.bucket_count() } -> std::convertible_to<std::uint64_t>;
};

/// Seeded pair of independent 4-wise independent hashes: a bucket hash into
/// [0, P) and a sign hash into {-1, +1}. Immutable after construction.
class HashFamily {
 public:
  /// Throws std::invalid_argument unless 1 <= bucket_count <= 2^32.
  HashFamily(std::uint64_t seed, std::uint64_t bucket_count);

  std::uint64_t bucket(ElementId x) const {
    return scale_to_range(bucket_hash_(x), bucket_count_);
  }
  int sign(ElementId x) const { return sign_of_field_value(sign_hash_(x)); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t bucket_count() const { return bucket_count_; }
  const PolynomialHash& bucket_hash() const { return bucket_hash_; }
  const PolynomialHash& sign_hash() const { return sign_hash_; }

  friend bool operator==(const HashFamily&, const HashFamily&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t bucket_count_;
  PolynomialHash bucket_hash_;
  PolynomialHash sign_hash_;
};

/// Seed of the bucket hash derived from a master seed.
std::uint64_t bucket_seed_from(std::uint64_t master_seed);
/// Seed of the sign hash derived from a master seed.
std::uint64_t sign_seed_from(std::uint64_t master_seed);

/// Standalone 4-wise independent sign function, used by the AMS baseline.
class SignHash {
 public:
  explicit SignHash(std::uint64_t seed) : hash_(seed) {}
  int sign(ElementId x) const { return sign_of_field_value(hash_(x)); }
  friend bool operator==(const SignHash&, const SignHash&) = default;

 private:
  PolynomialHash hash_;
};

/// One explicit (bucket, sign) assignment over the tiny universe [0, u).
/// Enumerating all of them realizes truly random hashing exactly.
struct ExhaustiveAssignment {
  std::uint64_t buckets = 1;
  std::vector<std::uint32_t> bucket_map;
  std::vector<int> sign_map;

  std::uint64_t bucket(ElementId x) const { return bucket_map.at(x); }
  int sign(ElementId x) const { return sign_map.at(x); }
  std::uint64_t bucket_count() const { return buckets; }

  friend bool operator==(const ExhaustiveAssignment&, const ExhaustiveAssignment&) = default;
};

/// Upper bound on P^u * 2^u accepted by enumerate_assignments.
inline constexpr std::uint64_t kMaxAssignments = 10'000'000;

/// Number of assignments P^u * 2^u, or 0 if it exceeds kMaxAssignments.
std::uint64_t assignment_count(std::size_t universe_size, std::uint64_t bucket_count);

/// Lazy range over every ExhaustiveAssignment for (u, P), each exactly once.
class AssignmentRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = ExhaustiveAssignment;
    using difference_type = std::ptrdiff_t;
    using pointer = const ExhaustiveAssignment*;
    using reference = const ExhaustiveAssignment&;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.index_ == b.index_;
    }

   private:
    friend class AssignmentRange;
    iterator(ExhaustiveAssignment first, std::uint64_t index)
        : current_(std::move(first)), index_(index) {}

    ExhaustiveAssignment current_;
    std::uint64_t index_ = 0;
  };

  iterator begin() const;
  iterator end() const;
  std::uint64_t size() const { return count_; }

 private:
  friend AssignmentRange enumerate_assignments(std::size_t, std::uint64_t);
  AssignmentRange(std::size_t universe_size, std::uint64_t bucket_count, std::uint64_t count)
      : universe_size_(universe_size), bucket_count_(bucket_count), count_(count) {}

  std::size_t universe_size_;
  std::uint64_t bucket_count_;
  std::uint64_t count_;
};

/// Throws std::invalid_argument if bucket_count == 0 or P^u * 2^u > 10^7.
AssignmentRange enumerate_assignments(std::size_t universe_size, std::uint64_t bucket_count);

}  // namespace f2sketch
