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

#include "f2sketch/hashing.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "f2sketch/random.hpp"

namespace f2sketch {
namespace {

constexpr std::uint64_t kBucketSalt = 0x42554b5448415348ULL;
constexpr std::uint64_t kSignSalt = 0x5349474e48415348ULL;

std::array<std::uint64_t, kIndependence> draw_coefficients(std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::array<std::uint64_t, kIndependence> coefficients{};
  for (auto& c : coefficients) {
    do {
      c = engine() >> 3;
    } while (c >= kMersenne61);
  }
  return coefficients;
}

}  // namespace

PolynomialHash::PolynomialHash(std::uint64_t seed) : coefficients_(draw_coefficients(seed)) {}

PolynomialHash::PolynomialHash(const std::array<std::uint64_t, kIndependence>& coefficients)
    : coefficients_(coefficients) {
  for (auto c : coefficients_) {
    if (c >= kMersenne61) throw std::invalid_argument("coefficient outside GF(2^61-1)");
  }
}

std::uint64_t PolynomialHash::operator()(ElementId x) const {
  if (x >= kMersenne61) {
    throw std::out_of_range("element id " + std::to_string(x) +
                            " is not below the field order 2^61-1");
  }
  std::uint64_t acc = coefficients_[kIndependence - 1];
  for (std::size_t i = kIndependence - 1; i-- > 0;) {
    acc = add_mod_mersenne61(mul_mod_mersenne61(acc, x), coefficients_[i]);
  }
  return acc;
}

std::uint64_t bucket_seed_from(std::uint64_t master_seed) { return mix64(master_seed ^ kBucketSalt); }
std::uint64_t sign_seed_from(std::uint64_t master_seed) { return mix64(master_seed ^ kSignSalt); }

HashFamily::HashFamily(std::uint64_t seed, std::uint64_t bucket_count)
    : seed_(seed),
      bucket_count_(bucket_count),
      bucket_hash_(bucket_seed_from(seed)),
      sign_hash_(sign_seed_from(seed)) {
  if (bucket_count == 0) throw std::invalid_argument("bucket_count must be at least 1");
  if (bucket_count > kMaxBucketCount) {
    throw std::invalid_argument("bucket_count " + std::to_string(bucket_count) +
                                " exceeds 2^32, the field-order safety margin");
  }
}

std::uint64_t assignment_count(std::size_t universe_size, std::uint64_t bucket_count) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < universe_size; ++i) {
    if (bucket_count > kMaxAssignments / count) return 0;
    count *= bucket_count;
    if (2 > kMaxAssignments / count) return 0;
    count *= 2;
  }
  return count;
}

AssignmentRange enumerate_assignments(std::size_t universe_size, std::uint64_t bucket_count) {
  if (bucket_count == 0) throw std::invalid_argument("bucket_count must be at least 1");
  const std::uint64_t count = assignment_count(universe_size, bucket_count);
  if (count == 0) {
    throw std::invalid_argument("P^u * 2^u for u=" + std::to_string(universe_size) +
                                ", P=" + std::to_string(bucket_count) +
                                " exceeds the enumeration bound 10^7");
  }
  return AssignmentRange(universe_size, bucket_count, count);
}

AssignmentRange::iterator AssignmentRange::begin() const {
  ExhaustiveAssignment first;
  first.buckets = bucket_count_;
  first.bucket_map.assign(universe_size_, 0);
  first.sign_map.assign(universe_size_, -1);
  return iterator(std::move(first), 0);
}

AssignmentRange::iterator AssignmentRange::end() const { return iterator({}, count_); }

AssignmentRange::iterator& AssignmentRange::iterator::operator++() {
  ++index_;
  // Odometer: signs are the low digits, bucket indices the high digits.
  for (auto& s : current_.sign_map) {
    if (s < 0) {
      s = 1;
      return *this;
    }
    s = -1;
  }
  for (auto& b : current_.bucket_map) {
    if (b + 1 < current_.buckets) {
      ++b;
      return *this;
    }
    b = 0;
  }
  return *this;
}

}  // namespace f2sketch
