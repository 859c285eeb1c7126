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

#include "f2sketch/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

#include "f2sketch/hashing.hpp"

namespace f2sketch {

Histogram::Histogram(std::span<const ElementId> stream) {
  frequencies_.reserve(stream.size());
  for (ElementId x : stream) add(x);
}

void Histogram::add(ElementId x, std::uint64_t count) {
  if (count == 0) return;
  frequencies_[x] += count;
  total_ += count;
}

std::uint64_t Histogram::frequency(ElementId x) const {
  const auto it = frequencies_.find(x);
  return it == frequencies_.end() ? 0 : it->second;
}

std::vector<std::uint64_t> Histogram::sorted_frequencies() const {
  std::vector<std::uint64_t> out;
  out.reserve(frequencies_.size());
  for (const auto& [x, f] : frequencies_) out.push_back(f);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Histogram histogram(std::span<const ElementId> stream) { return Histogram(stream); }

BigInt exact_moment(const Histogram& h, unsigned p) {
  if (p > kMaxMomentOrder) {
    throw std::invalid_argument("moment order " + std::to_string(p) + " exceeds the supported maximum 8");
  }
  BigInt total = 0;
  for (const auto& [x, f] : h.frequencies()) total += boost::multiprecision::pow(BigInt(f), p);
  return total;
}

Wide exact_f2(const Histogram& h) {
  Wide total = 0;
  for (const auto& [x, f] : h.frequencies()) total += static_cast<Wide>(f) * f;
  return total;
}

Wide exact_f4(const Histogram& h) {
  Wide total = 0;
  for (const auto& [x, f] : h.frequencies()) {
    const Wide square = static_cast<Wide>(f) * f;
    total += square * square;
  }
  return total;
}

ExhaustiveMoments exhaustive_sketch_moments(std::span<const std::uint64_t> frequencies,
                                            std::uint64_t bucket_count) {
  if (bucket_count == 0) throw std::invalid_argument("bucket count must be at least 1");
  const std::size_t u = frequencies.size();
  const std::uint64_t count = assignment_count(u, bucket_count);
  if (count == 0) {
    throw std::invalid_argument("P^u * 2^u for u=" + std::to_string(u) + ", P=" +
                                std::to_string(bucket_count) + " exceeds the enumeration bound 10^7");
  }

  // Each element owns one digit in [0, 2P): bucket = digit / 2, sign from
  // digit % 2. Walking all digit vectors visits each assignment once.
  const std::uint64_t radix = 2 * bucket_count;
  std::vector<std::uint64_t> digits(u, 0);
  std::vector<BigInt> cells(static_cast<std::size_t>(bucket_count));
  BigInt sum = 0;
  BigInt sum_of_squares = 0;
  for (std::uint64_t step = 0; step < count; ++step) {
    std::fill(cells.begin(), cells.end(), BigInt(0));
    for (std::size_t j = 0; j < u; ++j) {
      const BigInt contribution(frequencies[j]);
      auto& cell = cells[static_cast<std::size_t>(digits[j] / 2)];
      if (digits[j] % 2 == 0) {
        cell += contribution;
      } else {
        cell -= contribution;
      }
    }
    BigInt value = 0;
    for (const auto& c : cells) value += c * c;
    sum += value;
    sum_of_squares += value * value;

    for (std::size_t j = 0; j < u; ++j) {
      if (++digits[j] < radix) break;
      digits[j] = 0;
    }
  }

  ExhaustiveMoments moments;
  moments.assignments = count;
  moments.mean = Rational(sum, BigInt(count));
  moments.variance = Rational(sum_of_squares, BigInt(count)) - moments.mean * moments.mean;
  return moments;
}

Rational predicted_variance(std::span<const std::uint64_t> frequencies, std::uint64_t bucket_count) {
  if (bucket_count == 0) throw std::invalid_argument("bucket count must be at least 1");
  BigInt f2 = 0;
  BigInt f4 = 0;
  for (std::uint64_t f : frequencies) {
    const BigInt square = BigInt(f) * f;
    f2 += square;
    f4 += square * square;
  }
  return Rational(2 * (f2 * f2 - f4), BigInt(bucket_count));
}

}  // namespace f2sketch
