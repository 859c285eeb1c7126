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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "f2sketch/oracle.hpp"
#include "f2sketch/sketch.hpp"
#include "f2sketch/streamgen.hpp"

using namespace f2sketch;

TEST(BucketCount, FromEpsilon) {
  EXPECT_EQ(bucket_count_for(0.1), 401u);
  EXPECT_EQ(bucket_count_for(1.0), 5u);
  EXPECT_EQ(bucket_count_for(0.25), 65u);
  EXPECT_EQ(bucket_count_for(0.01), 40001u);
  EXPECT_EQ(bucket_count_for(0.2), 101u);
  EXPECT_EQ(bucket_count_for(0.3), 46u);  // 4 / 0.09 = 44.4...
}

TEST(BucketCount, TolerantCeiling) {
  EXPECT_EQ(ceil_tolerant(21 / 0.0875), 240u);  // 240.00000000000003 in binary64
  EXPECT_EQ(ceil_tolerant(4 / (0.1 * 0.1)), 400u);
  EXPECT_EQ(ceil_tolerant(2.5), 3u);
  EXPECT_EQ(floor_tolerant(0.25 * 0.25 * 4096 / 4 - 1e-12), 64u);
  EXPECT_EQ(floor_tolerant(63.5), 63u);
}

TEST(BucketCount, RejectsBadEpsilon) {
  EXPECT_THROW(bucket_count_for(0.0), std::invalid_argument);
  EXPECT_THROW(bucket_count_for(-0.5), std::invalid_argument);
  EXPECT_THROW(bucket_count_for(1.0001), std::invalid_argument);
  EXPECT_THROW(bucket_count_for(std::nan("")), std::invalid_argument);
  EXPECT_THROW(bucket_count_for(1e-5), std::invalid_argument);  // 4e10 buckets > 2^32
}

TEST(PartitionSketch, FreshSketchIsEmpty) {
  const PartitionSketch s(0.1, 7);
  EXPECT_EQ(s.bucket_count(), 401u);
  EXPECT_EQ(s.items_seen(), 0u);
  EXPECT_EQ(s.estimate(), 0u);
  EXPECT_TRUE(std::all_of(s.counters().begin(), s.counters().end(), [](auto c) { return c == 0; }));
}

TEST(PartitionSketch, SingleUpdateTouchesOneBucket) {
  PartitionSketch s(0.25, 7);
  const ElementId x = 42;
  s.update(x);
  const auto bucket = s.hash().bucket(x);
  for (std::size_t i = 0; i < s.bucket_count(); ++i) {
    EXPECT_EQ(s.counters()[i], i == bucket ? s.hash().sign(x) : 0);
  }
  EXPECT_EQ(s.items_seen(), 1u);
  EXPECT_EQ(s.estimate(), 1u);
}

TEST(PartitionSketch, RepeatedElementGivesFSquared) {
  PartitionSketch s(0.25, 7);
  const ElementId x = 1234;
  for (int i = 0; i < 37; ++i) s.update(x);
  EXPECT_EQ(s.counters()[s.hash().bucket(x)], 37 * s.hash().sign(x));
  EXPECT_EQ(s.estimate(), 37u * 37u);
}

TEST(PartitionSketch, DisjointBucketsHoldTheirFrequencies) {
  PartitionSketch s(0.25, 7);
  const ElementId a = 5;
  ElementId b = 6;
  while (s.hash().bucket(b) == s.hash().bucket(a)) ++b;
  for (int i = 0; i < 3; ++i) s.update(a);
  for (int i = 0; i < 2; ++i) s.update(b);
  EXPECT_EQ(s.counters()[s.hash().bucket(a)], 3 * s.hash().sign(a));
  EXPECT_EQ(s.counters()[s.hash().bucket(b)], 2 * s.hash().sign(b));
  EXPECT_EQ(s.estimate(), 13u);
}

TEST(PartitionSketch, EstimateNeedsWideArithmetic) {
  // A counter of 2^40 squares to 2^80, past 64 bits.
  const std::int64_t big = std::int64_t{1} << 40;
  std::vector<std::int64_t> counters(5, 0);
  counters[2] = -big;
  const auto s = PartitionSketch::from_parts(1.0, 3, counters, static_cast<std::uint64_t>(big));
  EXPECT_EQ(s.estimate(), static_cast<Wide>(1) << 80);
  EXPECT_EQ(to_string(s.estimate()), "1208925819614629174706176");
}

TEST(PartitionSketch, CounterMassNeverExceedsItems) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    PartitionSketch s(0.5, rng());
    const auto stream = uniform_stream(1 + rng() % 3000, 1 + rng() % 50, rng());
    for (ElementId x : stream) {
      s.update(x);
      std::uint64_t mass = 0;
      for (auto c : s.counters()) mass += static_cast<std::uint64_t>(std::llabs(c));
      ASSERT_LE(mass, s.items_seen());
      ASSERT_EQ(mass % 2, s.items_seen() % 2);
    }
  }
}

TEST(PartitionSketch, MergeIdentity) {
  PartitionSketch s(0.25, 9);
  s.update_all(uniform_stream(500, 100, 1));
  const PartitionSketch empty(0.25, 9);
  EXPECT_EQ(merge(empty, s), s);
  EXPECT_EQ(merge(s, empty), s);
}

TEST(PartitionSketch, MergeOfHalvesEqualsWhole) {
  const auto stream = uniform_stream(4000, 300, 2);
  PartitionSketch whole(0.25, 9), left(0.25, 9), right(0.25, 9);
  whole.update_all(stream);
  for (std::size_t i = 0; i < stream.size(); ++i) (i < 1700 ? left : right).update(stream[i]);
  const auto merged = merge(left, right);
  EXPECT_TRUE(std::equal(merged.counters().begin(), merged.counters().end(), whole.counters().begin()));
  EXPECT_EQ(merged.items_seen(), whole.items_seen());
  EXPECT_EQ(merged.estimate(), whole.estimate());
}

TEST(PartitionSketch, MergeRejectsMismatch) {
  const PartitionSketch a(0.25, 9);
  EXPECT_THROW(merge(a, PartitionSketch(0.25, 10)), std::invalid_argument);
  EXPECT_THROW(merge(a, PartitionSketch(0.5, 9)), std::invalid_argument);
}

TEST(PartitionSketch, MergeIsCommutativeAndAssociative) {
  PartitionSketch a(0.5, 4), b(0.5, 4), c(0.5, 4);
  a.update_all(uniform_stream(300, 40, 1));
  b.update_all(uniform_stream(200, 40, 2));
  c.update_all(uniform_stream(100, 40, 3));
  EXPECT_EQ(merge(a, b), merge(b, a));
  EXPECT_EQ(merge(merge(a, b), c), merge(a, merge(b, c)));
}

TEST(PartitionSketch, EstimateIgnoresStreamOrder) {
  auto stream = uniform_stream(3000, 200, 5);
  PartitionSketch forward(0.25, 11);
  forward.update_all(stream);
  std::mt19937_64 rng(12);
  std::shuffle(stream.begin(), stream.end(), rng);
  PartitionSketch shuffled(0.25, 11);
  shuffled.update_all(stream);
  EXPECT_EQ(forward, shuffled);
}

TEST(PartitionSketch, FromPartsValidates) {
  std::vector<std::int64_t> counters(5, 0);
  counters[0] = 3;
  EXPECT_NO_THROW(PartitionSketch::from_parts(1.0, 1, counters, 3));
  EXPECT_NO_THROW(PartitionSketch::from_parts(1.0, 1, counters, 5));
  EXPECT_THROW(PartitionSketch::from_parts(1.0, 1, counters, 2), std::invalid_argument);  // mass > n
  EXPECT_THROW(PartitionSketch::from_parts(1.0, 1, counters, 4), std::invalid_argument);  // parity
  EXPECT_THROW(PartitionSketch::from_parts(1.0, 1, std::vector<std::int64_t>(4, 0), 0), std::invalid_argument);
}

// Truly random hashing realized by enumeration: the sketch's own update path
// run under every (bucket, sign) assignment.
TEST(BasicPartitionSketch, ExhaustiveMeanIsF2) {
  const std::vector<std::uint64_t> freqs = {2, 1, 1};
  Rational total = 0;
  std::uint64_t count = 0;
  for (const auto& a : enumerate_assignments(freqs.size(), 2)) {
    BasicPartitionSketch<ExhaustiveAssignment> s(a);
    for (std::size_t x = 0; x < freqs.size(); ++x) {
      for (std::uint64_t r = 0; r < freqs[x]; ++r) s.update(x);
    }
    total += Rational(BigInt(to_string(s.estimate())));
    ++count;
  }
  EXPECT_EQ(count, 64u);
  EXPECT_EQ(total / count, Rational(6));
}

TEST(BasicPartitionSketch, ExhaustiveVarianceMatchesClosedForm) {
  for (const auto& freqs : std::vector<std::vector<std::uint64_t>>{{1, 1}, {2, 1, 1}, {3, 2, 1}, {1, 1, 1, 1}}) {
    for (std::uint64_t p = 1; p <= 3; ++p) {
      Rational sum = 0, sum_sq = 0;
      std::uint64_t count = 0;
      for (const auto& a : enumerate_assignments(freqs.size(), p)) {
        BasicPartitionSketch<ExhaustiveAssignment> s(a);
        for (std::size_t x = 0; x < freqs.size(); ++x) {
          for (std::uint64_t r = 0; r < freqs[x]; ++r) s.update(x);
        }
        const Rational value(BigInt(to_string(s.estimate())));
        sum += value;
        sum_sq += value * value;
        ++count;
      }
      const Rational mean = sum / count;
      BigInt f2 = 0, f4 = 0;
      for (auto f : freqs) {
        f2 += BigInt(f) * f;
        f4 += BigInt(f) * f * f * f;
      }
      EXPECT_EQ(mean, Rational(f2));
      EXPECT_EQ(sum_sq / count - mean * mean, Rational(2 * (f2 * f2 - f4), BigInt(p)));
    }
  }
}

TEST(AmsSketch, EstimatorCount) {
  EXPECT_EQ(ams_estimator_count_for(0.25), 64u);
  EXPECT_EQ(ams_estimator_count_for(0.1), 400u);
  EXPECT_THROW(AmsSketch(0.5, 0, 1), std::invalid_argument);
  EXPECT_THROW(AmsSketch(0.0, 4, 1), std::invalid_argument);
}

TEST(AmsSketch, EmptyAndSingleElement) {
  AmsSketch empty(0.5, 1, 3);
  EXPECT_EQ(empty.estimate(), 0.0);
  AmsSketch single(0.5, 1, 3);
  for (int i = 0; i < 9; ++i) single.update(77);
  EXPECT_EQ(single.estimate(), 81.0);
  AmsSketch many(0.5, 16, 3);
  for (int i = 0; i < 9; ++i) many.update(77);
  EXPECT_EQ(many.estimate(), 81.0);
}

TEST(AmsSketch, AccumulatorsBoundedByItems) {
  AmsSketch s(0.5, 16, 4);
  s.update_all(uniform_stream(1000, 30, 4));
  for (auto z : s.accumulators()) EXPECT_LE(static_cast<std::uint64_t>(std::llabs(z)), s.items_seen());
}

TEST(AmsSketch, ExhaustiveSignsAreUnbiased) {
  const std::vector<std::uint64_t> freqs = {2, 1, 1};
  Rational total = 0;
  std::uint64_t count = 0;
  for (const auto& a : enumerate_assignments(freqs.size(), 1)) {
    BasicAmsSketch<ExhaustiveAssignment> s({a});
    for (std::size_t x = 0; x < freqs.size(); ++x) {
      for (std::uint64_t r = 0; r < freqs[x]; ++r) s.update(x);
    }
    total += Rational(BigInt(to_string(s.sum_of_squares())));
    ++count;
  }
  EXPECT_EQ(count, 8u);
  EXPECT_EQ(total / count, Rational(6));
}

TEST(RelativeError, Definition) {
  EXPECT_EQ(relative_error(Wide{110}, Wide{100}), 0.1);
  EXPECT_EQ(relative_error(Wide{90}, Wide{100}), 0.1);
  EXPECT_EQ(relative_error(Wide{0}, Wide{0}), 0.0);
  EXPECT_TRUE(std::isinf(relative_error(Wide{3}, Wide{0})));
  EXPECT_DOUBLE_EQ(relative_error(50.0, Wide{40}), 0.25);
}
