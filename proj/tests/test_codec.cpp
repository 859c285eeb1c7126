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

#include <cmath>
#include <filesystem>
#include <random>

#include "f2sketch/codec.hpp"
#include "f2sketch/streamgen.hpp"

using namespace f2sketch;

namespace {

// Reference code as a '0'/'1' string, built from the textbook definition.
std::string reference_gamma(std::uint64_t v) {
  std::string binary;
  for (std::uint64_t x = v; x != 0; x >>= 1) binary.insert(binary.begin(), (x & 1) ? '1' : '0');
  return std::string(binary.size() - 1, '0') + binary;
}

std::string reference_counters(const std::vector<std::int64_t>& counters) {
  std::string bits;
  for (auto c : counters) {
    bits += c < 0 ? '1' : '0';
    bits += reference_gamma(static_cast<std::uint64_t>(std::llabs(c)) + 1);
  }
  return bits;
}

std::string as_bit_string(const std::vector<std::uint8_t>& bytes, std::uint64_t bits) {
  std::string out;
  for (std::uint64_t i = 0; i < bits; ++i) out += ((bytes[i / 8] >> (7 - i % 8)) & 1) ? '1' : '0';
  return out;
}

PartitionSketch sketch_of(double eps, std::uint64_t seed, const Stream& stream) {
  PartitionSketch s(eps, seed);
  s.update_all(stream);
  return s;
}

}  // namespace

TEST(EliasGamma, Table) {
  EXPECT_EQ(reference_gamma(1), "1");
  EXPECT_EQ(reference_gamma(2), "010");
  EXPECT_EQ(reference_gamma(4), "00100");
  EXPECT_EQ(gamma_length(1), 1u);
  EXPECT_EQ(gamma_length(4), 5u);
  EXPECT_EQ(gamma_length(7), 5u);
  EXPECT_EQ(gamma_length(8), 7u);
}

TEST(EliasGamma, WriterMatchesReference) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t v = 1 + (rng() >> (rng() % 64));
    BitWriter w;
    write_gamma(w, v);
    ASSERT_EQ(as_bit_string(w.bytes(), w.bit_length()), reference_gamma(v)) << v;
    BitReader r(w.bytes(), w.bit_length());
    ASSERT_EQ(read_gamma(r), v);
    ASSERT_EQ(r.remaining(), 0u);
  }
}

TEST(CounterCodec, AllZeroFiveCountersIsTenBits) {
  const PartitionSketch empty(1.0, 3);
  const auto enc = encode(empty);
  EXPECT_EQ(enc.counter_bits, 10u);
  EXPECT_EQ(as_bit_string(enc.counters, enc.counter_bits), "0101010101");
}

TEST(CounterCodec, SingleThreeIsEightBits) {
  for (std::int64_t v : {3, -3}) {
    const std::vector<std::int64_t> counters = {v, 0};
    std::uint64_t bits = 0;
    const auto bytes = encode_counters(counters, bits);
    EXPECT_EQ(bits, 8u);
    EXPECT_EQ(counter_section_bits(counters), 8u);
    EXPECT_EQ(as_bit_string(bytes, bits), reference_counters(counters));
    EXPECT_EQ(decode_counters(bytes, bits, 2), counters);
  }
}

TEST(CounterCodec, MatchesReferenceOnRandomArrays) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> counters(1 + rng() % 40);
    for (auto& c : counters) c = static_cast<std::int64_t>(rng() % 2000) - 1000;
    std::uint64_t bits = 0;
    const auto bytes = encode_counters(counters, bits);
    ASSERT_EQ(as_bit_string(bytes, bits), reference_counters(counters));
    ASSERT_EQ(bits, counter_section_bits(counters));
    ASSERT_EQ(decode_counters(bytes, bits, counters.size()), counters);
  }
}

TEST(CounterCodec, PerCounterBound) {
  // 2 floor(log2(|c|+1)) + 2 <= 2 log2(|c|+1) + 2
  for (std::int64_t c = -5000; c <= 5000; ++c) {
    const auto a = static_cast<double>(std::llabs(c));
    ASSERT_LE(static_cast<double>(counter_code_length(c)), 2.0 * std::log2(a + 1.0) + 2.0 + 1e-9);
  }
}

TEST(CounterCodec, LengthIsMonotoneInMagnitude) {
  std::uint64_t previous = counter_code_length(0);
  for (std::int64_t c = 1; c < 200000; ++c) {
    const auto len = counter_code_length(c);
    ASSERT_GE(len, previous);
    ASSERT_EQ(len, counter_code_length(-c));
    previous = len;
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::int64_t> counters(10);
    for (auto& c : counters) c = static_cast<std::int64_t>(rng() % 100000) - 50000;
    const auto before = counter_section_bits(counters);
    auto& c = counters[rng() % counters.size()];
    c += c < 0 ? -1 : 1;
    ASSERT_GE(counter_section_bits(counters), before);
  }
}

TEST(Codec, RoundTripEmpty) {
  const PartitionSketch empty(0.25, 5);
  EXPECT_EQ(decode(encode(empty)), empty);
}

TEST(Codec, RoundTripRandomStreams) {
  std::mt19937_64 rng(4);
  const double epsilons[] = {1.0, 0.5, 0.25, 0.1};
  for (int trial = 0; trial < 100; ++trial) {
    const double eps = epsilons[trial % 4];
    const auto s = sketch_of(eps, rng(), zipf_stream(rng() % 20000, 1 + rng() % 100000, (rng() % 20) / 10.0, rng()));
    const auto enc = encode(s);
    const auto back = decode(enc);
    ASSERT_EQ(back, s);
    ASSERT_EQ(back.epsilon(), eps);
    ASSERT_EQ(enc.bit_length(), kHeaderBits + counter_section_bits(s.counters()));
    const auto file_back = decode(from_file_bytes(to_file_bytes(enc)));
    ASSERT_EQ(file_back, s);
  }
}

TEST(Codec, FlippedLengthPrefixBitIsRejected) {
  const auto s = sketch_of(1.0, 8, uniform_stream(400, 10, 8));
  const auto enc = encode(s);
  const std::vector<std::int64_t> counters(s.counters().begin(), s.counters().end());

  // Locate every bit of every gamma unary prefix (and its terminating one).
  std::vector<std::uint64_t> prefix_bits;
  std::uint64_t pos = 0;
  for (auto c : counters) {
    const std::uint64_t width = reference_gamma(static_cast<std::uint64_t>(std::llabs(c)) + 1).size() / 2 + 1;
    for (std::uint64_t i = 0; i < width; ++i) prefix_bits.push_back(pos + 1 + i);
    pos += counter_code_length(c);
  }
  ASSERT_GT(prefix_bits.size(), counters.size());
  for (auto bit : prefix_bits) {
    EncodedSketch corrupt = enc;
    corrupt.counters[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    EXPECT_THROW(decode(corrupt), DecodeError) << "flipped bit " << bit;
  }
}

TEST(Codec, TruncationReportsPosition) {
  const auto s = sketch_of(0.5, 9, uniform_stream(1000, 50, 9));
  auto enc = encode(s);
  enc.counter_bits -= 3;
  enc.counters.resize((enc.counter_bits + 7) / 8);
  try {
    decode(enc);
    FAIL() << "truncated sketch decoded";
  } catch (const DecodeError& e) {
    EXPECT_GE(e.position(), kHeaderBits);
    EXPECT_LE(e.position(), enc.bit_length());
  }
}

TEST(Codec, RejectsInconsistentHeader) {
  const auto s = sketch_of(0.5, 9, uniform_stream(100, 50, 9));
  auto enc = encode(s);
  enc.header.items_seen += 1;  // parity no longer matches
  EXPECT_THROW(decode(enc), DecodeError);
  enc = encode(s);
  enc.header.bucket_count = 7;
  EXPECT_THROW(decode(enc), DecodeError);
  enc = encode(s);
  enc.header.epsilon = 0.0;
  EXPECT_THROW(decode(enc), DecodeError);
}

TEST(Codec, RejectsNegativeZeroAndPadding) {
  // "1" + "1": a negative zero.
  EXPECT_THROW(decode_counters(std::vector<std::uint8_t>{0xc0}, 2, 1), DecodeError);
  // A valid zero followed by a stray padding bit.
  EXPECT_THROW(decode_counters(std::vector<std::uint8_t>{0x50}, 2, 1), DecodeError);
  EXPECT_EQ(decode_counters(std::vector<std::uint8_t>{0x40}, 2, 1), std::vector<std::int64_t>{0});
}

TEST(BitBudget, SmallCases) {
  EXPECT_THROW(bit_budget(0, 10), std::invalid_argument);
  EXPECT_EQ(counter_bit_budget(1, 0), 6u);  // 2 * ceil(log2 2) + 4
  EXPECT_GE(counter_bit_budget(1, 0), counter_section_bits(std::vector<std::int64_t>{0}));
  EXPECT_EQ(bit_budget(1, 0), 6u + kHeaderBits);
  // ceil(log2(10^6 / 401 + 2)) = ceil(log2 2495.8) = 12
  EXPECT_EQ(counter_bit_budget(401, 1'000'000), 2u * 401 * 12 + 4 * 401);
  // ceil(log2(10^5 / 40001 + 2)) = ceil(log2 4.4999) = 3
  EXPECT_EQ(counter_bit_budget(40001, 100'000), 10u * 40001);
  EXPECT_LT(counter_bit_budget(40001, 100'000), 40001.0 * std::log2(100'000.0));
}

TEST(BitBudget, ExactPowerBoundary) {
  // n/P + 2 = 4 exactly: ceil(log2 4) = 2.
  EXPECT_EQ(counter_bit_budget(5, 10), 2u * 5 * 2 + 4 * 5);
  // one more item pushes it to 3.
  EXPECT_EQ(counter_bit_budget(5, 11), 2u * 5 * 3 + 4 * 5);
}

TEST(BitBudget, UniformStreamWithinConcavityBound) {
  const auto s = sketch_of(0.1, 10, uniform_stream(1'000'000, default_universe(1'000'000), 10));
  const double p = static_cast<double>(s.bucket_count());
  const double concavity = 2 * p * std::log2(1e6 / p + 1) + 2 * p;
  const auto bits = counter_section_bits(s.counters());
  EXPECT_LE(static_cast<double>(bits), concavity);
  EXPECT_LE(encode(s).bit_length(), bit_budget(s.bucket_count(), s.items_seen()));
}

TEST(BitBudget, AllMassInOneBucket) {
  PartitionSketch s(0.1, 11);
  for (int i = 0; i < 1'000'000; ++i) s.update(12345);
  // One counter of 10^6: 1 + 2*19 + 1 bits, 400 zeros at 2 bits each.
  EXPECT_EQ(counter_section_bits(s.counters()), 40u + 800u);
  EXPECT_LE(encode(s).bit_length(), bit_budget(s.bucket_count(), s.items_seen()));
}

TEST(BitBudget, SoundOnRandomWorkloads) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const double eps = trial % 2 ? 0.5 : 0.2;
    const std::uint64_t n = rng() % 50000;
    const auto s = sketch_of(eps, rng(), zipf_stream(n, 1 + rng() % 1000, (rng() % 30) / 10.0, rng()));
    ASSERT_LE(encode(s).bit_length(), bit_budget(s.bucket_count(), n));
  }
}

TEST(FileFormat, BitExactLayout) {
  const PartitionSketch empty(1.0, 0x0102030405060708ULL);
  const auto bytes = to_file_bytes(encode(empty));
  const std::vector<std::uint8_t> expected = {
      'F', '2', 'S', 'K', 0x01,                                // magic, version
      0x3f, 0xf0, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,          // epsilon = 1.0
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x05,          // P
      0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08,          // seed
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,          // items seen
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x0a,          // counter bits
      0x55, 0x40,                                              // 01 x5, padded
      0x43, 0xf3, 0x52, 0xd1};                                 // CRC-32
  EXPECT_EQ(bytes, expected);
}

TEST(FileFormat, DetectsCorruption) {
  const auto s = sketch_of(0.5, 13, uniform_stream(500, 40, 13));
  const auto bytes = to_file_bytes(encode(s));
  for (std::size_t bit = 0; bit < bytes.size() * 8; bit += 7) {
    auto corrupt = bytes;
    corrupt[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    EXPECT_THROW(decode(from_file_bytes(corrupt)), DecodeError) << bit;
  }
  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_THROW(from_file_bytes(bad_version), DecodeError);
  EXPECT_THROW(from_file_bytes(std::span(bytes).first(20)), DecodeError);
  EXPECT_THROW(from_file_bytes(std::span(bytes).first(bytes.size() - 1)), DecodeError);
}

TEST(FileFormat, WriteAndReadFile) {
  const auto s = sketch_of(0.25, 14, uniform_stream(10000, 1000, 14));
  const auto path = std::filesystem::temp_directory_path() / "f2sketch_codec_test.f2sk";
  write_sketch_file(path, s);
  EXPECT_EQ(read_sketch_file(path), s);
  std::filesystem::remove(path);
}
