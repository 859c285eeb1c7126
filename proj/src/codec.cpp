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

#include "f2sketch/codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <climits>
#include <cstring>
#include <fstream>
#include <iterator>

namespace f2sketch {

void BitWriter::write_bit(bool bit) {
  if (bit_length_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bit_length_ % 8));
  ++bit_length_;
}

void BitWriter::write_bits(std::uint64_t value, unsigned width) {
  for (unsigned i = width; i-- > 0;) write_bit(((value >> i) & 1u) != 0);
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length)
    : bytes_(bytes), bit_length_(bit_length) {
  if (bit_length > bytes.size() * 8) {
    throw DecodeError("declared bit length exceeds the buffer", bytes.size() * 8);
  }
}

bool BitReader::read_bit() {
  if (position_ >= bit_length_) throw DecodeError("bitstream truncated", position_);
  const bool bit = (bytes_[position_ / 8] >> (7 - position_ % 8)) & 1u;
  ++position_;
  return bit;
}

DecodeError::DecodeError(const std::string& what, std::uint64_t bit_position)
    : std::runtime_error(what + " at bit " + std::to_string(bit_position)),
      reason_(what),
      position_(bit_position) {}

unsigned gamma_length(std::uint64_t value) {
  return 2 * static_cast<unsigned>(std::bit_width(value) - 1) + 1;
}

void write_gamma(BitWriter& out, std::uint64_t value) {
  const unsigned width = static_cast<unsigned>(std::bit_width(value));
  for (unsigned i = 1; i < width; ++i) out.write_bit(false);
  out.write_bits(value, width);
}

std::uint64_t read_gamma(BitReader& in) {
  const std::uint64_t start = in.position();
  unsigned zeros = 0;
  while (!in.read_bit()) {
    if (++zeros > 63) throw DecodeError("gamma prefix longer than 63 bits", start);
  }
  std::uint64_t value = 1;
  for (unsigned i = 0; i < zeros; ++i) value = (value << 1) | (in.read_bit() ? 1u : 0u);
  return value;
}

std::uint64_t counter_code_length(std::int64_t counter) {
  const auto magnitude = static_cast<std::uint64_t>(counter < 0 ? -counter : counter);
  return 1 + gamma_length(magnitude + 1);
}

std::uint64_t counter_section_bits(std::span<const std::int64_t> counters) {
  std::uint64_t bits = 0;
  for (std::int64_t c : counters) bits += counter_code_length(c);
  return bits;
}

std::vector<std::uint8_t> encode_counters(std::span<const std::int64_t> counters, std::uint64_t& bit_length) {
  BitWriter out;
  for (std::int64_t c : counters) {
    out.write_bit(c < 0);
    write_gamma(out, static_cast<std::uint64_t>(c < 0 ? -c : c) + 1);
  }
  bit_length = out.bit_length();
  return out.take_bytes();
}

std::vector<std::int64_t> decode_counters(std::span<const std::uint8_t> bytes, std::uint64_t bit_length,
                                          std::uint64_t count) {
  if (bytes.size() != (bit_length + 7) / 8) {
    throw DecodeError("byte length does not match the declared bit length", 0);
  }
  BitReader in(bytes, bit_length);
  std::vector<std::int64_t> counters;
  counters.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, bit_length / 2 + 1)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t start = in.position();
    const bool negative = in.read_bit();
    const std::uint64_t magnitude = read_gamma(in) - 1;
    if (magnitude > static_cast<std::uint64_t>(INT64_MAX)) {
      throw DecodeError("counter " + std::to_string(i) + " overflows 64 bits", start);
    }
    if (negative && magnitude == 0) throw DecodeError("counter " + std::to_string(i) + " is a negative zero", start);
    const auto value = static_cast<std::int64_t>(magnitude);
    counters.push_back(negative ? -value : value);
  }
  if (in.remaining() != 0) {
    throw DecodeError(std::to_string(in.remaining()) + " trailing bits after the last counter", in.position());
  }
  if (bit_length % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xffu >> (bit_length % 8));
    if ((bytes.back() & pad_mask) != 0) throw DecodeError("non-zero padding", bit_length);
  }
  return counters;
}

EncodedSketch encode(const PartitionSketch& sketch) {
  EncodedSketch encoded;
  encoded.header = {sketch.epsilon(), sketch.bucket_count(), sketch.seed(), sketch.items_seen()};
  encoded.counters = encode_counters(sketch.counters(), encoded.counter_bits);
  return encoded;
}

PartitionSketch decode(const EncodedSketch& encoded) {
  const SketchHeader& header = encoded.header;
  std::uint64_t expected_buckets = 0;
  try {
    expected_buckets = bucket_count_for(header.epsilon);
  } catch (const std::invalid_argument& e) {
    throw DecodeError(std::string("bad header epsilon: ") + e.what(), 0);
  }
  if (header.bucket_count != expected_buckets) {
    throw DecodeError("header bucket count " + std::to_string(header.bucket_count) +
                          " does not match epsilon (expected " + std::to_string(expected_buckets) + ")",
                      64);
  }
  std::vector<std::int64_t> counters;
  try {
    counters = decode_counters(encoded.counters, encoded.counter_bits, header.bucket_count);
  } catch (const DecodeError& e) {
    throw DecodeError("counter section: " + e.reason(), kHeaderBits + e.position());
  }
  try {
    return PartitionSketch::from_parts(header.epsilon, header.seed, std::move(counters),
                                       header.items_seen);
  } catch (const std::invalid_argument& e) {
    throw DecodeError(std::string("inconsistent counters: ") + e.what(), kHeaderBits);
  }
}

std::uint64_t counter_bit_budget(std::uint64_t bucket_count, std::uint64_t items) {
  if (bucket_count == 0) throw std::invalid_argument("bucket count must be at least 1");
  // ceil(log2((n + 2P) / P)) is the least k with P * 2^k >= n + 2P.
  const Wide target = static_cast<Wide>(items) + 2 * static_cast<Wide>(bucket_count);
  std::uint64_t log_ceiling = 0;
  while ((static_cast<Wide>(bucket_count) << log_ceiling) < target) ++log_ceiling;
  return 2 * bucket_count * log_ceiling + 4 * bucket_count;
}

std::uint64_t bit_budget(std::uint64_t bucket_count, std::uint64_t items) {
  return counter_bit_budget(bucket_count, items) + kHeaderBits;
}

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(value >> shift));
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < 8; ++i) value = (value << 8) | bytes[offset + i];
  return value;
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

constexpr char kMagic[4] = {'F', '2', 'S', 'K'};

}  // namespace

std::vector<std::uint8_t> to_file_bytes(const EncodedSketch& encoded) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kFileVersion);
  put_u64(out, std::bit_cast<std::uint64_t>(encoded.header.epsilon));
  put_u64(out, encoded.header.bucket_count);
  put_u64(out, encoded.header.seed);
  put_u64(out, encoded.header.items_seen);
  put_u64(out, encoded.counter_bits);
  out.insert(out.end(), encoded.counters.begin(), encoded.counters.end());
  const std::uint32_t crc = crc32_of(out);
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(crc >> shift));
  return out;
}

EncodedSketch from_file_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFileHeaderBytes + 4) throw DecodeError("file shorter than the fixed header", bytes.size() * 8);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DecodeError("bad magic, expected F2SK", 0);
  if (bytes[4] != kFileVersion) {
    throw DecodeError("unsupported version " + std::to_string(bytes[4]), 32);
  }
  const std::size_t body = bytes.size() - 4;
  const std::uint32_t stored = (std::uint32_t{bytes[body]} << 24) | (std::uint32_t{bytes[body + 1]} << 16) |
                               (std::uint32_t{bytes[body + 2]} << 8) | std::uint32_t{bytes[body + 3]};
  if (crc32_of(bytes.first(body)) != stored) throw DecodeError("checksum mismatch", body * 8);

  EncodedSketch encoded;
  encoded.header.epsilon = std::bit_cast<double>(get_u64(bytes, 5));
  encoded.header.bucket_count = get_u64(bytes, 13);
  encoded.header.seed = get_u64(bytes, 21);
  encoded.header.items_seen = get_u64(bytes, 29);
  encoded.counter_bits = get_u64(bytes, 37);
  if ((encoded.counter_bits + 7) / 8 != body - kFileHeaderBytes) {
    throw DecodeError("counter section length disagrees with the file size", 37 * 8);
  }
  encoded.counters.assign(bytes.begin() + kFileHeaderBytes, bytes.begin() + static_cast<std::ptrdiff_t>(body));
  return encoded;
}

void write_sketch_file(const std::filesystem::path& path, const PartitionSketch& sketch) {
  const auto bytes = to_file_bytes(encode(sketch));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

PartitionSketch read_sketch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(from_file_bytes(bytes));
}

}  // namespace f2sketch
