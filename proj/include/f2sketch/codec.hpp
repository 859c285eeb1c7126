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
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "f2sketch/sketch.hpp"

namespace f2sketch {

/// Appends bits MSB-first into a byte vector.
class BitWriter {
 public:
  void write_bit(bool bit);
  /// Writes the low `width` bits of value, most significant first.
  void write_bits(std::uint64_t value, unsigned width);

  std::uint64_t bit_length() const { return bit_length_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> take_bytes() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bit_length_ = 0;
};

/// Reads an MSB-first bitstream of a known bit length.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length);

  /// Throws DecodeError at the current position when exhausted.
  bool read_bit();
  std::uint64_t position() const { return position_; }
  std::uint64_t remaining() const { return bit_length_ - position_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t bit_length_;
  std::uint64_t position_ = 0;
};

/// Malformed input. position() is the bit offset where decoding failed.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::uint64_t bit_position);
  std::uint64_t position() const { return position_; }
  /// Message without the position suffix.
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  std::uint64_t position_;
};

/// Elias-gamma: floor(log2 v) zeros, then v in binary. v >= 1.
void write_gamma(BitWriter& out, std::uint64_t value);
std::uint64_t read_gamma(BitReader& in);
/// 2 * floor(log2 v) + 1.
unsigned gamma_length(std::uint64_t value);

/// Bits used for one counter: a sign bit plus gamma(|c| + 1).
std::uint64_t counter_code_length(std::int64_t counter);
/// Bits of the whole counter section.
std::uint64_t counter_section_bits(std::span<const std::int64_t> counters);

/// Encodes counters back to back: sign bit, then gamma(|c| + 1).
std::vector<std::uint8_t> encode_counters(std::span<const std::int64_t> counters, std::uint64_t& bit_length);

/// Decodes exactly `count` counters consuming exactly `bit_length` bits.
/// Rejects negative zeros and non-zero padding. Positions in errors are
/// offsets into this bitstream.
std::vector<std::int64_t> decode_counters(std::span<const std::uint8_t> bytes, std::uint64_t bit_length,
                                          std::uint64_t count);

/// Fixed header fields: epsilon (IEEE-754 bits), P, seed, items_seen.
inline constexpr std::uint64_t kHeaderBits = 4 * 64;

struct SketchHeader {
  double epsilon = 1.0;
  std::uint64_t bucket_count = 0;
  std::uint64_t seed = 0;
  std::uint64_t items_seen = 0;

  friend bool operator==(const SketchHeader&, const SketchHeader&) = default;
};

/// A sketch at rest. `counters` holds counter_bits packed bits, zero padded
/// to a byte boundary.
struct EncodedSketch {
  SketchHeader header;
  std::vector<std::uint8_t> counters;
  std::uint64_t counter_bits = 0;

  std::uint64_t bit_length() const { return kHeaderBits + counter_bits; }
};

EncodedSketch encode(const PartitionSketch& sketch);

/// Inverse of encode. Throws DecodeError on truncated or malformed input,
/// including leftover bits, non-zero padding, a negative zero and counters
/// inconsistent with items_seen.
PartitionSketch decode(const EncodedSketch& encoded);

/// 2P * ceil(log2(n/P + 2)) + 4P: a bound on counter_section_bits for any
/// length-n update sequence.
std::uint64_t counter_bit_budget(std::uint64_t bucket_count, std::uint64_t items);

/// counter_bit_budget plus the header. Throws std::invalid_argument if P == 0.
std::uint64_t bit_budget(std::uint64_t bucket_count, std::uint64_t items);

/// Bits used by a plain array of P 64-bit counters.
inline std::uint64_t fixed_width_bits(std::uint64_t bucket_count) { return 64 * bucket_count; }

// "F2SK" v1 file container. All integers big-endian.
//
//   offset  size  field
//   0       4     magic "F2SK"
//   4       1     version = 1
//   5       8     epsilon, IEEE-754 binary64 bits
//   13      8     bucket count P
//   21      8     hash seed
//   29      8     items seen n
//   37      8     counter section length in bits
//   45      m     counter section, m = ceil(bits / 8), zero padded
//   45+m    4     CRC-32 (IEEE 802.3) of bytes [0, 45+m)
inline constexpr std::uint8_t kFileVersion = 1;
inline constexpr std::size_t kFileHeaderBytes = 45;

std::vector<std::uint8_t> to_file_bytes(const EncodedSketch& encoded);
/// Throws DecodeError; position() is a bit offset into the file.
EncodedSketch from_file_bytes(std::span<const std::uint8_t> bytes);

void write_sketch_file(const std::filesystem::path& path, const PartitionSketch& sketch);
PartitionSketch read_sketch_file(const std::filesystem::path& path);

}  // namespace f2sketch
