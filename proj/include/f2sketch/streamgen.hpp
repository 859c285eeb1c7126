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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "f2sketch/types.hpp"

namespace f2sketch {

/// A finite stream of universe element ids; n is its size().
using Stream = std::vector<ElementId>;

/// Ids must stay below the hash field order.
inline constexpr std::uint64_t kMaxUniverse = (std::uint64_t{1} << 61) - 1;

/// n^3 + 1, capped at kMaxUniverse.
std::uint64_t default_universe(std::uint64_t n);

/// n i.i.d. uniform draws from [0, universe_size).
Stream uniform_stream(std::uint64_t n, std::uint64_t universe_size, std::uint64_t seed);

/// n i.i.d. draws of rank - 1 where rank ~ Zipf(exponent) on [1, universe_size].
/// exponent == 0 reproduces uniform_stream exactly.
Stream zipf_stream(std::uint64_t n, std::uint64_t universe_size, double exponent, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Exam-disjointness gap instances
// ---------------------------------------------------------------------------

enum class EdisjLabel { kYes, kNoDisjoint, kNoWrongExam };

std::string_view to_string(EdisjLabel label);
/// Accepts "yes", "no_disjoint", "no_wrong_exam". Throws std::invalid_argument.
EdisjLabel parse_label(std::string_view text);

/// Where a NO instance puts the exam tuple: in no set, or in exactly one set.
enum class ExamPlacement { kRandom, kOutside, kInsideOneSet };

struct EdisjParams {
  std::uint64_t n = 0;      // total length of the players' part of the stream
  std::uint64_t t = 2;      // number of players
  double epsilon = 1.0;
  std::uint64_t d = 1;      // super-element width
  EdisjLabel label = EdisjLabel::kYes;
  std::uint64_t seed = 0;
  std::uint64_t universe_size = 0;  // 0 selects default_universe(n)
  ExamPlacement placement = ExamPlacement::kRandom;
};

/// Tuples over U^d are stored by their base id; a tuple is the d
/// consecutive ids [base, base + d).
struct EdisjInstance {
  std::uint64_t n = 0;
  std::uint64_t t = 0;
  std::uint64_t d = 1;
  std::uint64_t k = 0;  // referee repetitions, ceil(t / eps)
  double epsilon = 1.0;
  EdisjLabel label = EdisjLabel::kYes;
  std::uint64_t universe_size = 0;
  std::vector<std::vector<ElementId>> sets;  // sorted tuple bases per player
  ElementId exam = 0;
  std::optional<ElementId> common;  // tuple shared by all sets, if any

  std::uint64_t set_size() const { return n / (d * t); }
  std::uint64_t stream_length() const { return n + k * d; }
};

/// d = floor(eps^2 n / t^2), the single-instance super-element width.
std::uint64_t single_instance_width(std::uint64_t n, std::uint64_t t, double epsilon);

/// Throws std::invalid_argument unless 2 <= t <= eps*sqrt(n), d >= 1,
/// d*t divides n and the universe exceeds n^3 (or is the maximum universe).
EdisjInstance edisj_instance(const EdisjParams& params);
EdisjInstance edisj_instance(std::uint64_t n, std::uint64_t t, double epsilon, std::uint64_t d,
                             EdisjLabel label, std::uint64_t seed);

/// S_1..S_t flattened tuple by tuple, then k copies of the exam tuple.
Stream edisj_stream(const EdisjInstance& instance);

/// Exact F2 of edisj_stream(instance) from the instance's structure.
Wide closed_form_f2(const EdisjInstance& instance);
/// d * (n/d + t^2 - t + k^2 + 2tk).
Wide yes_f2(std::uint64_t n, std::uint64_t t, std::uint64_t d, std::uint64_t k);
/// Largest F2 any NO instance can reach: d * (n/d + t^2 - t + k^2 + 2k).
Wide max_no_f2(std::uint64_t n, std::uint64_t t, std::uint64_t d, std::uint64_t k);

/// Structural check of the label and non-overlap promises, read off the raw
/// sets. Returns a description of the first violation.
std::optional<std::string> validate_instance(const EdisjInstance& instance);

// ---------------------------------------------------------------------------
// Multi-level packing
// ---------------------------------------------------------------------------

struct ActiveBucket {
  std::uint64_t index = 0;  // 1-based bucket index, divisible by four
  std::uint64_t begin = 0;  // stream offsets [begin, end)
  std::uint64_t end = 0;
};

struct LevelLayout {
  unsigned level = 0;
  std::uint64_t t = 0;  // 2^level players
  std::uint64_t bucket_count = 0;
  std::uint64_t bucket_length = 0;
  std::uint64_t super_width = 0;  // d = eps^2 n / (4 t^2)
  std::uint64_t supers_per_active = 0;
  std::vector<ActiveBucket> active;
};

struct PlantRequest {
  unsigned level = 1;
  EdisjLabel label = EdisjLabel::kYes;
  ExamPlacement placement = ExamPlacement::kRandom;
};

struct PlantedInstance {
  unsigned level = 0;
  std::uint64_t suffix_begin = 0;
  std::uint64_t suffix_length = 0;
  EdisjInstance instance;
};

struct MultiLevelLayout {
  std::uint64_t n = 0;
  double epsilon = 1.0;
  std::vector<LevelLayout> levels;
  std::optional<PlantedInstance> planted;
};

struct MultiLevelStream {
  Stream stream;
  MultiLevelLayout layout;
};

/// Raised for shape violations; carries the nearest valid parameters.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(const std::string& what, std::uint64_t suggested_n, double suggested_epsilon);
  std::uint64_t suggested_n() const { return suggested_n_; }
  double suggested_epsilon() const { return suggested_epsilon_; }

 private:
  std::uint64_t suggested_n_;
  double suggested_epsilon_;
};

/// Geometry only. Requires n a power of four, 1/eps a power of two and
/// eps > 4/sqrt(n); otherwise throws ParameterError.
MultiLevelLayout multilevel_layout(std::uint64_t n, double epsilon);

/// A uniform stream with its level layout. With a plant request, the active
/// buckets of that level are overwritten by an EDISJ instance and the
/// referee suffix is appended.
MultiLevelStream multilevel_stream(std::uint64_t n, double epsilon, std::uint64_t seed,
                                   std::optional<PlantRequest> plant = std::nullopt,
                                   std::uint64_t universe_size = 0);

/// Checks tiling, active-bucket indices and super-element counts.
std::optional<std::string> validate_layout(const MultiLevelLayout& layout);

}  // namespace f2sketch
