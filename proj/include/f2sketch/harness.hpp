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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f2sketch/oracle.hpp"
#include "f2sketch/streamgen.hpp"

namespace f2sketch {

enum class Workload { kUniform, kZipf, kEdisj, kMultilevel, kFile };

std::string_view to_string(Workload workload);
Workload parse_workload(std::string_view text);

struct ExperimentConfig {
  Workload workload = Workload::kUniform;
  std::uint64_t n = 100'000;
  double epsilon = 0.25;
  std::uint64_t trials = 400;
  std::uint64_t seed = 1;
  std::filesystem::path out;  // CSV destination; empty disables output
  bool baseline = false;      // also run the AMS tug-of-war sketch

  std::uint64_t universe_size = 0;  // 0 selects default_universe(n)
  double zipf_exponent = 1.0;
  std::uint64_t t = 8;
  std::uint64_t d = 1;
  EdisjLabel label = EdisjLabel::kYes;
  unsigned plant_level = 0;  // multilevel workload: 0 leaves the stream unplanted
  std::filesystem::path input;  // file workload: binary stream file
  double sketch_epsilon = 0.0;  // edisj experiment: 0 selects epsilon / 8

  bool wall_time = true;  // include the wall_time_us CSV column
  unsigned threads = 0;   // 0 selects hardware concurrency

  /// Throws std::invalid_argument if trials == 0 or epsilon is outside (0, 1].
  void validate() const;
};

/// One CSV row. estimate is exact for the partition sketch up to 2^53.
struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string estimator;  // "partition" or "ams"
  std::string label;      // EDISJ label, empty otherwise
  Wide exact_f2 = 0;
  double estimate = 0.0;
  double relative_error = 0.0;
  double squared_relative_error = 0.0;
  std::uint64_t encoded_bits = 0;
  std::uint64_t fixed_width_bits = 0;
  double wall_time_us = 0.0;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

/// Builds the configured workload stream. Deterministic in cfg.seed.
Stream make_workload_stream(const ExperimentConfig& cfg);
/// The multilevel workload with its layout, as used by make_workload_stream.
MultiLevelStream make_multilevel_workload(const ExperimentConfig& cfg);

struct MseSummary {
  std::uint64_t trials = 0;
  std::uint64_t bucket_count = 0;
  Wide exact_f2 = 0;
  Wide exact_f4 = 0;
  double empirical_mse = 0.0;
  double predicted_mse = 0.0;  // (2/P)(1 - F4/F2^2)
  double bound = 0.0;          // eps^2
  double slack = 0.0;          // 3 / sqrt(T)
  double threshold = 0.0;      // bound * (1 + slack)
  bool passed = false;
  std::optional<double> baseline_mse;
  std::vector<TrialRow> rows;
};

/// Fixes one stream and varies the hash seed across trials.
MseSummary run_mse_experiment(const ExperimentConfig& cfg);
MseSummary run_mse_experiment(const ExperimentConfig& cfg, const Stream& stream);

struct MemorySummary {
  std::uint64_t trials = 0;
  std::uint64_t bucket_count = 0;
  std::uint64_t items = 0;
  double mean_counter_bits = 0.0;
  std::uint64_t max_counter_bits = 0;
  std::uint64_t max_encoded_bits = 0;  // header included
  std::uint64_t counter_budget = 0;
  std::uint64_t budget = 0;            // bit_budget(P, n)
  std::uint64_t fixed_width_bits = 0;  // 64 P
  bool passed = false;
  std::vector<TrialRow> rows;
};

MemorySummary run_memory_experiment(const ExperimentConfig& cfg);
MemorySummary run_memory_experiment(const ExperimentConfig& cfg, const Stream& stream);

struct EdisjSummary {
  std::uint64_t trials = 0;  // per label
  double sketch_epsilon = 0.0;
  std::uint64_t k = 0;
  Wide yes_f2 = 0;
  Wide max_no_f2 = 0;
  double threshold = 0.0;
  std::uint64_t correct_yes = 0;
  std::uint64_t correct_no = 0;
  double accuracy = 0.0;
  double oracle_accuracy = 0.0;
  bool passed = false;
  std::vector<TrialRow> rows;
};

/// Classifies cfg.trials YES and cfg.trials NO instances with parameters
/// (n, t, epsilon, d) by thresholding the sketch estimate at the midpoint of
/// the YES and largest NO closed forms. NO instances alternate between the
/// disjoint and wrong-exam cases.
EdisjSummary run_edisj_experiment(const ExperimentConfig& cfg);

struct ExhaustiveCase {
  std::vector<std::uint64_t> frequencies;
  std::uint64_t bucket_count = 0;
  std::uint64_t assignments = 0;
  Rational mean;
  Rational variance;
  Rational f2;
  Rational predicted_variance;
  bool unbiased = false;
  bool variance_matches = false;
};

/// Frequency vectors and bucket counts of the default exhaustive grid.
std::vector<std::vector<std::uint64_t>> default_exhaustive_frequencies();
std::vector<ExhaustiveCase> run_exhaustive_check(
    const std::vector<std::vector<std::uint64_t>>& frequencies,
    const std::vector<std::uint64_t>& bucket_counts);

inline constexpr std::string_view kCsvSchemaLine = "# f2sketch-trials v1";

/// Writes the schema comment, the header and one line per row.
/// Throws std::runtime_error on I/O failure.
void emit_csv(const std::vector<TrialRow>& rows, const std::filesystem::path& path, bool wall_time = true);
std::vector<TrialRow> parse_csv(const std::filesystem::path& path);

/// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
/// results ordered by i.
std::vector<TrialRow> run_trials(std::uint64_t count, unsigned threads,
                                 const std::function<TrialRow(std::uint64_t)>& fn);

}  // namespace f2sketch
