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

#include "f2sketch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "f2sketch/codec.hpp"
#include "f2sketch/random.hpp"
#include "f2sketch/sketch.hpp"
#include "f2sketch/stream_io.hpp"

namespace f2sketch {
namespace {

// Stream seeds live in a different domain from per-trial hash seeds.
constexpr std::uint64_t kStreamDomain = 0x53545245414d5344ULL;

std::uint64_t stream_seed(std::uint64_t master) { return mix64(master ^ kStreamDomain); }

double elapsed_us(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
}

TrialRow score(std::uint64_t trial, std::uint64_t seed, std::string estimator, Wide exact_f2, double estimate,
               double rel_error) {
  TrialRow row;
  row.trial = trial;
  row.seed = seed;
  row.estimator = std::move(estimator);
  row.exact_f2 = exact_f2;
  row.estimate = estimate;
  row.relative_error = rel_error;
  row.squared_relative_error = rel_error * rel_error;
  return row;
}

double mean_squared_error(const std::vector<TrialRow>& rows, std::string_view estimator) {
  double total = 0.0;
  std::uint64_t count = 0;
  for (const auto& r : rows) {
    if (r.estimator != estimator) continue;
    total += r.squared_relative_error;
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace

std::string_view to_string(Workload workload) {
  switch (workload) {
    case Workload::kUniform:
      return "uniform";
    case Workload::kZipf:
      return "zipf";
    case Workload::kEdisj:
      return "edisj";
    case Workload::kMultilevel:
      return "multilevel";
    case Workload::kFile:
      return "file";
  }
  return "unknown";
}

Workload parse_workload(std::string_view text) {
  for (Workload w : {Workload::kUniform, Workload::kZipf, Workload::kEdisj, Workload::kMultilevel, Workload::kFile}) {
    if (text == to_string(w)) return w;
  }
  throw std::invalid_argument("unknown workload '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (sketch_epsilon != 0.0 && !(sketch_epsilon > 0.0 && sketch_epsilon <= 1.0)) {
    throw std::invalid_argument("sketch epsilon must lie in (0, 1]");
  }
  if (workload == Workload::kFile && input.empty()) throw std::invalid_argument("file workload needs an input path");
}

Stream make_workload_stream(const ExperimentConfig& cfg) {
  const std::uint64_t universe = cfg.universe_size == 0 ? default_universe(cfg.n) : cfg.universe_size;
  const std::uint64_t seed = stream_seed(cfg.seed);
  switch (cfg.workload) {
    case Workload::kUniform:
      return uniform_stream(cfg.n, universe, seed);
    case Workload::kZipf:
      return zipf_stream(cfg.n, universe, cfg.zipf_exponent, seed);
    case Workload::kEdisj: {
      EdisjParams params;
      params.n = cfg.n;
      params.t = cfg.t;
      params.epsilon = cfg.epsilon;
      params.d = cfg.d;
      params.label = cfg.label;
      params.seed = seed;
      params.universe_size = cfg.universe_size;
      return edisj_stream(edisj_instance(params));
    }
    case Workload::kMultilevel:
      return make_multilevel_workload(cfg).stream;
    case Workload::kFile:
      return read_stream_binary(cfg.input);
  }
  throw std::invalid_argument("unknown workload");
}

MultiLevelStream make_multilevel_workload(const ExperimentConfig& cfg) {
  std::optional<PlantRequest> plant;
  if (cfg.plant_level != 0) plant = PlantRequest{cfg.plant_level, cfg.label, ExamPlacement::kRandom};
  return multilevel_stream(cfg.n, cfg.epsilon, stream_seed(cfg.seed), plant, cfg.universe_size);
}

std::vector<TrialRow> run_trials(std::uint64_t count, unsigned threads,
                                 const std::function<TrialRow(std::uint64_t)>& fn) {
  std::vector<TrialRow> rows(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(count, 1)));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) rows[i] = fn(i);
    return rows;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::uint64_t i = next++; i < count; i = next++) {
          try {
            rows[i] = fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

MseSummary run_mse_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_mse_experiment(cfg, make_workload_stream(cfg));
}

MseSummary run_mse_experiment(const ExperimentConfig& cfg, const Stream& stream) {
  cfg.validate();
  MseSummary summary;
  summary.trials = cfg.trials;
  summary.bucket_count = bucket_count_for(cfg.epsilon);

  // Scoring pass; the sketches below never see these values.
  const Histogram hist(stream);
  summary.exact_f2 = exact_f2(hist);
  summary.exact_f4 = exact_f4(hist);

  summary.rows = run_trials(cfg.trials, cfg.threads, [&](std::uint64_t i) {
    const std::uint64_t seed = derive_seed(cfg.seed, i);
    const auto start = std::chrono::steady_clock::now();
    PartitionSketch sketch(cfg.epsilon, seed);
    sketch.update_all(stream);
    const Wide estimate = sketch.estimate();
    const double wall = elapsed_us(start);
    TrialRow row = score(i, seed, "partition", summary.exact_f2, to_double(estimate),
                         relative_error(estimate, summary.exact_f2));
    row.encoded_bits = encode(sketch).bit_length();
    row.fixed_width_bits = fixed_width_bits(sketch.bucket_count());
    row.wall_time_us = wall;
    return row;
  });
  summary.empirical_mse = mean_squared_error(summary.rows, "partition");

  if (cfg.baseline) {
    const std::size_t r = ams_estimator_count_for(cfg.epsilon);
    auto baseline = run_trials(cfg.trials, cfg.threads, [&](std::uint64_t i) {
      const std::uint64_t seed = derive_seed(cfg.seed, i);
      const auto start = std::chrono::steady_clock::now();
      AmsSketch ams(cfg.epsilon, r, seed);
      ams.update_all(stream);
      const double estimate = ams.estimate();
      TrialRow row = score(i, seed, "ams", summary.exact_f2, estimate, relative_error(estimate, summary.exact_f2));
      row.fixed_width_bits = 64 * r;
      row.wall_time_us = elapsed_us(start);
      return row;
    });
    summary.baseline_mse = mean_squared_error(baseline, "ams");
    summary.rows.insert(summary.rows.end(), baseline.begin(), baseline.end());
  }

  const double f2 = to_double(summary.exact_f2);
  summary.predicted_mse =
      f2 == 0.0 ? 0.0 : 2.0 / static_cast<double>(summary.bucket_count) * (1.0 - to_double(summary.exact_f4) / (f2 * f2));
  summary.bound = cfg.epsilon * cfg.epsilon;
  summary.slack = 3.0 / std::sqrt(static_cast<double>(cfg.trials));
  summary.threshold = summary.bound * (1.0 + summary.slack);
  summary.passed = summary.empirical_mse < summary.threshold;
  if (!cfg.out.empty()) emit_csv(summary.rows, cfg.out, cfg.wall_time);
  return summary;
}

MemorySummary run_memory_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_memory_experiment(cfg, make_workload_stream(cfg));
}

MemorySummary run_memory_experiment(const ExperimentConfig& cfg, const Stream& stream) {
  cfg.validate();
  MemorySummary summary;
  summary.trials = cfg.trials;
  summary.bucket_count = bucket_count_for(cfg.epsilon);
  summary.items = stream.size();
  summary.counter_budget = counter_bit_budget(summary.bucket_count, summary.items);
  summary.budget = bit_budget(summary.bucket_count, summary.items);
  summary.fixed_width_bits = fixed_width_bits(summary.bucket_count);
  const Wide f2 = exact_f2(Histogram(stream));

  summary.rows = run_trials(cfg.trials, cfg.threads, [&](std::uint64_t i) {
    const std::uint64_t seed = derive_seed(cfg.seed, i);
    const auto start = std::chrono::steady_clock::now();
    PartitionSketch sketch(cfg.epsilon, seed);
    sketch.update_all(stream);
    const EncodedSketch encoded = encode(sketch);
    const double wall = elapsed_us(start);
    const Wide estimate = sketch.estimate();
    TrialRow row = score(i, seed, "partition", f2, to_double(estimate), relative_error(estimate, f2));
    row.encoded_bits = encoded.bit_length();
    row.fixed_width_bits = summary.fixed_width_bits;
    row.wall_time_us = wall;
    return row;
  });

  double total = 0.0;
  for (const auto& r : summary.rows) {
    const std::uint64_t counter_bits = r.encoded_bits - kHeaderBits;
    total += static_cast<double>(counter_bits);
    summary.max_counter_bits = std::max(summary.max_counter_bits, counter_bits);
    summary.max_encoded_bits = std::max(summary.max_encoded_bits, r.encoded_bits);
  }
  summary.mean_counter_bits = total / static_cast<double>(summary.rows.size());
  summary.passed = summary.max_encoded_bits <= summary.budget;
  if (!cfg.out.empty()) emit_csv(summary.rows, cfg.out, cfg.wall_time);
  return summary;
}

EdisjSummary run_edisj_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  EdisjSummary summary;
  summary.trials = cfg.trials;
  summary.sketch_epsilon = cfg.sketch_epsilon != 0.0 ? cfg.sketch_epsilon : cfg.epsilon / 8.0;

  EdisjParams base;
  base.n = cfg.n;
  base.t = cfg.t;
  base.epsilon = cfg.epsilon;
  base.d = cfg.d;
  base.universe_size = cfg.universe_size;
  // Validates the parameters once before the trial loop.
  const EdisjInstance probe = edisj_instance(base);
  summary.k = probe.k;
  summary.yes_f2 = yes_f2(cfg.n, cfg.t, cfg.d, probe.k);
  summary.max_no_f2 = max_no_f2(cfg.n, cfg.t, cfg.d, probe.k);
  summary.threshold = (to_double(summary.yes_f2) + to_double(summary.max_no_f2)) / 2.0;

  // Rows 2i and 2i+1 hold the YES and NO instance of trial i.
  summary.rows = run_trials(2 * cfg.trials, cfg.threads, [&](std::uint64_t j) {
    const std::uint64_t trial = j / 2;
    EdisjParams params = base;
    if (j % 2 == 0) {
      params.label = EdisjLabel::kYes;
    } else {
      params.label = trial % 2 == 0 ? EdisjLabel::kNoDisjoint : EdisjLabel::kNoWrongExam;
    }
    params.seed = stream_seed(derive_seed(cfg.seed, j));
    const Stream stream = edisj_stream(edisj_instance(params));
    const Wide f2 = exact_f2(Histogram(stream));

    const std::uint64_t seed = derive_seed(cfg.seed, j);
    const auto start = std::chrono::steady_clock::now();
    PartitionSketch sketch(summary.sketch_epsilon, seed);
    sketch.update_all(stream);
    const Wide estimate = sketch.estimate();
    TrialRow row = score(trial, seed, "partition", f2, to_double(estimate), relative_error(estimate, f2));
    row.label = std::string(to_string(params.label));
    row.encoded_bits = encode(sketch).bit_length();
    row.fixed_width_bits = fixed_width_bits(sketch.bucket_count());
    row.wall_time_us = elapsed_us(start);
    return row;
  });

  std::uint64_t oracle_correct = 0;
  for (const auto& r : summary.rows) {
    const bool truth = r.label == to_string(EdisjLabel::kYes);
    const bool guess = r.estimate >= summary.threshold;
    const bool oracle_guess = to_double(r.exact_f2) >= summary.threshold;
    if (guess == truth) ++(truth ? summary.correct_yes : summary.correct_no);
    if (oracle_guess == truth) ++oracle_correct;
  }
  const double total = static_cast<double>(summary.rows.size());
  summary.accuracy = static_cast<double>(summary.correct_yes + summary.correct_no) / total;
  summary.oracle_accuracy = static_cast<double>(oracle_correct) / total;
  summary.passed = 3 * (summary.correct_yes + summary.correct_no) >= 2 * summary.rows.size();
  if (!cfg.out.empty()) emit_csv(summary.rows, cfg.out, cfg.wall_time);
  return summary;
}

std::vector<std::vector<std::uint64_t>> default_exhaustive_frequencies() {
  return {{1}, {2}, {1, 1}, {2, 1}, {2, 1, 1}, {3, 2, 1}};
}

std::vector<ExhaustiveCase> run_exhaustive_check(const std::vector<std::vector<std::uint64_t>>& frequencies,
                                                 const std::vector<std::uint64_t>& bucket_counts) {
  std::vector<ExhaustiveCase> cases;
  for (const auto& freqs : frequencies) {
    for (std::uint64_t buckets : bucket_counts) {
      ExhaustiveCase c;
      c.frequencies = freqs;
      c.bucket_count = buckets;
      const ExhaustiveMoments m = exhaustive_sketch_moments(freqs, buckets);
      c.assignments = m.assignments;
      c.mean = m.mean;
      c.variance = m.variance;
      BigInt f2 = 0;
      for (auto f : freqs) f2 += BigInt(f) * f;
      c.f2 = Rational(f2);
      c.predicted_variance = predicted_variance(freqs, buckets);
      c.unbiased = c.mean == c.f2;
      c.variance_matches = c.variance == c.predicted_variance;
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

void emit_csv(const std::vector<TrialRow>& rows, const std::filesystem::path& path, bool wall_time) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << kCsvSchemaLine << '\n';
  out << "trial,seed,estimator,label,exact_f2,estimate,relative_error,squared_relative_error,"
         "encoded_bits,fixed_width_bits";
  if (wall_time) out << ",wall_time_us";
  out << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.seed << ',' << r.estimator << ',' << r.label << ',' << to_string(r.exact_f2) << ','
        << format_double(r.estimate) << ',' << format_double(r.relative_error) << ','
        << format_double(r.squared_relative_error) << ',' << r.encoded_bits << ',' << r.fixed_width_bits;
    if (wall_time) out << ',' << format_double(r.wall_time_us);
    out << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

namespace {

template <typename T>
T parse_number(std::string_view field, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error(where + ": bad numeric field '" + std::string(field) + "'");
  }
  return value;
}

Wide parse_wide(std::string_view field, const std::string& where) {
  if (field.empty()) throw std::runtime_error(where + ": empty integer field");
  Wide value = 0;
  for (char c : field) {
    if (c < '0' || c > '9') throw std::runtime_error(where + ": bad integer field '" + std::string(field) + "'");
    value = value * 10 + static_cast<unsigned>(c - '0');
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<TrialRow> parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvSchemaLine) {
    throw std::runtime_error(path.string() + ": missing schema line '" + std::string(kCsvSchemaLine) + "'");
  }
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header");
  const std::size_t columns = split(line).size();
  if (columns != 10 && columns != 11) throw std::runtime_error(path.string() + ": unexpected header");

  std::vector<TrialRow> rows;
  std::size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string where = path.string() + ":" + std::to_string(line_number);
    const auto f = split(line);
    if (f.size() != columns) throw std::runtime_error(where + ": expected " + std::to_string(columns) + " fields");
    TrialRow r;
    r.trial = parse_number<std::uint64_t>(f[0], where);
    r.seed = parse_number<std::uint64_t>(f[1], where);
    r.estimator = std::string(f[2]);
    r.label = std::string(f[3]);
    r.exact_f2 = parse_wide(f[4], where);
    r.estimate = parse_number<double>(f[5], where);
    r.relative_error = parse_number<double>(f[6], where);
    r.squared_relative_error = parse_number<double>(f[7], where);
    r.encoded_bits = parse_number<std::uint64_t>(f[8], where);
    r.fixed_width_bits = parse_number<std::uint64_t>(f[9], where);
    if (columns == 11) r.wall_time_us = parse_number<double>(f[10], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace f2sketch
