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

// f2bench: experiment runner for the partition F2 sketch.
//
//   f2bench mse        --epsilon 0.25 --n 100000 --trials 400
//   f2bench memory     --epsilon 0.1 --n 1000000
//   f2bench edisj      --n 4096 --t 8 --epsilon 0.25 --trials 200
//   f2bench gen        --workload multilevel --n 4096 --epsilon 0.25 --out s.bin
//   f2bench exhaustive
//
// Exit status: 0 when every pass/fail criterion holds, 1 when one fails,
// 2 on bad arguments.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "f2sketch/harness.hpp"
#include "f2sketch/stream_io.hpp"
#include "json.hpp"

namespace {

using f2sketch::ExperimentConfig;

struct Options {
  ExperimentConfig cfg;
  std::string workload = "uniform";
  std::string label = "yes";
  std::string config_path;
  std::string format = "binary";
  std::string freqs;
  std::vector<std::uint64_t> buckets = {1, 2, 3};
  bool no_wall_time = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.cfg.epsilon, "Target relative error in (0, 1]");
  cmd->add_option("--n", o.cfg.n, "Stream length");
  cmd->add_option("--trials", o.cfg.trials, "Independent hash seeds (per label for edisj)");
  cmd->add_option("--seed", o.cfg.seed, "Master seed");
  cmd->add_option("--workload", o.workload, "uniform | zipf | edisj | multilevel | file");
  cmd->add_option("--out", o.cfg.out, "CSV output path (stream path for gen)");
  cmd->add_flag("--baseline", o.cfg.baseline, "Also run the AMS tug-of-war baseline");
  cmd->add_option("--d", o.cfg.d, "EDISJ super-element width");
  cmd->add_option("--t", o.cfg.t, "EDISJ player count");
  cmd->add_option("--label", o.label, "EDISJ label: yes | no_disjoint | no_wrong_exam");
  cmd->add_option("--universe", o.cfg.universe_size, "Universe size (0: n^3 + 1)");
  cmd->add_option("--zipf-exponent", o.cfg.zipf_exponent, "Zipf exponent");
  cmd->add_option("--plant-level", o.cfg.plant_level, "Multilevel: plant an EDISJ instance at this level");
  cmd->add_option("--input", o.cfg.input, "File workload: binary stream file");
  cmd->add_option("--sketch-epsilon", o.cfg.sketch_epsilon, "edisj: sketch error parameter (default epsilon/8)");
  cmd->add_option("--threads", o.cfg.threads, "Worker threads (0: all cores)");
  cmd->add_flag("--no-wall-time", o.no_wall_time, "Omit the wall-time CSV column");
  cmd->add_option("--config", o.config_path, "JSON config file; its values override flags");
}

// Keys mirror the long flag names with dashes replaced by underscores.
void apply_config(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  const auto doc = nlohmann::json::parse(in);
  auto& c = o.cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "epsilon") c.epsilon = value.get<double>();
    else if (key == "n") c.n = value.get<std::uint64_t>();
    else if (key == "trials") c.trials = value.get<std::uint64_t>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "workload") o.workload = value.get<std::string>();
    else if (key == "out") c.out = value.get<std::string>();
    else if (key == "baseline") c.baseline = value.get<bool>();
    else if (key == "d") c.d = value.get<std::uint64_t>();
    else if (key == "t") c.t = value.get<std::uint64_t>();
    else if (key == "label") o.label = value.get<std::string>();
    else if (key == "universe") c.universe_size = value.get<std::uint64_t>();
    else if (key == "zipf_exponent") c.zipf_exponent = value.get<double>();
    else if (key == "plant_level") c.plant_level = value.get<unsigned>();
    else if (key == "input") c.input = value.get<std::string>();
    else if (key == "sketch_epsilon") c.sketch_epsilon = value.get<double>();
    else if (key == "threads") c.threads = value.get<unsigned>();
    else if (key == "no_wall_time") o.no_wall_time = value.get<bool>();
    else throw std::runtime_error("unknown config key '" + key + "'");
  }
}

void finalize(Options& o) {
  if (!o.config_path.empty()) apply_config(o.config_path, o);
  o.cfg.workload = f2sketch::parse_workload(o.workload);
  o.cfg.label = f2sketch::parse_label(o.label);
  o.cfg.wall_time = !o.no_wall_time;
  o.cfg.validate();
}

const char* verdict(bool passed) { return passed ? "PASS" : "FAIL"; }

int run_mse(Options& o) {
  const auto s = f2sketch::run_mse_experiment(o.cfg);
  std::cout << "buckets=" << s.bucket_count << " trials=" << s.trials << " exact_f2=" << f2sketch::to_string(s.exact_f2)
            << "\nempirical_mse=" << s.empirical_mse << " predicted_mse=" << s.predicted_mse << " bound=" << s.bound
            << " threshold=" << s.threshold << "\n";
  if (s.baseline_mse) std::cout << "ams_baseline_mse=" << *s.baseline_mse << "\n";
  std::cout << verdict(s.passed) << " mse below eps^2 * (1 + 3/sqrt(T))\n";
  return s.passed ? 0 : 1;
}

int run_memory(Options& o) {
  const auto s = f2sketch::run_memory_experiment(o.cfg);
  std::cout << "buckets=" << s.bucket_count << " items=" << s.items << "\nmean_counter_bits=" << s.mean_counter_bits
            << " max_counter_bits=" << s.max_counter_bits << " counter_budget=" << s.counter_budget
            << "\nmax_encoded_bits=" << s.max_encoded_bits << " bit_budget=" << s.budget
            << " fixed_width_bits=" << s.fixed_width_bits << "\n";
  std::cout << verdict(s.passed) << " encoded size within bit budget\n";
  return s.passed ? 0 : 1;
}

int run_edisj(Options& o) {
  const auto s = f2sketch::run_edisj_experiment(o.cfg);
  std::cout << "k=" << s.k << " yes_f2=" << f2sketch::to_string(s.yes_f2)
            << " max_no_f2=" << f2sketch::to_string(s.max_no_f2) << " threshold=" << s.threshold
            << "\nsketch_epsilon=" << s.sketch_epsilon << " correct_yes=" << s.correct_yes << "/" << s.trials
            << " correct_no=" << s.correct_no << "/" << s.trials << "\naccuracy=" << s.accuracy
            << " oracle_accuracy=" << s.oracle_accuracy << "\n";
  std::cout << verdict(s.passed) << " accuracy at least 2/3\n";
  return s.passed ? 0 : 1;
}

int run_gen(Options& o) {
  if (o.cfg.out.empty()) throw std::runtime_error("gen needs --out");
  f2sketch::Stream stream;
  if (o.cfg.workload == f2sketch::Workload::kMultilevel) {
    auto ml = f2sketch::make_multilevel_workload(o.cfg);
    stream = std::move(ml.stream);
    std::ofstream sidecar(o.cfg.out.string() + ".layout.json");
    sidecar << f2sketch::layout_to_json(ml.layout);
    if (!sidecar) throw std::runtime_error("cannot write layout sidecar");
  } else {
    stream = f2sketch::make_workload_stream(o.cfg);
  }
  if (o.format == "binary") {
    f2sketch::write_stream_binary(o.cfg.out, stream);
  } else if (o.format == "text") {
    f2sketch::write_stream_text(o.cfg.out, stream);
  } else {
    throw std::runtime_error("unknown format '" + o.format + "'");
  }
  std::cout << "wrote " << stream.size() << " elements to " << o.cfg.out.string() << "\n";
  return 0;
}

std::vector<std::uint64_t> parse_freqs(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

int run_exhaustive(Options& o) {
  auto grid = f2sketch::default_exhaustive_frequencies();
  if (!o.freqs.empty()) grid = {parse_freqs(o.freqs)};
  bool all = true;
  for (const auto& c : f2sketch::run_exhaustive_check(grid, o.buckets)) {
    std::cout << "freqs=(";
    for (std::size_t i = 0; i < c.frequencies.size(); ++i) std::cout << (i ? "," : "") << c.frequencies[i];
    std::cout << ") P=" << c.bucket_count << " assignments=" << c.assignments << " mean=" << c.mean
              << " f2=" << c.f2 << " variance=" << c.variance << " predicted=" << c.predicted_variance << " "
              << verdict(c.unbiased && c.variance_matches) << "\n";
    all = all && c.unbiased && c.variance_matches;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition F2 sketch experiment runner"};
  app.require_subcommand(1);
  Options o;

  auto* mse = app.add_subcommand("mse", "Empirical mean squared relative error vs eps^2");
  auto* memory = app.add_subcommand("memory", "Encoded sketch size vs the bit budget");
  auto* edisj = app.add_subcommand("edisj", "Distinguish YES/NO gap instances with the sketch");
  auto* gen = app.add_subcommand("gen", "Write a workload stream to a file");
  auto* exhaustive = app.add_subcommand("exhaustive", "Exact mean/variance check on tiny instances");
  for (auto* cmd : {mse, memory, edisj, gen}) add_common(cmd, o);
  gen->add_option("--format", o.format, "binary | text");
  exhaustive->add_option("--freqs", o.freqs, "Comma separated frequencies (default: built-in grid)");
  exhaustive->add_option("--buckets", o.buckets, "Bucket counts")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (exhaustive->parsed()) return run_exhaustive(o);
    finalize(o);
    if (mse->parsed()) return run_mse(o);
    if (memory->parsed()) return run_memory(o);
    if (edisj->parsed()) return run_edisj(o);
    if (gen->parsed()) return run_gen(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
