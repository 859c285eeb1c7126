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

#include "f2sketch/streamgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_set>

#include "f2sketch/random.hpp"

namespace f2sketch {

std::uint64_t default_universe(std::uint64_t n) {
  const Wide cube = static_cast<Wide>(n) * n * n + 1;
  return cube >= kMaxUniverse ? kMaxUniverse : static_cast<std::uint64_t>(cube);
}

namespace {

void check_universe(std::uint64_t universe_size) {
  if (universe_size == 0) throw std::invalid_argument("universe_size must be at least 1");
  if (universe_size > kMaxUniverse) {
    throw std::invalid_argument("universe_size exceeds 2^61-1, the largest hashable universe");
  }
}

void fill_uniform(Stream& out, std::uint64_t n, std::uint64_t universe_size, Rng& rng) {
  out.resize(n);
  for (auto& x : out) x = rng.below(universe_size);
}

// Rejection-inversion sampling for Zipf laws on [1, N] (Hoermann and
// Derflinger). Constant expected time for any N and exponent > 0.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t elements, double exponent)
      : elements_(static_cast<double>(elements)),
        exponent_(exponent),
        h_integral_x1_(h_integral(1.5) - 1.0),
        h_integral_elements_(h_integral(elements_ + 0.5)),
        squeeze_(2.0 - h_integral_inverse(h_integral(2.5) - h(2.0))) {}

  std::uint64_t operator()(Rng& rng) const {
    for (;;) {
      const double u = h_integral_elements_ + rng.unit() * (h_integral_x1_ - h_integral_elements_);
      const double x = h_integral_inverse(u);
      double k = std::floor(x + 0.5);
      if (k < 1.0) {
        k = 1.0;
      } else if (k > elements_) {
        k = elements_;
      }
      if (k - x <= squeeze_ || u >= h_integral(k + 0.5) - h(k)) return static_cast<std::uint64_t>(k);
    }
  }

 private:
  double h(double x) const { return std::exp(-exponent_ * std::log(x)); }

  double h_integral(double x) const {
    const double log_x = std::log(x);
    return helper2((1.0 - exponent_) * log_x) * log_x;
  }

  double h_integral_inverse(double x) const {
    double t = x * (1.0 - exponent_);
    if (t < -1.0) t = -1.0;
    return std::exp(helper1(t) * x);
  }

  // log1p(x)/x and expm1(x)/x with their limits at 0.
  static double helper1(double x) {
    if (std::fabs(x) > 1e-8) return std::log1p(x) / x;
    return 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
  }
  static double helper2(double x) {
    if (std::fabs(x) > 1e-8) return std::expm1(x) / x;
    return 1.0 + x * 0.5 * (1.0 + x * (1.0 / 3.0) * (1.0 + 0.25 * x));
  }

  double elements_;
  double exponent_;
  double h_integral_x1_;
  double h_integral_elements_;
  double squeeze_;
};

}  // namespace

Stream uniform_stream(std::uint64_t n, std::uint64_t universe_size, std::uint64_t seed) {
  check_universe(universe_size);
  Rng rng(seed);
  Stream out;
  fill_uniform(out, n, universe_size, rng);
  return out;
}

Stream zipf_stream(std::uint64_t n, std::uint64_t universe_size, double exponent, std::uint64_t seed) {
  check_universe(universe_size);
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("zipf exponent must be finite and non-negative");
  }
  if (exponent == 0.0) return uniform_stream(n, universe_size, seed);
  Rng rng(seed);
  const ZipfSampler sample(universe_size, exponent);
  Stream out(n);
  for (auto& x : out) x = sample(rng) - 1;
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(EdisjLabel label) {
  switch (label) {
    case EdisjLabel::kYes:
      return "yes";
    case EdisjLabel::kNoDisjoint:
      return "no_disjoint";
    case EdisjLabel::kNoWrongExam:
      return "no_wrong_exam";
  }
  return "unknown";
}

EdisjLabel parse_label(std::string_view text) {
  if (text == "yes") return EdisjLabel::kYes;
  if (text == "no_disjoint" || text == "no") return EdisjLabel::kNoDisjoint;
  if (text == "no_wrong_exam") return EdisjLabel::kNoWrongExam;
  throw std::invalid_argument("unknown EDISJ label '" + std::string(text) +
                              "' (expected yes, no_disjoint or no_wrong_exam)");
}

std::uint64_t single_instance_width(std::uint64_t n, std::uint64_t t, double epsilon) {
  if (t == 0) throw std::invalid_argument("t must be positive");
  return floor_tolerant(epsilon * epsilon * static_cast<double>(n) / static_cast<double>(t * t));
}

namespace {

// Hands out disjoint d-aligned blocks of the universe in random order.
class TupleAllocator {
 public:
  TupleAllocator(std::uint64_t universe_size, std::uint64_t width, Rng& rng)
      : blocks_(universe_size / width), width_(width), rng_(rng) {}

  ElementId next() {
    if (used_.size() >= blocks_) throw std::invalid_argument("universe too small for the requested tuples");
    for (;;) {
      const std::uint64_t block = rng_.below(blocks_);
      if (used_.insert(block).second) return block * width_;
    }
  }

 private:
  std::uint64_t blocks_;
  std::uint64_t width_;
  Rng& rng_;
  std::unordered_set<std::uint64_t> used_;
};

bool contains(const std::vector<ElementId>& sorted, ElementId x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

EdisjInstance edisj_instance(const EdisjParams& p) {
  if (p.t < 2) throw std::invalid_argument("EDISJ needs at least two players");
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  const double limit = p.epsilon * p.epsilon * static_cast<double>(p.n);
  if (static_cast<double>(p.t) * static_cast<double>(p.t) > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("t = " + std::to_string(p.t) + " exceeds eps * sqrt(n)");
  }
  if (p.d == 0) throw std::invalid_argument("super-element width d must be at least 1");
  if (p.n % (p.d * p.t) != 0) {
    throw std::invalid_argument("d * t = " + std::to_string(p.d * p.t) + " does not divide n = " +
                                std::to_string(p.n));
  }
  const std::uint64_t universe = p.universe_size == 0 ? default_universe(p.n) : p.universe_size;
  check_universe(universe);
  if (universe < default_universe(p.n)) {
    throw std::invalid_argument("universe must exceed n^3 so all tuples can be disjoint");
  }

  EdisjInstance inst;
  inst.n = p.n;
  inst.t = p.t;
  inst.d = p.d;
  inst.k = ceil_tolerant(static_cast<double>(p.t) / p.epsilon);
  inst.epsilon = p.epsilon;
  inst.label = p.label;
  inst.universe_size = universe;

  Rng rng(p.seed);
  TupleAllocator alloc(universe, p.d, rng);
  const std::uint64_t m = inst.set_size();

  const bool shared = p.label != EdisjLabel::kNoDisjoint;
  if (shared) inst.common = alloc.next();
  inst.sets.resize(p.t);
  for (auto& set : inst.sets) {
    set.reserve(m);
    if (shared) set.push_back(*inst.common);
    while (set.size() < m) set.push_back(alloc.next());
  }

  if (p.label == EdisjLabel::kYes) {
    inst.exam = *inst.common;
  } else {
    // A wrong-exam instance with singleton sets has no private tuple to use.
    const bool can_be_inside = !(shared && m == 1);
    bool inside = false;
    switch (p.placement) {
      case ExamPlacement::kOutside:
        inside = false;
        break;
      case ExamPlacement::kInsideOneSet:
        if (!can_be_inside) throw std::invalid_argument("no private tuple available for the exam element");
        inside = true;
        break;
      case ExamPlacement::kRandom:
        inside = can_be_inside && rng.below(2) == 1;
        break;
    }
    if (inside) {
      const auto& owner = inst.sets[rng.below(p.t)];
      const std::size_t offset = shared ? 1 : 0;
      inst.exam = owner[offset + rng.below(owner.size() - offset)];
    } else {
      inst.exam = alloc.next();
    }
  }

  for (auto& set : inst.sets) std::sort(set.begin(), set.end());
  return inst;
}

EdisjInstance edisj_instance(std::uint64_t n, std::uint64_t t, double epsilon, std::uint64_t d,
                             EdisjLabel label, std::uint64_t seed) {
  EdisjParams params;
  params.n = n;
  params.t = t;
  params.epsilon = epsilon;
  params.d = d;
  params.label = label;
  params.seed = seed;
  return edisj_instance(params);
}

Stream edisj_stream(const EdisjInstance& inst) {
  Stream out;
  out.reserve(inst.stream_length());
  for (const auto& set : inst.sets) {
    for (ElementId base : set) {
      for (std::uint64_t j = 0; j < inst.d; ++j) out.push_back(base + j);
    }
  }
  for (std::uint64_t r = 0; r < inst.k; ++r) {
    for (std::uint64_t j = 0; j < inst.d; ++j) out.push_back(inst.exam + j);
  }
  return out;
}

Wide yes_f2(std::uint64_t n, std::uint64_t t, std::uint64_t d, std::uint64_t k) {
  const Wide tk = static_cast<Wide>(t) + k;
  return static_cast<Wide>(n) - static_cast<Wide>(d) * t + static_cast<Wide>(d) * tk * tk;
}

Wide max_no_f2(std::uint64_t n, std::uint64_t t, std::uint64_t d, std::uint64_t k) {
  const Wide W = d;
  const Wide k1 = static_cast<Wide>(k) + 1;
  return static_cast<Wide>(n) + W * t * t - W * t - W + W * k1 * k1;
}

Wide closed_form_f2(const EdisjInstance& inst) {
  if (inst.label == EdisjLabel::kYes) return yes_f2(inst.n, inst.t, inst.d, inst.k);
  bool inside = false;
  for (const auto& set : inst.sets) inside = inside || contains(set, inst.exam);
  const Wide W = inst.d;
  const Wide t = inst.t;
  // Start from n singletons, then account for the shared tuple and the exam.
  Wide f2 = inst.n;
  if (inst.common) f2 = f2 - W * t + W * t * t;
  const Wide exam_count = static_cast<Wide>(inst.k) + (inside ? 1 : 0);
  if (inside) f2 -= W;
  f2 += W * exam_count * exam_count;
  return f2;
}

std::optional<std::string> validate_instance(const EdisjInstance& inst) {
  if (inst.t < 2 || inst.sets.size() != inst.t) return "wrong number of sets";
  if (inst.d == 0 || inst.n % (inst.d * inst.t) != 0) return "d * t does not divide n";
  if (inst.k != ceil_tolerant(static_cast<double>(inst.t) / inst.epsilon)) return "k differs from ceil(t / eps)";

  std::map<ElementId, std::uint64_t> occurrences;
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    const auto& set = inst.sets[i];
    if (set.size() != inst.set_size()) return "set " + std::to_string(i) + " has the wrong size";
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (j > 0 && set[j] <= set[j - 1]) return "set " + std::to_string(i) + " is not strictly sorted";
      ++occurrences[set[j]];
    }
  }
  occurrences.try_emplace(inst.exam, 0);

  // Distinct tuples are runs [base, base + d); no two may share an id.
  ElementId previous_end = 0;
  bool first = true;
  for (const auto& [base, count] : occurrences) {
    if (!first && base < previous_end) return "tuples at " + std::to_string(base) + " overlap";
    if (base > inst.universe_size || inst.universe_size - base < inst.d) return "tuple leaves the universe";
    previous_end = base + inst.d;
    first = false;
  }

  std::optional<ElementId> shared;
  for (const auto& [base, count] : occurrences) {
    if (count == inst.t) {
      if (shared) return "more than one tuple is common to all sets";
      shared = base;
    } else if (count > 1) {
      return "tuple " + std::to_string(base) + " appears in some but not all sets";
    }
  }
  if (shared != inst.common) return "recorded common tuple disagrees with the sets";
  const std::uint64_t exam_count = occurrences[inst.exam];

  switch (inst.label) {
    case EdisjLabel::kYes:
      if (!shared || *shared != inst.exam) return "YES instance whose exam is not the common tuple";
      break;
    case EdisjLabel::kNoDisjoint:
      if (shared) return "NO_DISJOINT instance with a common tuple";
      if (exam_count > 1) return "exam appears in more than one set";
      break;
    case EdisjLabel::kNoWrongExam:
      if (!shared) return "NO_WRONG_EXAM instance without a common tuple";
      if (*shared == inst.exam) return "NO_WRONG_EXAM exam equals the common tuple";
      if (exam_count > 1) return "exam appears in more than one set";
      break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

ParameterError::ParameterError(const std::string& what, std::uint64_t suggested_n, double suggested_epsilon)
    : std::invalid_argument(what + " (nearest valid: n=" + std::to_string(suggested_n) +
                            ", epsilon=1/" + std::to_string(static_cast<std::uint64_t>(1.0 / suggested_epsilon)) +
                            ")"),
      suggested_n_(suggested_n),
      suggested_epsilon_(suggested_epsilon) {}

namespace {

bool is_power_of_four(std::uint64_t n) { return std::has_single_bit(n) && std::countr_zero(n) % 2 == 0; }

bool inverse_is_power_of_two(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) return false;
  int exponent = 0;
  return std::frexp(epsilon, &exponent) == 0.5;
}

// log2(eps * sqrt(n)) for valid shapes, where it is an integer.
int scale_exponent(std::uint64_t n, double epsilon) {
  int e = 0;
  std::frexp(epsilon, &e);  // epsilon = 2^(e-1)
  return std::countr_zero(n) / 2 + (e - 1);
}

void check_multilevel_shape(std::uint64_t n, double epsilon) {
  const bool n_ok = n >= 4 && is_power_of_four(n);
  const bool eps_ok = inverse_is_power_of_two(epsilon);
  if (n_ok && eps_ok && scale_exponent(n, epsilon) > 2) return;

  std::uint64_t nn = 4;
  if (n > 4) {
    const double log4 = std::log(static_cast<double>(n)) / std::log(4.0);
    nn = std::uint64_t{1} << (2 * static_cast<int>(std::llround(log4)));
  }
  double ee = 1.0;
  if (epsilon > 0.0 && std::isfinite(epsilon)) {
    ee = std::ldexp(1.0, -static_cast<int>(std::llround(std::max(0.0, -std::log2(epsilon)))));
  }
  while (scale_exponent(nn, ee) <= 2) nn *= 4;

  std::string reason;
  if (!n_ok) {
    reason = "n = " + std::to_string(n) + " is not a power of four";
  } else if (!eps_ok) {
    reason = "1/epsilon is not a power of two";
  } else {
    reason = "epsilon must exceed 4/sqrt(n)";
  }
  throw ParameterError(reason, nn, ee);
}

}  // namespace

MultiLevelLayout multilevel_layout(std::uint64_t n, double epsilon) {
  check_multilevel_shape(n, epsilon);
  MultiLevelLayout layout;
  layout.n = n;
  layout.epsilon = epsilon;
  const int top = scale_exponent(n, epsilon) - 2;
  // eps^2 n = 4^(top + 2)
  const std::uint64_t scale = std::uint64_t{1} << (2 * (top + 2));
  for (int level = 1; level <= top; ++level) {
    LevelLayout lv;
    lv.level = static_cast<unsigned>(level);
    lv.t = std::uint64_t{1} << level;
    lv.bucket_count = std::uint64_t{1} << (level + 2);
    lv.bucket_length = n / lv.bucket_count;
    lv.super_width = scale / (4 * lv.t * lv.t);
    lv.supers_per_active = n / (4 * lv.super_width * lv.t);
    for (std::uint64_t index = 4; index <= lv.bucket_count; index += 4) {
      lv.active.push_back({index, (index - 1) * lv.bucket_length, index * lv.bucket_length});
    }
    layout.levels.push_back(std::move(lv));
  }
  return layout;
}

MultiLevelStream multilevel_stream(std::uint64_t n, double epsilon, std::uint64_t seed,
                                   std::optional<PlantRequest> plant, std::uint64_t universe_size) {
  MultiLevelStream out;
  out.layout = multilevel_layout(n, epsilon);
  const std::uint64_t universe = universe_size == 0 ? default_universe(n) : universe_size;
  out.stream = uniform_stream(n, universe, seed);
  if (!plant) return out;

  const auto level_it = std::find_if(out.layout.levels.begin(), out.layout.levels.end(),
                                     [&](const LevelLayout& lv) { return lv.level == plant->level; });
  if (level_it == out.layout.levels.end()) {
    throw std::invalid_argument("level " + std::to_string(plant->level) + " is outside [1, " +
                                std::to_string(out.layout.levels.size()) + "]");
  }
  const LevelLayout& lv = *level_it;

  // The active buckets together hold n/4 elements: t sets of n/(4dt) tuples.
  EdisjParams params;
  params.n = n / 4;
  params.t = lv.t;
  params.epsilon = epsilon;
  params.d = lv.super_width;
  params.label = plant->label;
  params.seed = derive_seed(seed, lv.level);
  params.universe_size = universe;
  params.placement = plant->placement;
  EdisjInstance inst = edisj_instance(params);

  for (std::size_t i = 0; i < lv.active.size(); ++i) {
    std::uint64_t pos = lv.active[i].begin;
    for (ElementId base : inst.sets[i]) {
      for (std::uint64_t j = 0; j < inst.d; ++j) out.stream[pos++] = base + j;
    }
  }
  PlantedInstance planted;
  planted.level = lv.level;
  planted.suffix_begin = n;
  planted.suffix_length = inst.k * inst.d;
  for (std::uint64_t r = 0; r < inst.k; ++r) {
    for (std::uint64_t j = 0; j < inst.d; ++j) out.stream.push_back(inst.exam + j);
  }
  planted.instance = std::move(inst);
  out.layout.planted = std::move(planted);
  return out;
}

std::optional<std::string> validate_layout(const MultiLevelLayout& layout) {
  const std::uint64_t n = layout.n;
  for (const auto& lv : layout.levels) {
    const std::string where = "level " + std::to_string(lv.level) + ": ";
    if (lv.t != (std::uint64_t{1} << lv.level)) return where + "t != 2^level";
    if (lv.bucket_count != (std::uint64_t{1} << (lv.level + 2))) return where + "bucket count != 2^(level+2)";
    if (lv.bucket_length * lv.bucket_count != n) return where + "buckets do not tile [0, n)";
    const double d = layout.epsilon * layout.epsilon * static_cast<double>(n) / (4.0 * lv.t * lv.t);
    if (static_cast<double>(lv.super_width) != d) return where + "super-element width != eps^2 n / (4 t^2)";
    if (lv.super_width * lv.supers_per_active != lv.bucket_length) return where + "super-elements do not tile a bucket";
    if (lv.supers_per_active * 4 * lv.super_width * lv.t != n) return where + "super-element count != n / (4 d t)";
    if (lv.active.size() != lv.t) return where + "expected t active buckets";
    std::uint64_t previous_end = 0;
    for (const auto& b : lv.active) {
      if (b.index % 4 != 0 || b.index == 0 || b.index > lv.bucket_count) return where + "active index not divisible by four";
      if (b.begin != (b.index - 1) * lv.bucket_length || b.end != b.begin + lv.bucket_length) {
        return where + "active bucket " + std::to_string(b.index) + " has wrong bounds";
      }
      if (b.begin < previous_end) return where + "active buckets overlap";
      previous_end = b.end;
    }
  }
  return std::nullopt;
}

}  // namespace f2sketch
