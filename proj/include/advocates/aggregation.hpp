/*
 * Copyright 2026 The Advocates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advocates/error.hpp"
#include "advocates/random.hpp"

namespace advocates {

// ---------------------------------------------------------------------------
// Softmax

/// Temperature softmax, computed with max-subtraction.
inline std::vector<double> softmax(std::span<const double> values, double tau) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "softmax of an empty vector");
  if (!(tau > 0.0)) throw Error(ErrorKind::NonpositiveTau, "tau must be > 0");
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> out(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::exp((values[i] - top) / tau);
    total += out[i];
  }
  for (auto& p : out) p /= total;
  return out;
}

/// Index of the maximum; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Scorers: deterministic maps from defense text to [0, 1].

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(std::string_view defense) const = 0;
};

/// Fraction of the total keyword weight whose keyword occurs in the text.
class KeywordScorer : public Scorer {
 public:
  explicit KeywordScorer(std::map<std::string, double, std::less<>> weights)
      : weights_(std::move(weights)) {
    for (const auto& [word, w] : weights_) {
      if (w < 0) throw Error(ErrorKind::InvalidParameter, "negative weight for '" + word + "'");
      total_ += w;
    }
  }

  double score(std::string_view defense) const override {
    if (total_ <= 0) return 0.0;
    double hit = 0.0;
    for (const auto& [word, w] : weights_) {
      if (defense.find(word) != std::string_view::npos) hit += w;
    }
    return std::clamp(hit / total_, 0.0, 1.0);
  }

 private:
  std::map<std::string, double, std::less<>> weights_;
  double total_ = 0.0;
};

/// Word count relative to a target length, saturating at 1.
class LengthScorer : public Scorer {
 public:
  explicit LengthScorer(std::size_t target_words) : target_(target_words) {
    if (target_ == 0) throw Error(ErrorKind::InvalidParameter, "target_words must be > 0");
  }

  double score(std::string_view defense) const override {
    std::size_t words = 0;
    bool in_word = false;
    for (char c : defense) {
      const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
      if (!space && !in_word) ++words;
      in_word = !space;
    }
    return std::min(1.0, static_cast<double>(words) / static_cast<double>(target_));
  }

 private:
  std::size_t target_;
};

/// Exact lookup; unknown text scores `fallback`.
class TableScorer : public Scorer {
 public:
  explicit TableScorer(std::map<std::string, double, std::less<>> table, double fallback = 0.0)
      : table_(std::move(table)), fallback_(fallback) {
    for (const auto& [text, v] : table_) {
      if (v < 0.0 || v > 1.0) throw Error(ErrorKind::InvalidParameter, "score outside [0, 1]");
    }
    if (fallback_ < 0.0 || fallback_ > 1.0) throw Error(ErrorKind::InvalidParameter, "fallback outside [0, 1]");
  }

  double score(std::string_view defense) const override {
    const auto it = table_.find(defense);
    return it == table_.end() ? fallback_ : it->second;
  }

 private:
  std::map<std::string, double, std::less<>> table_;
  double fallback_;
};

// ---------------------------------------------------------------------------
// Aggregation

struct AggregationConfig {
  enum class Mode { ArgmaxSelect, SampleSelect };
  double tau = 0.01;
  Mode mode = Mode::ArgmaxSelect;
  /// Used by SampleSelect only.
  std::uint64_t seed = 0;

  void validate() const {
    if (!(tau > 0.0)) throw Error(ErrorKind::NonpositiveTau, "tau must be > 0");
  }
};

struct Selection {
  std::size_t index = 0;
  std::string defense;
  double score = 0.0;
};

/// Picks one defense per side: the argmax of the softmax over scorer outputs
/// (equivalently the argmax of the scores), or a softmax-weighted draw in
/// SampleSelect mode.
inline Selection select_aggregate(std::span<const std::string> defenses, const Scorer& scorer,
                                  const AggregationConfig& config = {}) {
  if (defenses.empty()) throw Error(ErrorKind::EmptyInput, "no defenses to aggregate");
  config.validate();
  std::vector<double> scores;
  scores.reserve(defenses.size());
  for (const auto& d : defenses) scores.push_back(scorer.score(d));

  std::size_t chosen = 0;
  if (config.mode == AggregationConfig::Mode::ArgmaxSelect) {
    chosen = argmax(scores);
  } else {
    const auto p = softmax(scores, config.tau);
    Rng rng(config.seed);
    double u = uniform01(rng);
    chosen = p.size() - 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (u < p[i]) {
        chosen = i;
        break;
      }
      u -= p[i];
    }
  }
  return {chosen, defenses[chosen], scorer.score(defenses[chosen])};
}

/// Gaps between the two sides. The single-advocate defense of each side is
/// its first candidate.
struct DifferentiationReport {
  double single_gap = 0.0;
  double multi_gap = 0.0;
  /// Improvement factors g(f_agg) - g(f_single) per side.
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

struct AggregationCheck {
  bool holds = false;
  DifferentiationReport report;
};

/// Verifies g(f_agg) >= max_j g(f_j) on both sides and reports the gaps.
inline AggregationCheck check_aggregation_property(std::span<const std::string> side1,
                                                   std::span<const std::string> side2,
                                                   const Scorer& scorer,
                                                   const AggregationConfig& config = {}) {
  if (side1.empty() || side2.empty()) throw Error(ErrorKind::EmptyInput, "each side needs >= 1 defense");
  auto best_of = [&](std::span<const std::string> side) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : side) best = std::max(best, scorer.score(d));
    return best;
  };
  const auto agg1 = select_aggregate(side1, scorer, config);
  const auto agg2 = select_aggregate(side2, scorer, config);
  const double single1 = scorer.score(side1.front());
  const double single2 = scorer.score(side2.front());

  AggregationCheck out;
  out.holds = agg1.score >= best_of(side1) && agg2.score >= best_of(side2);
  out.report.single_gap = std::abs(single1 - single2);
  out.report.multi_gap = std::abs(agg1.score - agg2.score);
  out.report.alpha1 = agg1.score - single1;
  out.report.alpha2 = agg2.score - single2;
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic simulations

struct UniformRange {
  double lo = 0.0;
  double hi = 1.0;

  void validate() const {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
      throw Error(ErrorKind::InvalidParameter, "score range must satisfy 0 <= lo <= hi <= 1");
    }
  }
  double draw(Rng& rng) const { return uniform(rng, lo, hi); }
  /// E[max of k i.i.d. draws] = lo + k (hi - lo) / (k + 1).
  double expected_max(int k) const { return lo + k * (hi - lo) / (k + 1.0); }
};

/// Candidate-defense score generator: each draw stands for g of one defense.
struct DefenseGenerator {
  UniformRange side1{0.5, 1.0};
  UniformRange side2{0.0, 0.5};
};

struct DifferentiationStats {
  std::uint64_t trials = 0;
  /// Trials in which the single side-1 score beat side 2's; statistics below are over these.
  std::uint64_t conditioned = 0;
  double mean_single_gap = 0.0;
  double mean_multi_gap = 0.0;
  double fraction_multi_gt_single = 0.0;
  double fraction_multi_ge_single = 0.0;
  double mean_amplification = 0.0;
};

/// Monte Carlo over trials: each side draws k candidate scores, the first of
/// which is the single-advocate score, and aggregation takes the max.
inline DifferentiationStats simulate_differentiation(const DefenseGenerator& gen, int k,
                                                     std::uint64_t trials, std::uint64_t seed,
                                                     unsigned workers = 0) {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1");
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
  gen.side1.validate();
  gen.side2.validate();

  struct Partial {
    std::uint64_t conditioned = 0;
    double single = 0.0, multi = 0.0, amp = 0.0;
    std::uint64_t gt = 0, ge = 0;
  };
  constexpr std::uint64_t kBatch = 1 << 16;
  const std::uint64_t batches = (trials + kBatch - 1) / kBatch;
  const auto parts = run_batches(batches, worker_count(workers), [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    Partial p;
    const std::uint64_t begin = b * kBatch;
    const std::uint64_t end = std::min(trials, begin + kBatch);
    for (std::uint64_t t = begin; t < end; ++t) {
      double s1 = gen.side1.draw(rng), m1 = s1;
      for (int j = 1; j < k; ++j) m1 = std::max(m1, gen.side1.draw(rng));
      double s2 = gen.side2.draw(rng), m2 = s2;
      for (int j = 1; j < k; ++j) m2 = std::max(m2, gen.side2.draw(rng));
      if (!(s1 > s2)) continue;
      const double single = std::abs(s1 - s2);
      const double multi = std::abs(m1 - m2);
      ++p.conditioned;
      p.single += single;
      p.multi += multi;
      p.amp += multi - single;
      p.gt += multi > single ? 1 : 0;
      p.ge += multi >= single ? 1 : 0;
    }
    return p;
  });

  Partial total;
  for (const auto& p : parts) {
    total.conditioned += p.conditioned;
    total.single += p.single;
    total.multi += p.multi;
    total.amp += p.amp;
    total.gt += p.gt;
    total.ge += p.ge;
  }
  DifferentiationStats s;
  s.trials = trials;
  s.conditioned = total.conditioned;
  if (total.conditioned > 0) {
    const double n = static_cast<double>(total.conditioned);
    s.mean_single_gap = total.single / n;
    s.mean_multi_gap = total.multi / n;
    s.mean_amplification = total.amp / n;
    s.fraction_multi_gt_single = static_cast<double>(total.gt) / n;
    s.fraction_multi_ge_single = static_cast<double>(total.ge) / n;
  }
  return s;
}

/// Per-round candidate draws for the first-passage simulations.
struct ImprovementProcess {
  UniformRange side1{0.0, 1.0};
  UniformRange side2{0.0, 0.2};
};

inline constexpr int kDefaultRoundCap = 10000;

struct FirstPassage {
  /// First round with |gap| >= 1 - epsilon; meaningful only when `reached`.
  int rounds = 0;
  bool reached = false;
  /// Gap after each round (only when requested).
  std::vector<double> gaps;
};

/// Each round, each side draws k candidates and keeps its best score so far.
/// k = 1 is the iterative (single-advocate) debate; k > 1 counts the k
/// parallel draws as one round.
inline FirstPassage first_passage(const ImprovementProcess& process, int k, double epsilon,
                                  Rng& rng, int cap = kDefaultRoundCap,
                                  bool keep_trajectory = false) {
  double best1 = 0.0;
  double best2 = 0.0;
  FirstPassage out;
  for (int r = 1; r <= cap; ++r) {
    for (int j = 0; j < k; ++j) best1 = std::max(best1, process.side1.draw(rng));
    for (int j = 0; j < k; ++j) best2 = std::max(best2, process.side2.draw(rng));
    const double gap = std::abs(best1 - best2);
    if (keep_trajectory) out.gaps.push_back(gap);
    if (gap >= 1.0 - epsilon) {
      out.rounds = r;
      out.reached = true;
      return out;
    }
  }
  out.rounds = cap;
  return out;
}

struct ComplexityReport {
  double epsilon = 0.0;
  int k = 1;
  /// Rounds needed by the iterative debate (one draw per side per round).
  int rounds_id = 0;
  bool reached_id = false;
  /// Rounds needed by the multi-advocate debate (k draws per side per round).
  int rounds_ma = 0;
  bool reached_ma = false;
};

inline void validate_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "epsilon must lie in (0, 1)");
  }
}

/// Runs both debates from the same seed. Unreached tolerance is reported via
/// the reached_* flags, not thrown.
inline ComplexityReport measure_iteration_complexity(double epsilon, const ImprovementProcess& process,
                                                     int k, std::uint64_t seed,
                                                     int cap = kDefaultRoundCap) {
  validate_epsilon(epsilon);
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1");
  if (cap < 1) throw Error(ErrorKind::InvalidParameter, "round cap must be >= 1");
  process.side1.validate();
  process.side2.validate();
  Rng rng_id(seed);
  Rng rng_ma(seed);
  const auto id = first_passage(process, 1, epsilon, rng_id, cap);
  const auto ma = first_passage(process, k, epsilon, rng_ma, cap);
  return {epsilon, k, id.rounds, id.reached, ma.rounds, ma.reached};
}

struct ComplexitySummary {
  int k = 1;
  std::uint64_t seeds = 0;
  /// +inf when the median run never reached the tolerance.
  double median_rounds = 0.0;
  double reach_fraction = 0.0;
};

/// Median first-passage round over seeds base_seed .. base_seed + n - 1.
/// Unreached runs rank above every reached one.
inline ComplexitySummary complexity_sweep(double epsilon, const ImprovementProcess& process, int k,
                                          std::uint64_t n_seeds, std::uint64_t base_seed,
                                          int cap = kDefaultRoundCap, unsigned workers = 0) {
  validate_epsilon(epsilon);
  if (n_seeds < 1) throw Error(ErrorKind::InvalidParameter, "need >= 1 seed");
  const auto rounds = run_batches(n_seeds, worker_count(workers), [&](std::size_t i) {
    Rng rng(base_seed + i);
    const auto fp = first_passage(process, k, epsilon, rng, cap);
    return fp.reached ? static_cast<double>(fp.rounds) : std::numeric_limits<double>::infinity();
  });
  auto sorted = rounds;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  ComplexitySummary s;
  s.k = k;
  s.seeds = n_seeds;
  s.median_rounds = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.reach_fraction =
      static_cast<double>(std::count_if(sorted.begin(), sorted.end(),
                                        [](double r) { return std::isfinite(r); })) /
      static_cast<double>(n);
  return s;
}

}  // namespace advocates
