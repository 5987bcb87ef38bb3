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
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "advocates/error.hpp"
#include "advocates/random.hpp"

namespace advocates::gap {

/// Every iteration widens the gap: w_i = i.
struct Deterministic {};
/// Each iteration widens the gap with probability p.
struct Bernoulli {
  double p = 0.5;
};
/// w_1 .. w_horizon given directly (w_0 = 0 implied).
struct Explicit {
  std::vector<int> w;
};

using SuccessProcess = std::variant<Deterministic, Bernoulli, Explicit>;

struct Params {
  double alpha = 1.0;
  double beta = 1.0;
  SuccessProcess success = Deterministic{};
  int horizon = 1;

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
      throw Error(ErrorKind::InvalidParameter, "alpha and beta must be > 0");
    }
    if (horizon < 1) throw Error(ErrorKind::InvalidParameter, "horizon must be >= 1");
    if (const auto* b = std::get_if<Bernoulli>(&success); b && !(b->p >= 0.0 && b->p <= 1.0)) {
      throw Error(ErrorKind::InvalidParameter, "Bernoulli p must lie in [0, 1]");
    }
    if (const auto* e = std::get_if<Explicit>(&success)) {
      int prev = 0;
      for (std::size_t i = 0; i < e->w.size(); ++i) {
        const int w = e->w[i];
        const int step = w - prev;
        if (w < 0 || w > static_cast<int>(i + 1) || (step != 0 && step != 1)) {
          throw Error(ErrorKind::InvalidSuccessCount,
                      "explicit w_" + std::to_string(i + 1) + " = " + std::to_string(w));
        }
        prev = w;
      }
    }
  }
};

inline void check_success_count(int i, int w) {
  if (i < 0 || w < 0 || w > i) {
    throw Error(ErrorKind::InvalidSuccessCount,
                "need 0 <= w <= i, got i=" + std::to_string(i) + " w=" + std::to_string(w));
  }
}

/// E[delta_i] = (alpha + w) / (alpha + beta + i)
inline double gap_mean(double alpha, double beta, int i, int w) {
  check_success_count(i, w);
  return (alpha + w) / (alpha + beta + i);
}

/// Var(delta_i) = (alpha + w)(beta + i - w) / ((alpha + beta + i)^2 (alpha + beta + i + 1))
inline double gap_variance(double alpha, double beta, int i, int w) {
  check_success_count(i, w);
  const double a = alpha + w;
  const double b = beta + i - w;
  const double n = alpha + beta + i;
  return a * b / (n * n * (n + 1.0));
}

inline double gap_mean(const Params& p, int i, int w) { return gap_mean(p.alpha, p.beta, i, w); }
inline double gap_variance(const Params& p, int i, int w) {
  return gap_variance(p.alpha, p.beta, i, w);
}

/// a_{i,eps} = 4 Var / eps^2; P(delta_i >= 1 - eps) >= 1 - a.
inline double chebyshev_bound(double variance, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::NonpositiveEpsilon, "epsilon must be > 0");
  if (variance < 0.0) throw Error(ErrorKind::InvalidParameter, "variance must be >= 0");
  return 4.0 * variance / (epsilon * epsilon);
}

/// A bound of 1 or more says nothing.
inline bool is_vacuous(double bound) { return bound >= 1.0; }

/// Beta(a, b) via the ratio of two unit-scale Gamma draws.
inline double sample_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double s = x + y;
  // Both draws underflow only for tiny shapes; fall back to a fair coin.
  if (!(s > 0.0)) return uniform01(rng) < a / (a + b) ? 1.0 : 0.0;
  return x / s;
}

/// Success counts w_1 .. w_n under the process, one realization.
inline std::vector<int> success_path(const SuccessProcess& process, int n, Rng& rng) {
  std::vector<int> w(static_cast<std::size_t>(n));
  int acc = 0;
  for (int i = 1; i <= n; ++i) {
    if (std::holds_alternative<Deterministic>(process)) {
      acc = i;
    } else if (const auto* b = std::get_if<Bernoulli>(&process)) {
      acc += uniform01(rng) < b->p ? 1 : 0;
    } else {
      const auto& e = std::get<Explicit>(process).w;
      if (static_cast<std::size_t>(i) > e.size()) {
        throw Error(ErrorKind::InvalidSuccessCount,
                    "explicit success list shorter than iteration " + std::to_string(i));
      }
      acc = e[static_cast<std::size_t>(i - 1)];
    }
    w[static_cast<std::size_t>(i - 1)] = acc;
  }
  return w;
}

struct TrajectoryPoint {
  int i = 0;
  int w = 0;
  double delta = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// For i = 1..horizon: advance w_i, then draw delta_i ~ Beta(alpha + w_i, beta + i - w_i).
inline Trajectory sample_trajectory(const Params& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  const auto w = success_path(params.success, params.horizon, rng);
  Trajectory out;
  out.reserve(w.size());
  for (int i = 1; i <= params.horizon; ++i) {
    const int wi = w[static_cast<std::size_t>(i - 1)];
    out.push_back({i, wi, sample_beta(params.alpha + wi, params.beta + i - wi, rng)});
  }
  return out;
}

struct ConvergenceCheck {
  double epsilon = 0.0;
  int i = 0;
  int w = 0;
  double mean = 0.0;
  double variance = 0.0;
  double bound = 0.0;
  bool vacuous = false;
  double empirical_prob = 0.0;
  std::uint64_t sample_count = 0;
  double margin = 0.0;
  bool pass = false;
};

/// 3 standard errors of a proportion at its worst case p = 1/2.
inline double sampling_margin(std::uint64_t samples) {
  return 3.0 * std::sqrt(0.25 / static_cast<double>(samples));
}

/// Estimates P(Beta(a, b) >= threshold) from `samples` draws, partitioned in
/// fixed-size batches seeded from (seed, batch) so the estimate does not
/// depend on the worker count.
inline double tail_probability(double a, double b, double threshold, std::uint64_t samples,
                               std::uint64_t seed, unsigned workers = 0) {
  constexpr std::uint64_t kBatch = 1 << 14;
  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  const auto hits = run_batches(batches, worker_count(workers), [&](std::size_t bi) {
    Rng rng(derive_seed(seed, bi));
    const std::uint64_t n = std::min(kBatch, samples - bi * kBatch);
    std::uint64_t h = 0;
    for (std::uint64_t s = 0; s < n; ++s) h += sample_beta(a, b, rng) >= threshold ? 1 : 0;
    return h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(samples);
}

/// Checks P(delta_i >= 1 - eps) >= 1 - a_{i,eps} at each requested iteration.
/// w_i comes from one seeded realization of the success process. Vacuous
/// bounds pass and are flagged.
inline std::vector<ConvergenceCheck> verify_convergence(const Params& params, double epsilon,
                                                        const std::vector<int>& iterations,
                                                        std::uint64_t samples,
                                                        std::uint64_t seed,
                                                        unsigned workers = 0) {
  params.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::NonpositiveEpsilon, "epsilon must lie in (0, 1)");
  }
  if (samples < 1) throw Error(ErrorKind::InvalidParameter, "samples must be >= 1");
  int max_i = 0;
  for (int i : iterations) {
    if (i < 0) throw Error(ErrorKind::InvalidParameter, "iteration must be >= 0");
    max_i = std::max(max_i, i);
  }
  Rng path_rng(derive_seed(seed, 0xFFFFFFFFULL));
  const auto path = success_path(params.success, max_i, path_rng);

  std::vector<ConvergenceCheck> out;
  for (std::size_t k = 0; k < iterations.size(); ++k) {
    ConvergenceCheck c;
    c.epsilon = epsilon;
    c.i = iterations[k];
    c.w = c.i == 0 ? 0 : path[static_cast<std::size_t>(c.i - 1)];
    c.mean = gap_mean(params, c.i, c.w);
    c.variance = gap_variance(params, c.i, c.w);
    c.bound = chebyshev_bound(c.variance, epsilon);
    c.vacuous = is_vacuous(c.bound);
    c.sample_count = samples;
    c.margin = sampling_margin(samples);
    c.empirical_prob = tail_probability(params.alpha + c.w, params.beta + c.i - c.w,
                                        1.0 - epsilon, samples, derive_seed(seed, k), workers);
    c.pass = c.empirical_prob >= std::max(0.0, 1.0 - c.bound) - c.margin;
    out.push_back(c);
  }
  return out;
}

}  // namespace advocates::gap
