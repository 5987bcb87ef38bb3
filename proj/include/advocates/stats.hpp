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

#include <cmath>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "advocates/core.hpp"

namespace advocates {

struct AccuracyResult {
  double accuracy = 0.0;
  std::size_t matches = 0;
  std::size_t n = 0;
  std::size_t ties = 0;
};

/// Fraction of predictions equal to the human label. A tie never matches and
/// is counted in `ties`.
inline AccuracyResult accuracy_detail(const std::vector<Winner>& predictions,
                                      const std::vector<Side>& labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (predictions.empty()) throw Error(ErrorKind::EmptyInput, "accuracy over zero items");
  AccuracyResult r;
  r.n = predictions.size();
  for (std::size_t i = 0; i < r.n; ++i) {
    r.matches += matches(predictions[i], labels[i]) ? 1 : 0;
    r.ties += predictions[i] == Winner::Tie ? 1 : 0;
  }
  r.accuracy = static_cast<double>(r.matches) / static_cast<double>(r.n);
  return r;
}

inline double accuracy(const std::vector<Winner>& predictions, const std::vector<Side>& labels) {
  return accuracy_detail(predictions, labels).accuracy;
}

struct TTestResult {
  double t = 0.0;
  /// Two-sided.
  double p = 1.0;
  int df = 0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
};

/// Two-sided Student-t tail 2 P(T > |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided_p(double t, int df) {
  const double nu = static_cast<double>(df);
  return boost::math::ibeta(nu / 2.0, 0.5, nu / (nu + t * t));
}

/// Paired t-test on d = x - y with the N-1 sample standard deviation.
inline TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " samples");
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::TooFewSamples, "paired t-test needs N >= 2");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i] - y[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (x[i] - y[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  // Differences that are constant up to rounding (e.g. 0.9-0.8 vs 0.85-0.75) count as degenerate.
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(x[i]), std::abs(y[i])});
  if (!(sd > 1e-12 * std::max(1.0, scale))) {
    throw Error(ErrorKind::DegenerateDifferences,
                mean == 0.0 ? "all differences are zero" : "differences have zero variance");
  }
  TTestResult r;
  r.df = static_cast<int>(n - 1);
  r.mean_diff = mean;
  r.sd_diff = sd;
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

}  // namespace advocates
