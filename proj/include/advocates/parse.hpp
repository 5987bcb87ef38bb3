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

#include <charconv>
#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "advocates/core.hpp"

namespace advocates {

namespace detail {

struct RawTuple {
  long long first = 0;
  long long second = 0;
  bool overflow = false;
};

inline long long to_ll(const std::string& digits, bool& overflow) {
  long long v = 0;
  const char* b = digits.data();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, digits.data() + digits.size(), v);
  if (ec != std::errc()) overflow = true;
  return v;
}

/// The last `(int, int)` in the text, whitespace-tolerant.
inline std::optional<RawTuple> last_int_pair(std::string_view text) {
  static const std::regex kPair(R"(\(\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*\))");
  std::optional<RawTuple> last;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kPair); it != std::sregex_iterator();
       ++it) {
    RawTuple t;
    t.first = to_ll((*it)[1].str(), t.overflow);
    t.second = to_ll((*it)[2].str(), t.overflow);
    last = t;
  }
  return last;
}

}  // namespace detail

inline bool contains_score_tuple(std::string_view text) {
  return detail::last_int_pair(text).has_value();
}

/// Extracts the final judge tuple: the LAST parenthesized integer pair.
inline ScorePair parse_score_tuple(std::string_view text) {
  const auto t = detail::last_int_pair(text);
  if (!t) throw Error(ErrorKind::NoTupleFound, "no (score1, score2) tuple in judge output");
  if (t->overflow || t->first < kJudgeScoreMin || t->first > kJudgeScoreMax ||
      t->second < kJudgeScoreMin || t->second > kJudgeScoreMax) {
    throw Error(ErrorKind::OutOfRange, "(" + std::to_string(t->first) + ", " +
                                           std::to_string(t->second) + ") outside [1, 120]");
  }
  return ScorePair::judge_total(static_cast<int>(t->first), static_cast<int>(t->second));
}

inline ScorePair parse_jury_vote(std::string_view text) {
  const auto t = detail::last_int_pair(text);
  if (!t) throw Error(ErrorKind::NoTupleFound, "no (vote1, vote2) tuple in juror output");
  const bool one_hot = !t->overflow && ((t->first == 1 && t->second == 0) ||
                                        (t->first == 0 && t->second == 1));
  if (!one_hot) {
    throw Error(ErrorKind::InvalidVote, "(" + std::to_string(t->first) + ", " +
                                            std::to_string(t->second) + ") is not one-hot");
  }
  return ScorePair::vote(static_cast<int>(t->first), static_cast<int>(t->second));
}

}  // namespace advocates
