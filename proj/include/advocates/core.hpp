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

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "advocates/error.hpp"
#include "json.hpp"

namespace advocates {

using Json = nlohmann::ordered_json;

enum class Winner { Answer1, Answer2, Tie };

/// Human preference side, as recorded in the dataset.
enum class Side { A, B };

enum class ProtocolLabel { Baseline, MORE, SAMRE, SAMRE_NoJury };

constexpr std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::Answer1: return "Answer1";
    case Winner::Answer2: return "Answer2";
    case Winner::Tie: return "Tie";
  }
  return "Tie";
}

constexpr std::string_view to_string(Side s) { return s == Side::A ? "A" : "B"; }

constexpr std::string_view to_string(ProtocolLabel p) {
  switch (p) {
    case ProtocolLabel::Baseline: return "Baseline";
    case ProtocolLabel::MORE: return "MORE";
    case ProtocolLabel::SAMRE: return "SAMRE";
    case ProtocolLabel::SAMRE_NoJury: return "SAMRE_NoJury";
  }
  return "Baseline";
}

inline Winner winner_from_string(std::string_view s) {
  if (s == "Answer1") return Winner::Answer1;
  if (s == "Answer2") return Winner::Answer2;
  if (s == "Tie") return Winner::Tie;
  throw Error(ErrorKind::InvalidItem, "unknown winner '" + std::string(s) + "'");
}

inline ProtocolLabel protocol_from_string(std::string_view s) {
  for (auto p : {ProtocolLabel::Baseline, ProtocolLabel::MORE, ProtocolLabel::SAMRE,
                 ProtocolLabel::SAMRE_NoJury}) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown protocol '" + std::string(s) + "'");
}

/// Winner-to-label match used by the accuracy metric. A tie never matches.
constexpr bool matches(Winner w, Side label) {
  return (w == Winner::Answer1 && label == Side::A) || (w == Winner::Answer2 && label == Side::B);
}

constexpr Winner mirror(Winner w) {
  switch (w) {
    case Winner::Answer1: return Winner::Answer2;
    case Winner::Answer2: return Winner::Answer1;
    case Winner::Tie: return Winner::Tie;
  }
  return Winner::Tie;
}

// ---------------------------------------------------------------------------
// EvalItem

struct EvalItem {
  std::string id;
  std::string question;
  std::string answer_a;
  std::string answer_b;
  std::optional<Side> human_label;

  void validate() const {
    if (question.empty()) throw Error(ErrorKind::InvalidItem, "item '" + id + "': empty question");
    if (answer_a.empty()) throw Error(ErrorKind::InvalidItem, "item '" + id + "': empty answer_a");
    if (answer_b.empty()) throw Error(ErrorKind::InvalidItem, "item '" + id + "': empty answer_b");
  }
};

/// Maps the binary Model_A_Score / Model_B_Score columns onto a label.
inline std::optional<Side> label_from_binary(int model_a_score, int model_b_score) {
  if (model_a_score == 1 && model_b_score == 0) return Side::A;
  if (model_a_score == 0 && model_b_score == 1) return Side::B;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scores

inline constexpr int kJudgeScoreMin = 1;
inline constexpr int kJudgeScoreMax = 120;
/// Six criteria scored 1..20 cannot total less than this.
inline constexpr int kCriteriaFloor = 6;

struct ScorePair {
  int s1 = 0;
  int s2 = 0;

  /// A judge total, each side in [1, 120].
  static ScorePair judge_total(int s1, int s2) {
    if (s1 < kJudgeScoreMin || s1 > kJudgeScoreMax || s2 < kJudgeScoreMin ||
        s2 > kJudgeScoreMax) {
      throw Error(ErrorKind::OutOfRange,
                  "(" + std::to_string(s1) + ", " + std::to_string(s2) + ") outside [1, 120]");
    }
    return {s1, s2};
  }

  /// A one-hot jury vote: (1, 0) or (0, 1).
  static ScorePair vote(int s1, int s2) {
    if (!((s1 == 1 && s2 == 0) || (s1 == 0 && s2 == 1))) {
      throw Error(ErrorKind::InvalidVote,
                  "(" + std::to_string(s1) + ", " + std::to_string(s2) + ") is not one-hot");
    }
    return {s1, s2};
  }

  /// Judge totals in [1, 6) are accepted but cannot come from six 1..20 criteria.
  bool below_criteria_floor() const { return s1 < kCriteriaFloor || s2 < kCriteriaFloor; }

  ScorePair swapped() const { return {s2, s1}; }

  friend bool operator==(const ScorePair&, const ScorePair&) = default;
};

inline constexpr std::array<std::string_view, 6> kCriteria = {
    "relevance", "accuracy", "depth", "clarity", "reasoning", "rebuttal"};

/// Per-criterion judge scores for both answers, each in [1, 20].
struct CriterionBreakdown {
  std::array<int, 6> answer1{};
  std::array<int, 6> answer2{};

  void validate() const {
    for (std::size_t c = 0; c < kCriteria.size(); ++c) {
      for (int v : {answer1[c], answer2[c]}) {
        if (v < 1 || v > 20) {
          throw Error(ErrorKind::OutOfRange, std::string(kCriteria[c]) + " score " +
                                                 std::to_string(v) + " outside [1, 20]");
        }
      }
    }
  }

  ScorePair totals() const {
    return {std::accumulate(answer1.begin(), answer1.end(), 0),
            std::accumulate(answer2.begin(), answer2.end(), 0)};
  }

  bool consistent_with(const ScorePair& p) const { return totals() == p; }
};

// ---------------------------------------------------------------------------
// Rational

/// Exact non-negative-denominator fraction, always stored reduced.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw Error(ErrorKind::InvalidParameter, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  static Rational parse(std::string_view s) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(std::stoll(std::string(s)));
    return Rational(std::stoll(std::string(s.substr(0, slash))),
                    std::stoll(std::string(s.substr(slash + 1))));
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend auto operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct MeanScores {
  Rational s1;
  Rational s2;
  friend bool operator==(const MeanScores&, const MeanScores&) = default;
};

// ---------------------------------------------------------------------------
// Transcript

struct RoundRecord {
  int round_index = 1;
  std::string defense_1;
  std::string defense_2;
  ScorePair scores;
  std::string feedback;
};

/// Append-only, round-indexed debate transcript.
class DebateMemory {
 public:
  DebateMemory() = default;
  explicit DebateMemory(std::string item_ref) : item_ref_(std::move(item_ref)) {}

  void append(RoundRecord record) {
    if (record.round_index < 1) {
      throw Error(ErrorKind::InvalidParameter, "round_index must be >= 1");
    }
    if (!rounds_.empty() && record.round_index <= rounds_.back().round_index) {
      throw Error(ErrorKind::InvalidParameter,
                  "round_index " + std::to_string(record.round_index) +
                      " does not follow " + std::to_string(rounds_.back().round_index));
    }
    rounds_.push_back(std::move(record));
  }

  const std::string& item_ref() const { return item_ref_; }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }

 private:
  std::string item_ref_;
  std::vector<RoundRecord> rounds_;
};

struct Verdict {
  Winner winner = Winner::Tie;
  MeanScores mean_scores;
  std::optional<std::pair<int, int>> jury_tally;
  int rounds_used = 0;
  ProtocolLabel protocol = ProtocolLabel::Baseline;
  /// Non-fatal conditions: excluded jurors, jury fallback, sub-floor judge totals.
  std::vector<std::string> notes;

  /// The winner implied by the stored tallies.
  Winner derived_winner() const;
  bool is_consistent() const { return winner == derived_winner(); }
};

// ---------------------------------------------------------------------------
// Operations

/// argmax over a score pair, with an explicit tie.
inline Winner decide_winner(const ScorePair& scores) {
  if (scores.s1 > scores.s2) return Winner::Answer1;
  if (scores.s2 > scores.s1) return Winner::Answer2;
  return Winner::Tie;
}

inline Winner decide_winner(const MeanScores& m) {
  if (m.s1 > m.s2) return Winner::Answer1;
  if (m.s2 > m.s1) return Winner::Answer2;
  return Winner::Tie;
}

inline Winner decide_winner(const std::pair<int, int>& tally) {
  return decide_winner(ScorePair{tally.first, tally.second});
}

/// Exact per-side mean of the judge scores across all recorded rounds.
inline MeanScores mean_scores(const DebateMemory& memory) {
  if (memory.empty()) {
    throw Error(ErrorKind::EmptyDebate, "no rounds recorded for '" + memory.item_ref() + "'");
  }
  std::int64_t sum1 = 0;
  std::int64_t sum2 = 0;
  for (const auto& r : memory.rounds()) {
    sum1 += r.scores.s1;
    sum2 += r.scores.s2;
  }
  const auto n = static_cast<std::int64_t>(memory.size());
  return {Rational(sum1, n), Rational(sum2, n)};
}

inline Winner Verdict::derived_winner() const {
  return jury_tally ? decide_winner(*jury_tally) : decide_winner(mean_scores);
}

inline Verdict make_score_verdict(const DebateMemory& memory, ProtocolLabel protocol) {
  Verdict v;
  v.mean_scores = mean_scores(memory);
  v.rounds_used = static_cast<int>(memory.size());
  v.protocol = protocol;
  v.winner = decide_winner(v.mean_scores);
  return v;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const RoundRecord& r) {
  Json j;
  j["round_index"] = r.round_index;
  j["defense_1"] = r.defense_1;
  j["defense_2"] = r.defense_2;
  j["scores"] = Json::array({r.scores.s1, r.scores.s2});
  j["feedback"] = r.feedback;
  return j;
}

inline Json to_json(const Verdict& v) {
  Json j;
  j["winner"] = to_string(v.winner);
  j["mean_scores"] = Json::array({v.mean_scores.s1.to_string(), v.mean_scores.s2.to_string()});
  j["jury_tally"] =
      v.jury_tally ? Json::array({v.jury_tally->first, v.jury_tally->second}) : Json(nullptr);
  j["rounds_used"] = v.rounds_used;
  j["protocol"] = to_string(v.protocol);
  j["notes"] = v.notes;
  return j;
}

/// One JSON document per debate: item_ref, protocol, rounds[], verdict.
inline Json transcript_json(const DebateMemory& memory, const Verdict& verdict) {
  Json j;
  j["item_ref"] = memory.item_ref();
  j["protocol"] = to_string(verdict.protocol);
  j["rounds"] = Json::array();
  for (const auto& r : memory.rounds()) j["rounds"].push_back(to_json(r));
  j["verdict"] = to_json(verdict);
  return j;
}

inline RoundRecord round_from_json(const Json& j) {
  RoundRecord r;
  r.round_index = j.at("round_index").get<int>();
  r.defense_1 = j.at("defense_1").get<std::string>();
  r.defense_2 = j.at("defense_2").get<std::string>();
  r.scores = {j.at("scores").at(0).get<int>(), j.at("scores").at(1).get<int>()};
  r.feedback = j.at("feedback").get<std::string>();
  return r;
}

inline Verdict verdict_from_json(const Json& j) {
  Verdict v;
  v.winner = winner_from_string(j.at("winner").get<std::string>());
  v.mean_scores = {Rational::parse(j.at("mean_scores").at(0).get<std::string>()),
                   Rational::parse(j.at("mean_scores").at(1).get<std::string>())};
  if (!j.at("jury_tally").is_null()) {
    v.jury_tally = std::pair{j["jury_tally"].at(0).get<int>(), j["jury_tally"].at(1).get<int>()};
  }
  v.rounds_used = j.at("rounds_used").get<int>();
  v.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  v.notes = j.value("notes", std::vector<std::string>{});
  return v;
}

inline std::pair<DebateMemory, Verdict> transcript_from_json(const Json& j) {
  DebateMemory memory(j.at("item_ref").get<std::string>());
  for (const auto& r : j.at("rounds")) memory.append(round_from_json(r));
  return {std::move(memory), verdict_from_json(j.at("verdict"))};
}

}  // namespace advocates
