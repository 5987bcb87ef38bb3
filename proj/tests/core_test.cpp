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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "advocates/core.hpp"

namespace advocates {
namespace {

TEST(DecideWinner, PicksLargerScore) {
  EXPECT_EQ(decide_winner(ScorePair{18, 9}), Winner::Answer1);
  EXPECT_EQ(decide_winner(ScorePair{7, 7}), Winner::Tie);
  EXPECT_EQ(decide_winner(ScorePair{87, 95}), Winner::Answer2);
}

TEST(DecideWinner, AntisymmetricUnderSwap) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> d(1, 120);
  for (int n = 0; n < 2000; ++n) {
    const ScorePair p{d(rng), d(rng)};
    EXPECT_EQ(decide_winner(p.swapped()), mirror(decide_winner(p)));
  }
}

TEST(ScorePair, JudgeTotalRange) {
  EXPECT_NO_THROW(ScorePair::judge_total(1, 120));
  EXPECT_THROW(ScorePair::judge_total(0, 50), Error);
  EXPECT_THROW(ScorePair::judge_total(50, 121), Error);
  try {
    ScorePair::judge_total(130, 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
  EXPECT_TRUE(ScorePair::judge_total(5, 80).below_criteria_floor());
  EXPECT_FALSE(ScorePair::judge_total(6, 80).below_criteria_floor());
}

TEST(ScorePair, VoteMustBeOneHot) {
  EXPECT_EQ(ScorePair::vote(1, 0), (ScorePair{1, 0}));
  EXPECT_EQ(ScorePair::vote(0, 1), (ScorePair{0, 1}));
  for (auto [a, b] : {std::pair{1, 1}, {0, 0}, {2, -1}}) {
    try {
      ScorePair::vote(a, b);
      ADD_FAILURE() << a << "," << b;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidVote);
    }
  }
}

TEST(CriterionBreakdown, TotalsAndRange) {
  CriterionBreakdown c{{20, 18, 15, 17, 16, 9}, {10, 12, 14, 16, 18, 17}};
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.totals(), (ScorePair{95, 87}));
  EXPECT_TRUE(c.consistent_with({95, 87}));
  EXPECT_FALSE(c.consistent_with({87, 95}));
  c.answer2[3] = 21;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Rational, ReducedAndOrdered) {
  EXPECT_EQ(Rational(178, 2), Rational(89));
  EXPECT_EQ(Rational(339, 4).to_string(), "339/4");
  EXPECT_EQ(Rational(6, -4).to_string(), "-3/2");
  EXPECT_EQ(Rational::parse("155/2"), Rational(155, 2));
  EXPECT_LT(Rational(223, 3), Rational(224, 3));
  EXPECT_THROW(Rational(1, 0), Error);
}

DebateMemory memory_of(std::initializer_list<ScorePair> scores) {
  DebateMemory m("item");
  int r = 1;
  for (const auto& s : scores) m.append({r++, "d1", "d2", s, "fb"});
  return m;
}

TEST(MeanScores, Examples) {
  EXPECT_EQ(mean_scores(memory_of({{90, 80}, {88, 82}})), (MeanScores{89, 81}));
  EXPECT_EQ(mean_scores(memory_of({{100, 50}})), (MeanScores{100, 50}));
  EXPECT_EQ(mean_scores(memory_of({{60, 60}, {60, 60}, {60, 60}})), (MeanScores{60, 60}));
}

TEST(MeanScores, ExactWithoutRounding) {
  const auto m = mean_scores(memory_of({{1, 2}, {2, 2}, {2, 3}}));
  EXPECT_EQ(m.s1, Rational(5, 3));
  EXPECT_EQ(m.s2, Rational(7, 3));
}

TEST(MeanScores, EmptyTranscriptThrows) {
  try {
    mean_scores(DebateMemory("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyDebate);
  }
}

TEST(MeanScores, PermutationInvariantAndBounded) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(1, 120);
  std::uniform_int_distribution<int> len(1, 6);
  for (int n = 0; n < 500; ++n) {
    std::vector<ScorePair> s(static_cast<std::size_t>(len(rng)));
    for (auto& p : s) p = {d(rng), d(rng)};
    auto build = [](const std::vector<ScorePair>& v) {
      DebateMemory m("p");
      for (std::size_t i = 0; i < v.size(); ++i) m.append({static_cast<int>(i + 1), "", "", v[i], ""});
      return m;
    };
    const auto base = mean_scores(build(s));
    auto shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(mean_scores(build(shuffled)), base);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end(),
                                              [](auto& a, auto& b) { return a.s1 < b.s1; });
    EXPECT_LE(Rational(lo->s1), base.s1);
    EXPECT_GE(Rational(hi->s1), base.s1);
  }
}

TEST(DebateMemory, RoundIndexStrictlyIncreases) {
  DebateMemory m("x");
  m.append({1, "", "", {1, 1}, ""});
  EXPECT_THROW(m.append({1, "", "", {1, 1}, ""}), Error);
  EXPECT_THROW(m.append({0, "", "", {1, 1}, ""}), Error);
  m.append({3, "", "", {1, 1}, ""});
  EXPECT_EQ(m.size(), 2u);
}

TEST(Verdict, ConsistencyWithTallies) {
  auto v = make_score_verdict(memory_of({{90, 80}, {88, 82}}), ProtocolLabel::SAMRE);
  EXPECT_EQ(v.winner, Winner::Answer1);
  EXPECT_EQ(v.rounds_used, 2);
  EXPECT_TRUE(v.is_consistent());
  v.jury_tally = std::pair{1, 4};
  EXPECT_FALSE(v.is_consistent());
  v.winner = decide_winner(*v.jury_tally);
  EXPECT_TRUE(v.is_consistent());
  v.jury_tally = std::pair{2, 2};
  EXPECT_EQ(v.derived_winner(), Winner::Tie);
}

TEST(EvalItem, ValidationAndLabels) {
  EvalItem ok{"1", "q", "a", "b", Side::A};
  EXPECT_NO_THROW(ok.validate());
  EvalItem bad{"2", "q", "", "b", std::nullopt};
  try {
    bad.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidItem);
  }
  EXPECT_EQ(label_from_binary(1, 0), Side::A);
  EXPECT_EQ(label_from_binary(0, 1), Side::B);
  EXPECT_EQ(label_from_binary(1, 1), std::nullopt);
  EXPECT_TRUE(matches(Winner::Answer2, Side::B));
  EXPECT_FALSE(matches(Winner::Tie, Side::A));
}

TEST(Transcript, JsonShapeAndRoundTrip) {
  const auto m = memory_of({{80, 90}, {90, 80}, {84, 85}, {85, 84}});
  auto v = make_score_verdict(m, ProtocolLabel::SAMRE);
  v.jury_tally = std::pair{1, 4};
  v.winner = Winner::Answer2;
  const auto j = transcript_json(m, v);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"item_ref", "protocol", "rounds", "verdict"}));
  EXPECT_EQ(j["rounds"].size(), 4u);
  EXPECT_EQ(j["verdict"]["mean_scores"][0], "339/4");
  EXPECT_EQ(j["verdict"]["winner"], "Answer2");
  EXPECT_EQ(j["verdict"]["jury_tally"][1], 4);

  const auto [m2, v2] = transcript_from_json(j);
  EXPECT_EQ(m2.size(), 4u);
  EXPECT_EQ(m2.rounds()[2].scores, (ScorePair{84, 85}));
  EXPECT_EQ(v2.mean_scores, v.mean_scores);
  EXPECT_EQ(v2.jury_tally, v.jury_tally);
  EXPECT_EQ(transcript_json(m2, v2).dump(), j.dump());
}

}  // namespace
}  // namespace advocates
