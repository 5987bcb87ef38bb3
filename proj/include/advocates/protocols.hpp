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

#include <future>
#include <optional>
#include <string>
#include <vector>

#include "advocates/agent.hpp"
#include "advocates/core.hpp"
#include "advocates/prompts.hpp"

namespace advocates {

enum class ProtocolKind { Baseline, More, Samre };

inline const std::vector<std::string>& default_juror_personas() {
  static const std::vector<std::string> personas = {
      "A retired professor of ethics",
      "A young environmental activist",
      "A middle-aged business owner",
      "A social worker specializing in community development",
      "A technology entrepreneur with a background in AI",
  };
  return personas;
}

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::Baseline;
  int advocates_per_side = 3;
  int max_rounds = 4;
  std::vector<std::string> juror_personas = default_juror_personas();
  bool use_juries = true;
  /// MORE: merge each side's defenses with the aggregate-defense prompt.
  /// SAMRE: refine each side's defense against its history every round.
  bool use_llm_aggregation = false;
  /// MORE: condense each side's combined defense before judging.
  bool use_summarizer = false;
  /// SAMRE: ask for feedback with a separate judge call after scoring.
  bool separate_feedback_call = false;
  /// Run same-round advocate (and juror) calls concurrently.
  bool parallel_fanout = true;

  static ProtocolConfig baseline() { return {}; }
  static ProtocolConfig more(int k = 3) {
    ProtocolConfig c;
    c.kind = ProtocolKind::More;
    c.advocates_per_side = k;
    return c;
  }
  static ProtocolConfig samre(bool juries = true, int rounds = 4) {
    ProtocolConfig c;
    c.kind = ProtocolKind::Samre;
    c.advocates_per_side = 1;
    c.max_rounds = rounds;
    c.use_juries = juries;
    return c;
  }

  ProtocolLabel label() const {
    switch (kind) {
      case ProtocolKind::Baseline: return ProtocolLabel::Baseline;
      case ProtocolKind::More: return ProtocolLabel::MORE;
      case ProtocolKind::Samre: return use_juries ? ProtocolLabel::SAMRE : ProtocolLabel::SAMRE_NoJury;
    }
    return ProtocolLabel::Baseline;
  }

  void validate() const {
    if (advocates_per_side < 1) throw Error(ErrorKind::InvalidConfig, "advocates_per_side must be >= 1");
    if (max_rounds < 1) throw Error(ErrorKind::InvalidConfig, "max_rounds must be >= 1");
    if (kind == ProtocolKind::Samre && advocates_per_side != 1) {
      throw Error(ErrorKind::InvalidConfig, "SAMRE uses exactly one advocate per side");
    }
    if (kind == ProtocolKind::Samre && use_juries) {
      if (juror_personas.empty()) throw Error(ErrorKind::InvalidConfig, "juries need >= 1 juror");
      for (const auto& p : juror_personas) {
        if (p.empty()) throw Error(ErrorKind::InvalidConfig, "juror persona must be non-empty");
      }
    }
  }

  int juror_count() const {
    return kind == ProtocolKind::Samre && use_juries ? static_cast<int>(juror_personas.size()) : 0;
  }

  /// Closed-form agent-call count for a run that used `rounds` rounds with
  /// no repair retries.
  int expected_calls(int rounds) const {
    switch (kind) {
      case ProtocolKind::Baseline: return 1;
      case ProtocolKind::More:
        return 2 * advocates_per_side + 1 + (use_llm_aggregation ? 2 : 0) + (use_summarizer ? 2 : 0);
      case ProtocolKind::Samre:
        return rounds * (3 + (separate_feedback_call ? 1 : 0) + (use_llm_aggregation ? 2 : 0)) +
               juror_count();
    }
    return 0;
  }

  /// Upper bound used for dry-run budgeting.
  int max_calls() const { return expected_calls(kind == ProtocolKind::Samre ? max_rounds : 1); }
};

/// The agents taking part in one protocol run.
struct Panel {
  std::vector<AgentSpec> side1;
  std::vector<AgentSpec> side2;
  AgentSpec judge;
  std::vector<AgentSpec> jurors;
  std::optional<AgentSpec> summarizer;
  std::optional<AgentSpec> aggregator1;
  std::optional<AgentSpec> aggregator2;
};

/// Casts every role the config needs onto one backend.
inline Panel make_panel(const ProtocolConfig& config, std::shared_ptr<Backend> backend,
                        Sampling sampling = {}) {
  Panel p;
  const int k = config.kind == ProtocolKind::Baseline ? 0 : config.advocates_per_side;
  for (int i = 1; i <= k; ++i) {
    p.side1.push_back({AgentRole::advocate(1, i), backend, sampling});
    p.side2.push_back({AgentRole::advocate(2, i), backend, sampling});
  }
  p.judge = {AgentRole::judge(), backend, sampling};
  if (config.juror_count() > 0) {
    for (const auto& persona : config.juror_personas) {
      p.jurors.push_back({AgentRole::juror(persona), backend, sampling});
    }
  }
  if (config.use_summarizer) p.summarizer = AgentSpec{AgentRole::summarizer(), backend, sampling};
  if (config.use_llm_aggregation) {
    p.aggregator1 = AgentSpec{AgentRole::aggregator(1), backend, sampling};
    p.aggregator2 = AgentSpec{AgentRole::aggregator(2), backend, sampling};
  }
  return p;
}

struct ProtocolResult {
  Verdict verdict;
  DebateMemory memory;
};

/// SAMRE early stop: consecutive judge differences share a strict sign.
inline bool check_stop(const ScorePair& prev, const ScorePair& curr) {
  const long long d_prev = prev.s1 - prev.s2;
  const long long d_curr = curr.s1 - curr.s2;
  return d_prev * d_curr > 0;
}

namespace detail {

inline std::string format_scores(const std::vector<ScorePair>& history) {
  if (history.empty()) return "None";
  std::string out;
  for (const auto& s : history) {
    if (!out.empty()) out += ", ";
    out += "(" + std::to_string(s.s1) + ", " + std::to_string(s.s2) + ")";
  }
  return out;
}

inline std::string join_defenses(const std::vector<std::string>& defenses) {
  std::string out;
  for (std::size_t i = 0; i < defenses.size(); ++i) {
    if (i) out += "\n\n";
    out += "Advocate " + std::to_string(i + 1) + ": " + defenses[i];
  }
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += lines[i];
  }
  return out;
}

/// Runs `fn(i)` for i in [0, n), concurrently when `parallel`, and returns
/// results in index order. The first failure (in index order) is rethrown
/// after every task has finished.
template <typename Fn>
auto fan_out(std::size_t n, bool parallel, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out;
  out.reserve(n);
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<T>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, fn, i));
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      out.push_back(f.get());
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

[[noreturn]] inline void protocol_failed(const EvalItem& item, const Error& cause) {
  throw Error(ErrorKind::ProtocolFailed, "item '" + item.id + "': " + cause.what());
}

inline CallContext context_for(const EvalItem& item, ProtocolLabel protocol, std::string task, int round) {
  CallContext c;
  c.item_id = item.id;
  c.protocol = to_string(protocol);
  c.task = std::move(task);
  c.round = round;
  return c;
}

inline void note_floor(Verdict& v, const DebateMemory& memory) {
  for (const auto& r : memory.rounds()) {
    if (r.scores.below_criteria_floor()) {
      v.notes.push_back("round " + std::to_string(r.round_index) +
                        ": judge total below 6 cannot come from six 1-20 criteria");
    }
  }
}

}  // namespace detail

/// Single judge call over the raw answers.
inline ProtocolResult run_baseline(const EvalItem& item, const AgentSpec& judge,
                                   CallLog* log = nullptr) {
  item.validate();
  if (judge.role.kind != Role::Judge) throw Error(ErrorKind::InvalidConfig, "baseline needs a Judge");
  try {
    const auto prompt = render_prompt(
        templates::baseline_judge(),
        {{"question", item.question}, {"answer1", item.answer_a}, {"answer2", item.answer_b}});
    auto [scores, text] = complete_parsed(judge, prompt, detail::context_for(item, ProtocolLabel::Baseline, "judge", 1), log,
                                          parse_score_tuple, kScoreRepairInstruction);
    DebateMemory memory(item.id);
    memory.append({1, "", "", scores, text});
    auto verdict = make_score_verdict(memory, ProtocolLabel::Baseline);
    detail::note_floor(verdict, memory);
    return {std::move(verdict), std::move(memory)};
  } catch (const Error& e) {
    detail::protocol_failed(item, e);
  }
}

/// k advocates per side defend once; one judge call scores the combined defenses.
inline ProtocolResult run_more(const EvalItem& item, const Panel& panel,
                               const ProtocolConfig& config, CallLog* log = nullptr) {
  item.validate();
  config.validate();
  const auto k = static_cast<std::size_t>(config.advocates_per_side);
  if (panel.side1.size() != k || panel.side2.size() != k) {
    throw Error(ErrorKind::InvalidConfig, "MORE needs advocates_per_side advocates on each side");
  }
  try {
    // Index order: side 1 advocates, then side 2.
    auto defenses = detail::fan_out(2 * k, config.parallel_fanout, [&](std::size_t i) {
      const bool first = i < k;
      const auto& agent = first ? panel.side1[i] : panel.side2[i - k];
      const auto prompt = render_prompt(
          templates::more_advocate(),
          {{"answer", first ? item.answer_a : item.answer_b},
           {"question", item.question},
           {"opponent_answer", first ? item.answer_b : item.answer_a},
           {"feedback", ""},
           {"opponent_argument", ""}});
      return complete(agent, prompt, detail::context_for(item, ProtocolLabel::MORE, "defend", 1), log);
    });
    std::vector<std::string> d1(defenses.begin(), defenses.begin() + static_cast<long>(k));
    std::vector<std::string> d2(defenses.begin() + static_cast<long>(k), defenses.end());
    std::string combined1 = detail::join_defenses(d1);
    std::string combined2 = detail::join_defenses(d2);

    if (config.use_llm_aggregation) {
      if (!panel.aggregator1 || !panel.aggregator2) {
        throw Error(ErrorKind::InvalidConfig, "use_llm_aggregation needs aggregators");
      }
      auto merged = detail::fan_out(2, config.parallel_fanout, [&](std::size_t i) {
        const bool first = i == 0;
        const auto prompt = render_prompt(
            templates::samre_aggregate(),
            {{"answer", first ? item.answer_a : item.answer_b},
             {"question", item.question},
             {"opponent_answer", first ? item.answer_b : item.answer_a},
             {"defenses", first ? combined1 : combined2},
             {"feedback", ""}});
        return complete(first ? *panel.aggregator1 : *panel.aggregator2, prompt,
                        detail::context_for(item, ProtocolLabel::MORE, "aggregate", 1), log);
      });
      combined1 = merged[0];
      combined2 = merged[1];
    }
    if (config.use_summarizer) {
      if (!panel.summarizer) throw Error(ErrorKind::InvalidConfig, "use_summarizer needs a summarizer");
      combined1 = summarize(*panel.summarizer, combined1, detail::context_for(item, ProtocolLabel::MORE, "summarize", 1), log);
      combined2 = summarize(*panel.summarizer, combined2, detail::context_for(item, ProtocolLabel::MORE, "summarize", 1), log);
    }

    const auto prompt = render_prompt(templates::more_judge(),
                                      {{"question", item.question},
                                       {"answer1", item.answer_a},
                                       {"answer2", item.answer_b},
                                       {"current_round", "1"},
                                       {"max_rounds", "1"},
                                       {"previous_scores", "None"},
                                       {"defense1", combined1},
                                       {"defense2", combined2}});
    auto [scores, text] = complete_parsed(panel.judge, prompt, detail::context_for(item, ProtocolLabel::MORE, "judge", 1),
                                          log, parse_score_tuple, kScoreRepairInstruction);
    DebateMemory memory(item.id);
    memory.append({1, combined1, combined2, scores, text});
    auto verdict = make_score_verdict(memory, ProtocolLabel::MORE);
    detail::note_floor(verdict, memory);
    return {std::move(verdict), std::move(memory)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    detail::protocol_failed(item, e);
  }
}

/// Plain-text rendering of the memory that jurors read.
inline std::string render_transcript(const DebateMemory& memory) {
  std::string out;
  for (const auto& r : memory.rounds()) {
    out += "Round " + std::to_string(r.round_index) + ":\n";
    out += "Defense for 1st answer: " + r.defense_1 + "\n";
    out += "Defense for 2nd answer: " + r.defense_2 + "\n";
    out += "Judge scores: (" + std::to_string(r.scores.s1) + ", " + std::to_string(r.scores.s2) + ")\n";
    out += "Judge feedback: " + r.feedback + "\n";
  }
  return out;
}

/// One advocate per side debates for up to max_rounds judged rounds, stopping
/// early once two consecutive judge differences agree in sign; an optional
/// jury then votes on the full transcript.
inline ProtocolResult run_samre(const EvalItem& item, const Panel& panel,
                                const ProtocolConfig& config, CallLog* log = nullptr) {
  item.validate();
  config.validate();
  if (panel.side1.size() != 1 || panel.side2.size() != 1) {
    throw Error(ErrorKind::InvalidConfig, "SAMRE needs exactly one advocate per side");
  }
  if (config.use_juries && panel.jurors.empty()) {
    throw Error(ErrorKind::InvalidConfig, "use_juries needs at least one juror");
  }
  try {
    DebateMemory memory(item.id);
    std::vector<ScorePair> history;
    std::vector<std::string> team1;
    std::vector<std::string> team2;
    std::string feedback;
    const std::string total_rounds = std::to_string(config.max_rounds);

    for (int r = 1; r <= config.max_rounds; ++r) {
      auto defenses = detail::fan_out(2, config.parallel_fanout, [&](std::size_t i) {
        const bool first = i == 0;
        const auto& own = first ? team1 : team2;
        const auto& opp = first ? team2 : team1;
        const auto& agent = first ? panel.side1[0] : panel.side2[0];
        const auto prompt = render_prompt(
            templates::samre_defend(),
            {{"advocate_id", std::to_string(agent.role.index)},
             {"answer", first ? item.answer_a : item.answer_b},
             {"question", item.question},
             {"opponent_answer", first ? item.answer_b : item.answer_a},
             {"feedback", feedback},
             {"opponent_argument", opp.empty() ? "" : opp.back()},
             {"team_arguments", detail::join_lines(own)}});
        return complete(agent, prompt, detail::context_for(item, config.label(), "defend", r), log);
      });

      if (config.use_llm_aggregation) {
        if (!panel.aggregator1 || !panel.aggregator2) {
          throw Error(ErrorKind::InvalidConfig, "use_llm_aggregation needs aggregators");
        }
        defenses = detail::fan_out(2, config.parallel_fanout, [&](std::size_t i) {
          const bool first = i == 0;
          auto own = first ? team1 : team2;
          own.push_back(defenses[i]);
          const auto prompt = render_prompt(
              templates::samre_aggregate(),
              {{"answer", first ? item.answer_a : item.answer_b},
               {"question", item.question},
               {"opponent_answer", first ? item.answer_b : item.answer_a},
               {"defenses", detail::join_defenses(own)},
               {"feedback", feedback}});
          return complete(first ? *panel.aggregator1 : *panel.aggregator2, prompt,
                          detail::context_for(item, config.label(), "aggregate", r), log);
        });
      }

      const auto previous = detail::format_scores(history);
      const auto score_prompt = render_prompt(templates::samre_score(),
                                              {{"question", item.question},
                                               {"answer1", item.answer_a},
                                               {"answer2", item.answer_b},
                                               {"total_rounds", total_rounds},
                                               {"previous_scores", previous},
                                               {"defense1", defenses[0]},
                                               {"defense2", defenses[1]}});
      auto [scores, text] =
          complete_parsed(panel.judge, score_prompt, detail::context_for(item, config.label(), "score", r), log,
                          parse_score_tuple, kScoreRepairInstruction);
      std::string round_feedback = text;
      if (config.separate_feedback_call) {
        const auto fb_prompt = render_prompt(templates::samre_judge_feedback(),
                                             {{"question", item.question},
                                              {"answer1", item.answer_a},
                                              {"answer2", item.answer_b},
                                              {"current_round", std::to_string(r)},
                                              {"total_rounds", total_rounds},
                                              {"previous_scores", previous},
                                              {"defense1", defenses[0]},
                                              {"defense2", defenses[1]}});
        round_feedback = complete(panel.judge, fb_prompt, detail::context_for(item, config.label(), "feedback", r), log);
      }

      memory.append({r, defenses[0], defenses[1], scores, round_feedback});
      team1.push_back(defenses[0]);
      team2.push_back(defenses[1]);
      feedback = round_feedback;
      const bool stop = !history.empty() && check_stop(history.back(), scores);
      history.push_back(scores);
      if (stop) break;
    }

    auto verdict = make_score_verdict(memory, config.label());
    detail::note_floor(verdict, memory);
    if (!config.use_juries) return {std::move(verdict), std::move(memory)};

    const auto transcript = render_transcript(memory);
    const int round = static_cast<int>(memory.size());
    // Parse failures exclude a juror; backend failures still abort the item.
    auto votes = detail::fan_out(panel.jurors.size(), config.parallel_fanout, [&](std::size_t i) {
      const auto& juror = panel.jurors[i];
      const auto prompt = render_prompt(templates::juror_vote(),
                                        {{"persona", juror.role.persona},
                                         {"question", item.question},
                                         {"answer1", item.answer_a},
                                         {"answer2", item.answer_b},
                                         {"transcript", transcript}});
      try {
        return std::optional<ScorePair>(
            complete_parsed(juror, prompt, detail::context_for(item, config.label(), "vote", round), log,
                            parse_jury_vote, kVoteRepairInstruction)
                .first);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoTupleFound || e.kind() == ErrorKind::InvalidVote) {
          return std::optional<ScorePair>{};
        }
        throw;
      }
    });

    std::pair<int, int> tally{0, 0};
    int counted = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      if (!votes[i]) {
        verdict.notes.push_back("juror excluded (unparseable vote): " + panel.jurors[i].role.persona);
        continue;
      }
      tally.first += votes[i]->s1;
      tally.second += votes[i]->s2;
      ++counted;
    }
    if (counted == 0) {
      verdict.notes.push_back("all jurors failed; winner taken from mean judge scores");
      return {std::move(verdict), std::move(memory)};
    }
    verdict.jury_tally = tally;
    verdict.winner = decide_winner(tally);
    return {std::move(verdict), std::move(memory)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    detail::protocol_failed(item, e);
  }
}

/// Dispatches on config.kind.
inline ProtocolResult run_protocol(const EvalItem& item, const Panel& panel,
                                   const ProtocolConfig& config, CallLog* log = nullptr) {
  switch (config.kind) {
    case ProtocolKind::Baseline: return run_baseline(item, panel.judge, log);
    case ProtocolKind::More: return run_more(item, panel, config, log);
    case ProtocolKind::Samre: return run_samre(item, panel, config, log);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown protocol kind");
}

}  // namespace advocates
