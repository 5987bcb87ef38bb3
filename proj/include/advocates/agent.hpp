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

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "advocates/core.hpp"
#include "advocates/parse.hpp"
#include "advocates/prompts.hpp"

namespace advocates {

enum class Role { Advocate, Judge, Juror, Summarizer, Aggregator };

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::Advocate: return "advocate";
    case Role::Judge: return "judge";
    case Role::Juror: return "juror";
    case Role::Summarizer: return "summarizer";
    case Role::Aggregator: return "aggregator";
  }
  return "advocate";
}

inline std::optional<Role> role_from_string(std::string_view s) {
  for (auto r : {Role::Advocate, Role::Judge, Role::Juror, Role::Summarizer, Role::Aggregator}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

/// What an agent is cast as. `side` and `index` apply to advocates (and to
/// aggregators, which work for one side); `persona` applies to jurors.
struct AgentRole {
  Role kind = Role::Judge;
  int side = 0;
  int index = 0;
  std::string persona;

  static AgentRole advocate(int side, int index) { return {Role::Advocate, side, index, {}}; }
  static AgentRole judge() { return {Role::Judge, 0, 0, {}}; }
  static AgentRole juror(std::string persona) { return {Role::Juror, 0, 0, std::move(persona)}; }
  static AgentRole summarizer() { return {Role::Summarizer, 0, 0, {}}; }
  static AgentRole aggregator(int side) { return {Role::Aggregator, side, 0, {}}; }

  void validate() const {
    if (kind == Role::Advocate) {
      if (side != 1 && side != 2) throw Error(ErrorKind::InvalidConfig, "advocate side must be 1 or 2");
      if (index < 1) throw Error(ErrorKind::InvalidConfig, "advocate index must be >= 1");
    }
    if (kind == Role::Juror && persona.empty()) {
      throw Error(ErrorKind::InvalidConfig, "juror persona must be non-empty");
    }
  }
};

struct Sampling {
  double temperature = 0.0;
  int max_tokens = 512;
  std::optional<std::uint64_t> seed;
};

/// Identifies one agent invocation. Scripted backends match on these fields;
/// the call log records them.
struct CallContext {
  std::string item_id;
  /// Baseline, MORE, SAMRE or SAMRE_NoJury; empty outside a protocol run.
  std::string protocol;
  Role role = Role::Judge;
  int side = 0;
  int index = 0;
  std::string persona;
  /// defend, judge, score, feedback, vote, aggregate, summarize
  std::string task;
  int round = 0;
  int attempt = 1;
};

struct CallRecord {
  CallContext context;
  std::string prompt;
  std::string response;
  double latency_ms = 0.0;
  std::string error;
};

/// Thread-safe record of every agent call.
class CallLog {
 public:
  void record(CallRecord r) {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(r));
  }

  std::vector<CallRecord> snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  std::size_t count_for(std::string_view item_id) const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& r : records_) n += r.context.item_id == item_id ? 1 : 0;
    return n;
  }

  std::size_t count_for(std::string_view item_id, Role role) const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& r : records_) {
      n += (r.context.item_id == item_id && r.context.role == role) ? 1 : 0;
    }
    return n;
  }

 private:
  mutable std::mutex mu_;
  std::vector<CallRecord> records_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string_view kind() const = 0;
  /// Returns the raw completion text. Must be callable concurrently.
  virtual std::string complete(const CallContext& context, const std::string& prompt,
                               const Sampling& sampling) = 0;
};

/// Deterministic test double. Entries are consumed in file order; an entry is
/// eligible for a call when every matcher it declares equals the call's
/// context. `repeat` entries are never consumed.
class ScriptedBackend : public Backend {
 public:
  struct Entry {
    std::string response;
    std::optional<Role> role;
    std::optional<std::string> task;
    std::optional<std::string> item;
    std::optional<int> round;
    std::optional<int> side;
    std::optional<int> index;
    std::optional<std::string> persona;
    std::optional<std::string> protocol;
    bool repeat = false;

    bool matches(const CallContext& c) const {
      return (!role || *role == c.role) && (!task || *task == c.task) &&
             (!item || *item == c.item_id) && (!round || *round == c.round) &&
             (!side || *side == c.side) && (!index || *index == c.index) &&
             (!persona || *persona == c.persona) && (!protocol || *protocol == c.protocol);
    }
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Entry> entries) {
    for (auto& e : entries) slots_.push_back({std::move(e), false});
  }

  /// Plain queue of canned responses.
  static std::shared_ptr<ScriptedBackend> queue(std::vector<std::string> responses) {
    std::vector<Entry> entries;
    for (auto& r : responses) {
      Entry e;
      e.response = std::move(r);
      entries.push_back(std::move(e));
    }
    return std::make_shared<ScriptedBackend>(std::move(entries));
  }

  static Entry entry_from_json(const Json& j) {
    Entry e;
    e.response = j.at("response").get<std::string>();
    if (j.contains("role")) {
      const auto name = j["role"].get<std::string>();
      e.role = role_from_string(name);
      if (!e.role) throw Error(ErrorKind::InvalidConfig, "unknown role '" + name + "'");
    }
    if (j.contains("task")) e.task = j["task"].get<std::string>();
    if (j.contains("item")) e.item = j["item"].get<std::string>();
    if (j.contains("round")) e.round = j["round"].get<int>();
    if (j.contains("side")) e.side = j["side"].get<int>();
    if (j.contains("index")) e.index = j["index"].get<int>();
    if (j.contains("persona")) e.persona = j["persona"].get<std::string>();
    if (j.contains("protocol")) e.protocol = j["protocol"].get<std::string>();
    e.repeat = j.value("repeat", false);
    return e;
  }

  /// One JSON object per line: {"response": ..., optional matchers}.
  static std::shared_ptr<ScriptedBackend> from_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path);
    std::vector<Entry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        entries.push_back(entry_from_json(Json::parse(line)));
      } catch (const Json::exception& e) {
        throw Error(ErrorKind::MalformedRow,
                    path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    return std::make_shared<ScriptedBackend>(std::move(entries));
  }

  std::string_view kind() const override { return "scripted"; }

  std::string complete(const CallContext& context, const std::string&,
                       const Sampling&) override {
    std::lock_guard lock(mu_);
    for (auto& slot : slots_) {
      if (slot.consumed || !slot.entry.matches(context)) continue;
      if (!slot.entry.repeat) slot.consumed = true;
      return slot.entry.response;
    }
    throw Error(ErrorKind::ScriptExhausted,
                "no script entry left for " + std::string(to_string(context.role)) +
                    (context.task.empty() ? "" : "/" + context.task) +
                    (context.item_id.empty() ? "" : " item " + context.item_id) +
                    " round " + std::to_string(context.round));
  }

  std::size_t remaining() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& s : slots_) n += s.consumed ? 0 : 1;
    return n;
  }

 private:
  struct Slot {
    Entry entry;
    bool consumed = false;
  };
  mutable std::mutex mu_;
  std::vector<Slot> slots_;
};

struct AgentSpec {
  AgentRole role;
  std::shared_ptr<Backend> backend;
  Sampling sampling;
};

/// Invokes the agent's backend and records the call. `context` supplies the
/// item/task/round; role fields are filled from the AgentSpec.
inline std::string complete(const AgentSpec& agent, const std::string& prompt,
                            CallContext context = {}, CallLog* log = nullptr) {
  if (!agent.backend) throw Error(ErrorKind::InvalidConfig, "agent has no backend");
  context.role = agent.role.kind;
  context.side = agent.role.side;
  context.index = agent.role.index;
  context.persona = agent.role.persona;

  const auto start = std::chrono::steady_clock::now();
  CallRecord record{context, prompt, {}, 0.0, {}};
  try {
    record.response = agent.backend->complete(context, prompt, agent.sampling);
  } catch (const Error& e) {
    record.error = e.what();
    record.latency_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start).count();
    if (log) log->record(std::move(record));
    throw;
  }
  record.latency_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start).count();
  std::string response = record.response;
  if (log) log->record(std::move(record));
  return response;
}

inline constexpr std::string_view kScoreRepairInstruction =
    "Return only the score tuple (score1, score2).";
inline constexpr std::string_view kVoteRepairInstruction =
    "Return only the vote tuple (1, 0) or (0, 1).";

/// Completes and parses. On a parse failure the prompt is re-sent once with
/// `repair` appended; the second failure propagates.
template <typename Parser>
auto complete_parsed(const AgentSpec& agent, const std::string& prompt, CallContext context,
                     CallLog* log, Parser&& parse, std::string_view repair)
    -> std::pair<std::invoke_result_t<Parser, std::string_view>, std::string> {
  std::string text = complete(agent, prompt, context, log);
  try {
    return {parse(text), text};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoTupleFound && e.kind() != ErrorKind::OutOfRange &&
        e.kind() != ErrorKind::InvalidVote) {
      throw;
    }
  }
  context.attempt += 1;
  text = complete(agent, prompt + "\n" + std::string(repair), context, log);
  return {parse(text), text};
}

/// Condenses `content` with the summarizer template. When the content carries
/// a score tuple the summary must still yield the same last tuple; a summary
/// that drops it is retried `retries` times before SummaryDroppedScores.
inline std::string summarize(const AgentSpec& agent, const std::string& content,
                             CallContext context = {}, CallLog* log = nullptr,
                             int retries = 1) {
  if (agent.role.kind != Role::Summarizer) {
    throw Error(ErrorKind::InvalidConfig, "summarize() needs a Summarizer agent");
  }
  context.task = "summarize";
  const std::string prompt =
      render_prompt(templates::summarizer(), {{"content", content}});
  const auto expected = detail::last_int_pair(content);
  for (int attempt = 0;; ++attempt) {
    context.attempt = attempt + 1;
    std::string summary = complete(agent, prompt, context, log);
    if (!expected) return summary;
    const auto got = detail::last_int_pair(summary);
    if (got && got->first == expected->first && got->second == expected->second) {
      return summary;
    }
    if (attempt >= retries) {
      throw Error(ErrorKind::SummaryDroppedScores,
                  "summary lost the tuple (" + std::to_string(expected->first) + ", " +
                      std::to_string(expected->second) + ")");
    }
  }
}

}  // namespace advocates
