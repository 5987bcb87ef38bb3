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

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "advocates/error.hpp"
#include "advocates/prompt_templates.hpp"

namespace advocates {

using SlotMap = std::map<std::string, std::string, std::less<>>;

namespace detail {

inline bool is_slot_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

/// Calls `on_text(text)` / `on_slot(name)` for each piece of `body` in order.
/// A slot is `{identifier}`; any other brace is literal text.
template <typename OnText, typename OnSlot>
void scan_slots(std::string_view body, OnText&& on_text, OnSlot&& on_slot) {
  std::size_t pos = 0;
  std::size_t text_start = 0;
  while (pos < body.size()) {
    if (body[pos] == '{') {
      std::size_t end = pos + 1;
      while (end < body.size() && is_slot_char(body[end])) ++end;
      if (end < body.size() && body[end] == '}' && end > pos + 1) {
        on_text(body.substr(text_start, pos - text_start));
        on_slot(body.substr(pos + 1, end - pos - 1));
        pos = end + 1;
        text_start = pos;
        continue;
      }
    }
    ++pos;
  }
  on_text(body.substr(text_start));
}

}  // namespace detail

struct PromptTemplate {
  std::string name;
  std::string body;
  std::set<std::string, std::less<>> required_slots;

  PromptTemplate() = default;
  PromptTemplate(std::string template_name, std::string template_body)
      : name(std::move(template_name)), body(std::move(template_body)) {
    detail::scan_slots(
        body, [](std::string_view) {},
        [this](std::string_view slot) { required_slots.emplace(slot); });
  }

  static PromptTemplate from_file(const std::string& name, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return PromptTemplate(name, ss.str());
  }
};

/// Substitutes every `{slot}` with its value, verbatim. Substituted text is
/// never rescanned, so braces inside answers survive untouched.
///
/// Throws MissingSlot for a required slot absent from `slots`, and in strict
/// mode UnknownSlot for a provided slot the template does not use.
inline std::string render_prompt(const PromptTemplate& tpl, const SlotMap& slots,
                                 bool strict = false) {
  for (const auto& slot : tpl.required_slots) {
    if (!slots.contains(slot)) {
      throw Error(ErrorKind::MissingSlot, slot + " (template " + tpl.name + ")");
    }
  }
  if (strict) {
    for (const auto& [key, _] : slots) {
      if (!tpl.required_slots.contains(key)) {
        throw Error(ErrorKind::UnknownSlot, key + " (template " + tpl.name + ")");
      }
    }
  }
  std::string out;
  out.reserve(tpl.body.size());
  detail::scan_slots(
      tpl.body, [&](std::string_view text) { out.append(text); },
      [&](std::string_view slot) { out.append(slots.find(slot)->second); });
  return out;
}

namespace templates {

// Each accessor returns a process-wide immutable template.
#define ADVOCATES_TEMPLATE(fn)                                        \
  inline const PromptTemplate& fn() {                                 \
    static const PromptTemplate tpl(#fn, std::string(k_##fn));        \
    return tpl;                                                       \
  }

ADVOCATES_TEMPLATE(more_judge)
ADVOCATES_TEMPLATE(more_advocate)
ADVOCATES_TEMPLATE(summarizer)
ADVOCATES_TEMPLATE(samre_defend)
ADVOCATES_TEMPLATE(samre_aggregate)
ADVOCATES_TEMPLATE(samre_judge_feedback)
ADVOCATES_TEMPLATE(samre_score)
ADVOCATES_TEMPLATE(baseline_judge)
ADVOCATES_TEMPLATE(juror_vote)

#undef ADVOCATES_TEMPLATE

inline constexpr std::string_view kNames[] = {
    "more_judge",   "more_advocate",        "summarizer",  "samre_defend",  "samre_aggregate",
    "samre_judge_feedback", "samre_score", "baseline_judge", "juror_vote"};

inline const PromptTemplate& by_name(std::string_view name) {
  if (name == "more_judge") return more_judge();
  if (name == "more_advocate") return more_advocate();
  if (name == "summarizer") return summarizer();
  if (name == "samre_defend") return samre_defend();
  if (name == "samre_aggregate") return samre_aggregate();
  if (name == "samre_judge_feedback") return samre_judge_feedback();
  if (name == "samre_score") return samre_score();
  if (name == "baseline_judge") return baseline_judge();
  if (name == "juror_vote") return juror_vote();
  throw Error(ErrorKind::InvalidParameter, "unknown template '" + std::string(name) + "'");
}

}  // namespace templates

}  // namespace advocates
