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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "advocates/error.hpp"
#include "advocates/harness.hpp"
#include "advocates/live_backend.hpp"
#include "advocates/protocols.hpp"

namespace advocates::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed scalar or array from the TOML subset.
struct Value {
  enum class Type { String, Integer, Float, Bool, Array };
  Type type = Type::String;
  std::string str;
  std::int64_t integer = 0;
  double number = 0.0;
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

inline std::string_view type_name(Value::Type t) {
  switch (t) {
    case Value::Type::String: return "string";
    case Value::Type::Integer: return "integer";
    case Value::Type::Float: return "float";
    case Value::Type::Bool: return "boolean";
    case Value::Type::Array: return "array";
  }
  return "value";
}

/// section -> key -> value. Keys before any [section] live in section "".
using Document = std::map<std::string, std::map<std::string, Value>>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void fail(int line, const std::string& msg, std::string_view text = {}) {
  std::string m = "line " + std::to_string(line) + ": " + msg;
  if (!text.empty()) m += "\n  | " + std::string(text);
  throw ConfigError(m);
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : s_(text), line_(line) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail(line_, "trailing characters after value", s_);
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      if (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n') {
        ++pos_;
      } else if (s_[pos_] == '#') {
        // comment inside a multi-line array runs to end of line
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) fail(line_, "missing value", s_);
    Value v;
    v.line = line_;
    const char c = s_[pos_];
    if (c == '"') {
      v.type = Value::Type::String;
      v.str = parse_string();
    } else if (c == '[') {
      ++pos_;
      v.type = Value::Type::Array;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value());
        skip_ws();
        if (pos_ >= s_.size()) fail(line_, "unterminated array", s_);
        if (s_[pos_] == ',') {
          ++pos_;
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            break;
          }
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          break;
        }
        fail(line_, "expected ',' or ']' in array", s_);
      }
    } else {
      std::size_t end = pos_;
      while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != '#' &&
             s_[end] != ' ' && s_[end] != '\t' && s_[end] != '\n' && s_[end] != '\r') {
        ++end;
      }
      const std::string tok(s_.substr(pos_, end - pos_));
      pos_ = end;
      if (tok == "true" || tok == "false") {
        v.type = Value::Type::Bool;
        v.boolean = tok == "true";
      } else {
        std::string clean;
        for (char ch : tok) {
          if (ch != '_') clean += ch;
        }
        std::size_t used = 0;
        try {
          if (clean.find_first_of(".eE") == std::string::npos) {
            v.type = Value::Type::Integer;
            v.integer = std::stoll(clean, &used);
            v.number = static_cast<double>(v.integer);
          } else {
            v.type = Value::Type::Float;
            v.number = std::stod(clean, &used);
          }
        } catch (const std::exception&) {
          used = 0;
        }
        if (clean.empty() || used != clean.size()) fail(line_, "invalid value '" + tok + "'", s_);
      }
    }
    return v;
  }

  std::string parse_string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line_, std::string("unknown escape \\") + e, s_);
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) fail(line_, "unterminated string", s_);
    ++pos_;
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

inline int bracket_depth(std::string_view s) {
  int depth = 0;
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
    } else if (c == '"') {
      in_str = true;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

}  // namespace detail

inline Value parse_value(std::string_view text, int line = 0) {
  return detail::ValueParser(text, line).parse_all();
}

/// Parses `[section]` headers, `key = value` lines and `#` comments. Arrays
/// may span lines.
inline Document parse(std::string_view text) {
  Document doc;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) detail::fail(line_no, "unterminated section header", raw);
      const auto rest = detail::trim(line.substr(close + 1));
      if (!rest.empty() && rest[0] != '#') detail::fail(line_no, "text after section header", raw);
      section = detail::trim(line.substr(1, close - 1));
      if (section.empty()) detail::fail(line_no, "empty section name", raw);
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) detail::fail(line_no, "expected key = value", raw);
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) detail::fail(line_no, "empty key", raw);
    std::string value_text = line.substr(eq + 1);
    const int start_line = line_no;
    while (detail::bracket_depth(value_text) > 0) {
      if (!std::getline(in, raw)) detail::fail(start_line, "unterminated array");
      ++line_no;
      value_text += "\n" + raw;
    }
    if (doc[section].contains(key)) detail::fail(start_line, "duplicate key '" + key + "'", raw);
    doc[section][key] = parse_value(value_text, start_line);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// RunConfig

struct RunConfig {
  std::string backend = "scripted";
  std::string script_path;
  LiveConfig live;
  Sampling sampling;

  std::string dataset_path;
  DatasetFormat dataset_format = DatasetFormat::Csv;

  std::vector<ProtocolConfig> protocols;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  double abort_fraction = 0.5;
  bool timestamps = false;
};

namespace detail {

struct Reader {
  Document& doc;
  bool strict;
  std::set<std::string> used;

  const Value* find(const std::string& section, const std::string& key) {
    used.insert(section + "." + key);
    const auto s = doc.find(section);
    if (s == doc.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  [[noreturn]] void type_error(const std::string& section, const std::string& key, const Value& v,
                               std::string_view want) {
    fail(v.line, section + "." + key + ": expected " + std::string(want) + ", got " +
                     std::string(type_name(v.type)));
  }

  void get(const std::string& section, const std::string& key, std::string& out) {
    if (const auto* v = find(section, key)) {
      if (v->type != Value::Type::String) type_error(section, key, *v, "string");
      out = v->str;
    }
  }
  void get(const std::string& section, const std::string& key, bool& out) {
    if (const auto* v = find(section, key)) {
      if (v->type != Value::Type::Bool) type_error(section, key, *v, "boolean");
      out = v->boolean;
    }
  }
  void get(const std::string& section, const std::string& key, double& out) {
    if (const auto* v = find(section, key)) {
      if (v->type != Value::Type::Float && v->type != Value::Type::Integer) {
        type_error(section, key, *v, "number");
      }
      out = v->number;
    }
  }
  template <typename Int>
    requires std::is_integral_v<Int>
  void get(const std::string& section, const std::string& key, Int& out) {
    if (const auto* v = find(section, key)) {
      if (v->type != Value::Type::Integer) type_error(section, key, *v, "integer");
      if (std::is_unsigned_v<Int> && v->integer < 0) {
        fail(v->line, section + "." + key + ": must be non-negative");
      }
      out = static_cast<Int>(v->integer);
    }
  }
  void get(const std::string& section, const std::string& key, std::vector<std::string>& out) {
    if (const auto* v = find(section, key)) {
      if (v->type != Value::Type::Array) type_error(section, key, *v, "array of strings");
      out.clear();
      for (const auto& item : v->items) {
        if (item.type != Value::Type::String) type_error(section, key, item, "string element");
        out.push_back(item.str);
      }
    }
  }

  void reject_unknown() {
    if (!strict) return;
    for (const auto& [section, keys] : doc) {
      for (const auto& [key, value] : keys) {
        if (!used.contains(section + "." + key)) {
          fail(value.line, "unknown key '" + (section.empty() ? key : section + "." + key) + "'");
        }
      }
    }
  }
};

}  // namespace detail

/// Applies a `section.key=value` override. Unquoted text that is not a valid
/// TOML scalar is taken as a string.
inline void apply_override(Document& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  }
  const auto section = assignment.substr(0, dot);
  const auto key = assignment.substr(dot + 1, eq - dot - 1);
  const auto text = assignment.substr(eq + 1);
  Value v;
  try {
    v = parse_value(text);
  } catch (const ConfigError&) {
    v.type = Value::Type::String;
    v.str = text;
  }
  doc[section][key] = v;
}

inline ProtocolKind protocol_kind(std::string_view name, bool& juries, int line) {
  juries = true;
  if (name == "baseline") return ProtocolKind::Baseline;
  if (name == "more") return ProtocolKind::More;
  if (name == "samre") return ProtocolKind::Samre;
  if (name == "samre_no_jury") {
    juries = false;
    return ProtocolKind::Samre;
  }
  detail::fail(line, "unknown protocol '" + std::string(name) +
                         "' (baseline, more, samre, samre_no_jury)");
}

/// Builds and validates a RunConfig. Relative paths resolve against `base_dir`.
inline RunConfig build(Document doc, const std::filesystem::path& base_dir = {}, bool strict = true) {
  detail::Reader r{doc, strict, {}};
  RunConfig c;

  r.get("agents", "backend", c.backend);
  r.get("agents", "script", c.script_path);
  r.get("agents", "base_url", c.live.base_url);
  r.get("agents", "model", c.live.model);
  r.get("agents", "api_key_env", c.live.api_key_env);
  r.get("agents", "timeout_s", c.live.timeout_s);
  r.get("agents", "max_in_flight", c.live.max_in_flight);
  r.get("agents", "temperature", c.sampling.temperature);
  r.get("agents", "max_tokens", c.sampling.max_tokens);

  r.get("dataset", "path", c.dataset_path);
  std::string format = "csv";
  r.get("dataset", "format", format);

  std::vector<std::string> names = {"baseline", "more", "samre", "samre_no_jury"};
  r.get("run", "protocols", names);
  r.get("run", "workers", c.workers);
  r.get("run", "seed", c.seed);
  r.get("run", "out_dir", c.out_dir);
  r.get("run", "abort_fraction", c.abort_fraction);
  r.get("run", "timestamps", c.timestamps);

  ProtocolConfig more = ProtocolConfig::more();
  r.get("more", "advocates_per_side", more.advocates_per_side);
  r.get("more", "use_llm_aggregation", more.use_llm_aggregation);
  r.get("more", "use_summarizer", more.use_summarizer);
  r.get("more", "parallel_fanout", more.parallel_fanout);

  ProtocolConfig samre = ProtocolConfig::samre();
  r.get("samre", "max_rounds", samre.max_rounds);
  r.get("samre", "juror_personas", samre.juror_personas);
  r.get("samre", "use_llm_aggregation", samre.use_llm_aggregation);
  r.get("samre", "separate_feedback_call", samre.separate_feedback_call);
  r.get("samre", "parallel_fanout", samre.parallel_fanout);

  r.reject_unknown();

  const int run_line = [&] {
    const auto* v = r.find("run", "protocols");
    return v ? v->line : 0;
  }();
  for (const auto& name : names) {
    bool juries = true;
    const auto kind = protocol_kind(name, juries, run_line);
    ProtocolConfig p = kind == ProtocolKind::Baseline ? ProtocolConfig::baseline()
                       : kind == ProtocolKind::More   ? more
                                                      : samre;
    p.use_juries = juries;
    c.protocols.push_back(p);
  }

  auto fail_key = [&](const std::string& section, const std::string& key, const std::string& msg) {
    const auto* v = r.find(section, key);
    throw ConfigError((v ? "line " + std::to_string(v->line) + ": " : std::string()) + section + "." +
                      key + ": " + msg);
  };
  if (c.backend != "scripted" && c.backend != "live") fail_key("agents", "backend", "must be scripted or live");
  if (c.backend == "scripted" && c.script_path.empty()) fail_key("agents", "script", "required for scripted backend");
  if (c.backend == "live") {
    try {
      c.live.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("agents: ") + e.what());
    }
  }
  if (c.dataset_path.empty()) fail_key("dataset", "path", "missing dataset path");
  if (format == "csv") c.dataset_format = DatasetFormat::Csv;
  else if (format == "jsonl") c.dataset_format = DatasetFormat::Jsonl;
  else fail_key("dataset", "format", "must be csv or jsonl");
  if (c.protocols.empty()) fail_key("run", "protocols", "at least one protocol required");
  if (c.workers < 1) fail_key("run", "workers", "must be >= 1");
  if (!(c.abort_fraction >= 0.0 && c.abort_fraction <= 1.0)) fail_key("run", "abort_fraction", "must lie in [0, 1]");
  for (const auto& p : c.protocols) {
    try {
      p.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string(to_string(p.label())) + ": " + e.what());
    }
  }

  auto resolve = [&](std::string& path) {
    if (!path.empty() && !base_dir.empty() && std::filesystem::path(path).is_relative()) {
      path = (base_dir / path).lexically_normal().string();
    }
  };
  resolve(c.script_path);
  resolve(c.dataset_path);
  return c;
}

inline RunConfig load(const std::string& path, const std::vector<std::string>& overrides = {},
                      bool strict = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Document doc = parse(ss.str());
  for (const auto& o : overrides) apply_override(doc, o);
  return build(std::move(doc), std::filesystem::path(path).parent_path(), strict);
}

/// Canonical JSON of everything that affects results (no paths or timestamps).
inline Json fingerprint_json(const RunConfig& c) {
  Json j;
  j["backend"] = c.backend;
  if (c.backend == "live") j["model"] = c.live.model;
  j["temperature"] = c.sampling.temperature;
  j["max_tokens"] = c.sampling.max_tokens;
  j["seed"] = c.seed;
  j["protocols"] = Json::array();
  for (const auto& p : c.protocols) j["protocols"].push_back(to_json(p));
  return j;
}

/// FNV-1a 64 of the fingerprint JSON, hex.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : fingerprint_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace advocates::config
