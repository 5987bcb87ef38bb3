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
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "advocates/core.hpp"
#include "advocates/protocols.hpp"
#include "advocates/random.hpp"
#include "advocates/stats.hpp"

namespace advocates {

// ---------------------------------------------------------------------------
// Dataset

enum class DatasetFormat { Csv, Jsonl };

struct Dataset {
  std::vector<EvalItem> items;
  std::string source;
  DatasetFormat format = DatasetFormat::Csv;
};

inline constexpr std::string_view kColQuestion = "Question";
inline constexpr std::string_view kColResponseA = "Response_A";
inline constexpr std::string_view kColResponseB = "Response_B";
inline constexpr std::string_view kColScoreA = "Model_A_Score";
inline constexpr std::string_view kColScoreB = "Model_B_Score";

namespace csv {

/// RFC 4180 records: comma separated, double-quote escaping, quoted fields
/// may span lines. Each record carries the 1-based line it starts on.
struct Record {
  int line = 0;
  std::vector<std::string> fields;
};

inline std::vector<Record> parse(std::string_view text) {
  std::vector<Record> out;
  Record rec;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int line = 1;
  rec.line = 1;
  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!blank) out.push_back(std::move(rec));
    rec = Record{};
    rec.line = line;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorKind::MalformedRow, "line " + std::to_string(rec.line) + ": unterminated quote");
  if (!field.empty() || !rec.fields.empty()) end_record();
  return out;
}

inline std::string escape(std::string_view v) {
  if (v.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace csv

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline int parse_binary(const std::string& raw, int line, std::string_view column) {
  if (raw == "0") return 0;
  if (raw == "1") return 1;
  throw Error(ErrorKind::InvalidLabel,
              "line " + std::to_string(line) + ": " + std::string(column) + " = '" + raw + "' is not 0/1");
}

inline EvalItem make_item(std::string id, std::string q, std::string a, std::string b, int score_a,
                          int score_b, int line) {
  const auto label = label_from_binary(score_a, score_b);
  if (!label) {
    throw Error(ErrorKind::InvalidLabel, "line " + std::to_string(line) + ": scores (" +
                                             std::to_string(score_a) + ", " +
                                             std::to_string(score_b) + ") are not one-hot");
  }
  EvalItem item{std::move(id), std::move(q), std::move(a), std::move(b), label};
  try {
    item.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line) + ": " + e.what());
  }
  return item;
}

}  // namespace detail

inline Dataset parse_dataset(std::string_view text, DatasetFormat format, std::string source = {}) {
  Dataset ds;
  ds.source = std::move(source);
  ds.format = format;
  if (format == DatasetFormat::Csv) {
    const auto records = csv::parse(text);
    if (records.empty()) throw Error(ErrorKind::EmptyDataset, ds.source + ": no header row");
    std::map<std::string, std::size_t, std::less<>> col;
    for (std::size_t i = 0; i < records[0].fields.size(); ++i) col[records[0].fields[i]] = i;
    for (auto name : {kColQuestion, kColResponseA, kColResponseB, kColScoreA, kColScoreB}) {
      if (!col.contains(name)) {
        throw Error(ErrorKind::MalformedRow, "line 1: missing column " + std::string(name));
      }
    }
    const std::optional<std::size_t> id_col =
        col.contains("id") ? std::optional(col.find("id")->second) : std::nullopt;
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != records[0].fields.size()) {
        throw Error(ErrorKind::MalformedRow, "line " + std::to_string(rec.line) + ": expected " +
                                                 std::to_string(records[0].fields.size()) +
                                                 " fields, got " + std::to_string(rec.fields.size()));
      }
      auto get = [&](std::string_view c) { return rec.fields[col.find(c)->second]; };
      const std::string id = id_col ? rec.fields[*id_col] : std::to_string(r);
      ds.items.push_back(detail::make_item(id, get(kColQuestion), get(kColResponseA), get(kColResponseB),
                                           detail::parse_binary(get(kColScoreA), rec.line, kColScoreA),
                                           detail::parse_binary(get(kColScoreB), rec.line, kColScoreB),
                                           rec.line));
    }
  } else {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto j = Json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": not a JSON object");
      }
      auto text_field = [&](std::string_view key) {
        const auto it = j.find(std::string(key));
        if (it == j.end() || !it->is_string()) {
          throw Error(ErrorKind::MalformedRow,
                      "line " + std::to_string(line_no) + ": missing string " + std::string(key));
        }
        return it->get<std::string>();
      };
      auto score_field = [&](std::string_view key) {
        const auto it = j.find(std::string(key));
        if (it == j.end()) {
          throw Error(ErrorKind::MalformedRow,
                      "line " + std::to_string(line_no) + ": missing " + std::string(key));
        }
        if (it->is_number_integer()) {
          const auto v = it->get<long long>();
          if (v == 0 || v == 1) return static_cast<int>(v);
        }
        throw Error(ErrorKind::InvalidLabel, "line " + std::to_string(line_no) + ": " +
                                                 std::string(key) + " is not 0/1");
      };
      std::string id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                                        : std::to_string(ds.items.size() + 1);
      ds.items.push_back(detail::make_item(std::move(id), text_field(kColQuestion),
                                           text_field(kColResponseA), text_field(kColResponseB),
                                           score_field(kColScoreA), score_field(kColScoreB), line_no));
    }
  }
  if (ds.items.empty()) throw Error(ErrorKind::EmptyDataset, ds.source + ": no rows");
  std::set<std::string, std::less<>> seen;
  for (const auto& item : ds.items) {
    if (!seen.insert(item.id).second) {
      throw Error(ErrorKind::MalformedRow, "duplicate item id '" + item.id + "'");
    }
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path, DatasetFormat format) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::FileNotFound, path);
  return parse_dataset(detail::read_file(path), format, path);
}

inline std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "id,Question,Response_A,Response_B,Model_A_Score,Model_B_Score\n";
  for (const auto& item : ds.items) {
    const bool a = item.human_label == Side::A;
    out += csv::escape(item.id) + "," + csv::escape(item.question) + "," + csv::escape(item.answer_a) +
           "," + csv::escape(item.answer_b) + "," + (a ? "1,0" : "0,1") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark

struct ItemRecord {
  std::string id;
  std::optional<Verdict> verdict;
  std::optional<Side> human_label;
  bool match = false;
  int rounds_used = 0;
  std::size_t agent_calls = 0;
  std::string failure;
  std::optional<Json> transcript;
};

struct ProtocolReport {
  std::string name;
  ProtocolConfig config;
  double accuracy = 0.0;
  std::size_t matches = 0;
  /// Items with a verdict and a human label.
  std::size_t n = 0;
  std::size_t ties = 0;
  std::size_t failures = 0;
  std::vector<ItemRecord> items;
};

struct PairedComparison {
  std::string a;
  std::string b;
  std::size_t n = 0;
  std::optional<TTestResult> test;
  std::string note;
};

struct BenchmarkReport {
  std::vector<ProtocolReport> protocols;
  std::vector<PairedComparison> comparisons;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::optional<std::string> started_at;
};

struct BenchmarkOptions {
  unsigned workers = 1;
  std::uint64_t seed = 0;
  /// Abort when more than this fraction of items fail for any protocol.
  double abort_fraction = 0.5;
  std::string config_hash;
  std::optional<std::string> started_at;
  bool keep_transcripts = true;
};

/// Builds the panel for one protocol and the call log its calls go to.
using PanelFactory = std::function<Panel(const ProtocolConfig&)>;

inline std::string protocol_name(const ProtocolConfig& c) { return std::string(to_string(c.label())); }

/// Runs every protocol over every item. Items run in parallel on `workers`
/// threads; records come back in dataset order.
inline BenchmarkReport run_benchmark(const Dataset& dataset, const std::vector<ProtocolConfig>& protocols,
                                     const PanelFactory& factory, const BenchmarkOptions& options = {}) {
  if (dataset.items.empty()) throw Error(ErrorKind::EmptyDataset, "nothing to evaluate");
  if (protocols.empty()) throw Error(ErrorKind::InvalidConfig, "no protocols requested");
  BenchmarkReport report;
  report.config_hash = options.config_hash;
  report.seed = options.seed;
  report.started_at = options.started_at;

  std::set<std::string> names;
  for (const auto& config : protocols) {
    config.validate();
    ProtocolReport pr;
    pr.name = protocol_name(config);
    if (!names.insert(pr.name).second) {
      throw Error(ErrorKind::InvalidConfig, "protocol " + pr.name + " requested twice");
    }
    pr.config = config;
    const Panel panel = factory(config);
    CallLog log;
    pr.items = run_batches(dataset.items.size(), worker_count(options.workers), [&](std::size_t i) {
      const auto& item = dataset.items[i];
      ItemRecord rec;
      rec.id = item.id;
      rec.human_label = item.human_label;
      try {
        auto result = run_protocol(item, panel, config, &log);
        rec.rounds_used = result.verdict.rounds_used;
        rec.match = item.human_label && matches(result.verdict.winner, *item.human_label);
        if (options.keep_transcripts) rec.transcript = transcript_json(result.memory, result.verdict);
        rec.verdict = std::move(result.verdict);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidConfig) throw;
        rec.failure = e.what();
      }
      rec.agent_calls = log.count_for(item.id);
      return rec;
    });

    for (const auto& rec : pr.items) {
      if (!rec.verdict) {
        ++pr.failures;
        continue;
      }
      if (!rec.human_label) continue;
      ++pr.n;
      pr.matches += rec.match ? 1 : 0;
      pr.ties += rec.verdict->winner == Winner::Tie ? 1 : 0;
    }
    pr.accuracy = pr.n ? static_cast<double>(pr.matches) / static_cast<double>(pr.n) : 0.0;
    const double failed = static_cast<double>(pr.failures) / static_cast<double>(dataset.items.size());
    if (failed > options.abort_fraction) {
      std::string first;
      for (const auto& rec : pr.items) {
        if (!rec.failure.empty()) {
          first = rec.failure;
          break;
        }
      }
      throw Error(ErrorKind::BatchAborted, pr.name + ": " + std::to_string(pr.failures) + "/" +
                                               std::to_string(dataset.items.size()) +
                                               " items failed; first: " + first);
    }
    report.protocols.push_back(std::move(pr));
  }

  // Paired t-tests on per-item 0/1 match indicators, over items that every
  // protocol of the pair evaluated.
  for (std::size_t a = 0; a < report.protocols.size(); ++a) {
    for (std::size_t b = a + 1; b < report.protocols.size(); ++b) {
      const auto& pa = report.protocols[a];
      const auto& pb = report.protocols[b];
      PairedComparison cmp{pa.name, pb.name, 0, std::nullopt, {}};
      std::vector<double> x, y;
      for (std::size_t i = 0; i < pa.items.size(); ++i) {
        const auto& ra = pa.items[i];
        const auto& rb = pb.items[i];
        if (!ra.verdict || !rb.verdict || !ra.human_label) continue;
        x.push_back(ra.match ? 1.0 : 0.0);
        y.push_back(rb.match ? 1.0 : 0.0);
      }
      cmp.n = x.size();
      try {
        cmp.test = paired_t_test(x, y);
      } catch (const Error& e) {
        cmp.note = e.what();
      }
      report.comparisons.push_back(std::move(cmp));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report output

inline Json to_json(const ProtocolConfig& c) {
  Json j;
  j["protocol"] = to_string(c.label());
  j["advocates_per_side"] = c.advocates_per_side;
  j["max_rounds"] = c.max_rounds;
  j["use_juries"] = c.use_juries;
  j["juror_personas"] = c.juror_personas;
  j["use_llm_aggregation"] = c.use_llm_aggregation;
  j["use_summarizer"] = c.use_summarizer;
  j["separate_feedback_call"] = c.separate_feedback_call;
  return j;
}

inline Json to_json(const BenchmarkReport& r) {
  Json j;
  j["metadata"] = Json{{"config_hash", r.config_hash}, {"seed", r.seed}};
  if (r.started_at) j["metadata"]["started_at"] = *r.started_at;
  j["metadata"]["pairing"] = "per-item 0/1 match indicators on items evaluated by both protocols";
  j["protocols"] = Json::array();
  for (const auto& p : r.protocols) {
    Json pj;
    pj["name"] = p.name;
    pj["config"] = to_json(p.config);
    pj["accuracy"] = p.accuracy;
    pj["matches"] = p.matches;
    pj["n"] = p.n;
    pj["ties"] = p.ties;
    pj["failures"] = p.failures;
    pj["items"] = Json::array();
    for (const auto& it : p.items) {
      Json ij;
      ij["id"] = it.id;
      ij["winner"] = it.verdict ? Json(to_string(it.verdict->winner)) : Json(nullptr);
      ij["human_label"] = it.human_label ? Json(to_string(*it.human_label)) : Json(nullptr);
      ij["match"] = it.match;
      ij["rounds_used"] = it.rounds_used;
      ij["agent_calls"] = it.agent_calls;
      ij["failure"] = it.failure.empty() ? Json(nullptr) : Json(it.failure);
      ij["notes"] = it.verdict ? Json(it.verdict->notes) : Json::array();
      pj["items"].push_back(std::move(ij));
    }
    j["protocols"].push_back(std::move(pj));
  }
  j["paired_t_tests"] = Json::array();
  for (const auto& c : r.comparisons) {
    Json cj{{"a", c.a}, {"b", c.b}, {"n", c.n}};
    if (c.test) {
      cj["t"] = c.test->t;
      cj["p"] = c.test->p;
      cj["df"] = c.test->df;
    } else {
      cj["t"] = nullptr;
      cj["p"] = nullptr;
      cj["note"] = c.note;
    }
    j["paired_t_tests"].push_back(std::move(cj));
  }
  return j;
}

/// item id, winner, label, match, rounds_used
inline std::string protocol_csv(const ProtocolReport& p) {
  std::string out = "id,winner,label,match,rounds_used\n";
  for (const auto& it : p.items) {
    out += csv::escape(it.id) + "," + (it.verdict ? std::string(to_string(it.verdict->winner)) : "FAILED") +
           "," + (it.human_label ? std::string(to_string(*it.human_label)) : "") + "," +
           (it.match ? "1" : "0") + "," + std::to_string(it.rounds_used) + "\n";
  }
  return out;
}

/// One row, one accuracy cell per protocol column.
inline std::string summary_table(const BenchmarkReport& r, const std::string& row_label = "run") {
  std::ostringstream out;
  out << std::left << std::setw(14) << "Model";
  for (const auto& p : r.protocols) out << " | " << std::setw(14) << p.name;
  out << "\n" << std::string(14, '-');
  for (std::size_t i = 0; i < r.protocols.size(); ++i) out << "-+-" << std::string(14, '-');
  out << "\n" << std::setw(14) << row_label;
  for (const auto& p : r.protocols) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(2) << p.accuracy;
    if (p.failures) cell << " (" << p.failures << " failed)";
    out << " | " << std::setw(14) << cell.str();
  }
  out << "\n";
  for (const auto& c : r.comparisons) {
    out << "paired t-test " << c.a << " vs " << c.b << ": ";
    if (c.test) {
      out << "t = " << std::setprecision(4) << c.test->t << ", p = " << c.test->p << " (N = " << c.n << ")\n";
    } else {
      out << c.note << "\n";
    }
  }
  return out.str();
}

inline std::string safe_filename(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

/// Writes report.json, <protocol>.csv and transcripts/<protocol>/<id>.json.
inline void write_report(const BenchmarkReport& r, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ofstream(out_dir / "report.json", std::ios::binary) << to_json(r).dump(2) << "\n";
  for (const auto& p : r.protocols) {
    std::ofstream(out_dir / (p.name + ".csv"), std::ios::binary) << protocol_csv(p);
    const auto tdir = out_dir / "transcripts" / p.name;
    fs::create_directories(tdir);
    for (const auto& it : p.items) {
      if (it.transcript) {
        std::ofstream(tdir / (safe_filename(it.id) + ".json"), std::ios::binary) << it.transcript->dump(2) << "\n";
      }
    }
  }
  std::ofstream(out_dir / "summary.txt", std::ios::binary) << summary_table(r);
}

}  // namespace advocates
