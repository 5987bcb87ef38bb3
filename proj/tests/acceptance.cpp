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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "advocates/aggregation.hpp"
#include "advocates/config.hpp"
#include "advocates/gap_model.hpp"
#include "advocates/harness.hpp"
#include "advocates/stats.hpp"
#include "t_oracle.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace advocates;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

// ---------------------------------------------------------------------------
// Conformance fixture

struct Conformance {
  config::RunConfig cfg;
  Dataset dataset;
  Json expected;
};

Conformance load_conformance() {
  Conformance c;
  c.cfg = config::load(testing::fixture("conformance/config.toml"));
  c.dataset = load_dataset(c.cfg.dataset_path, c.cfg.dataset_format);
  c.expected = Json::parse(testing::slurp(testing::fixture("conformance/expected.json")));
  return c;
}

BenchmarkReport run_conformance(const Conformance& c, unsigned workers) {
  auto backend = ScriptedBackend::from_jsonl(c.cfg.script_path);
  BenchmarkOptions opt;
  opt.workers = workers;
  opt.seed = c.cfg.seed;
  opt.config_hash = config::config_hash(c.cfg);
  return run_benchmark(
      c.dataset, c.cfg.protocols,
      [backend](const ProtocolConfig& p) { return make_panel(p, backend); }, opt);
}

/// Differences between one protocol's records and the hand trace.
std::vector<std::string> trace_mismatches(const ProtocolReport& p, const Json& want) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < p.items.size(); ++i) {
    const auto& rec = p.items[i];
    const std::string where = p.name + " " + rec.id + ": ";
    if (!rec.verdict) {
      bad.push_back(where + "failed: " + rec.failure);
      continue;
    }
    const auto& v = *rec.verdict;
    if (std::string(to_string(v.winner)) != want["winners"][i]) bad.push_back(where + "winner");
    if (v.rounds_used != want["rounds"][i]) bad.push_back(where + "rounds");
    if (v.mean_scores.s1.to_string() != want["mean_scores"][i][0] ||
        v.mean_scores.s2.to_string() != want["mean_scores"][i][1]) {
      bad.push_back(where + "mean scores " + v.mean_scores.s1.to_string() + "/" + v.mean_scores.s2.to_string());
    }
    if (want.contains("jury_tally")) {
      if (!v.jury_tally || v.jury_tally->first != want["jury_tally"][i][0] ||
          v.jury_tally->second != want["jury_tally"][i][1]) {
        bad.push_back(where + "jury tally");
      }
    } else if (v.jury_tally) {
      bad.push_back(where + "unexpected jury tally");
    }
    if (!v.is_consistent()) bad.push_back(where + "verdict inconsistent");
  }
  if (std::abs(p.accuracy - want["accuracy"].get<double>()) > 1e-12) bad.push_back(p.name + " accuracy");
  return bad;
}

Outcome criterion_conformance() {
  const auto c = load_conformance();
  std::vector<std::string> bad;
  std::string first_dump;
  for (unsigned workers : {1u, 4u}) {
    const auto report = run_conformance(c, workers);
    for (const auto& p : report.protocols) {
      if (!c.expected.contains(p.name)) {
        bad.push_back("no trace for " + p.name);
        continue;
      }
      for (auto& m : trace_mismatches(p, c.expected[p.name])) bad.push_back(std::move(m));
    }
    if (report.protocols.size() != 4) bad.push_back("expected 4 protocols");
    const auto dump = to_json(report).dump();
    if (first_dump.empty()) first_dump = dump;
    else if (dump != first_dump) bad.push_back("report differs between 1 and 4 workers");
  }
  // SAMRE rounds: 2 on same-sign score sequences, the full 4 on alternating ones.
  const auto& rounds = c.expected["SAMRE"]["rounds"];
  int stop2 = 0, full4 = 0;
  for (const auto& r : rounds) {
    stop2 += r == 2 ? 1 : 0;
    full4 += r == 4 ? 1 : 0;
  }
  if (stop2 == 0 || full4 == 0) bad.push_back("fixture lacks round-2 or round-4 items");
  if (!bad.empty()) return {false, bad.front() + (bad.size() > 1 ? " (+" + std::to_string(bad.size() - 1) + " more)" : "")};
  return {true, "4 protocols x 10 items match the hand trace at 1 and 4 workers; " + std::to_string(stop2) +
                    " SAMRE items stop at round 2, " + std::to_string(full4) + " run all 4 rounds"};
}

Outcome criterion_call_budget() {
  const auto c = load_conformance();
  const auto report = run_conformance(c, 2);
  std::vector<std::string> bad;
  for (const auto& p : report.protocols) {
    const auto& want = c.expected[p.name]["calls"];
    for (std::size_t i = 0; i < p.items.size(); ++i) {
      const auto& rec = p.items[i];
      const int r = rec.rounds_used;
      std::size_t closed = 0;
      switch (p.config.label()) {
        case ProtocolLabel::Baseline: closed = 1; break;
        case ProtocolLabel::MORE: closed = 2 * static_cast<std::size_t>(p.config.advocates_per_side) + 1; break;
        case ProtocolLabel::SAMRE: closed = 3 * static_cast<std::size_t>(r) + p.config.juror_personas.size(); break;
        case ProtocolLabel::SAMRE_NoJury: closed = 3 * static_cast<std::size_t>(r); break;
      }
      if (rec.agent_calls != closed || rec.agent_calls != want[i].get<std::size_t>()) {
        bad.push_back(p.name + " " + rec.id + ": logged " + std::to_string(rec.agent_calls) + ", closed form " +
                      std::to_string(closed) + ", trace " + want[i].dump());
      }
    }
  }
  if (!bad.empty()) return {false, bad.front()};
  return {true, "logged calls equal 1 / 2k+1 / 3r+jurors / 3r and the hand trace on all 40 runs"};
}

// ---------------------------------------------------------------------------
// Aggregation and debate simulations

Outcome criterion_aggregation_property() {
  Rng rng(20240501);
  constexpr int kSets = 20000;
  int violations = 0;
  for (int s = 0; s < kSets; ++s) {
    const int k1 = 1 + static_cast<int>(rng() % 8);
    const int k2 = 1 + static_cast<int>(rng() % 8);
    std::map<std::string, double, std::less<>> table;
    std::vector<std::string> side1, side2;
    double best1 = 0.0, best2 = 0.0;
    for (int j = 0; j < k1 + k2; ++j) {
      const std::string text = "defense " + std::to_string(s) + "/" + std::to_string(j);
      // Coarse grid so ties are common.
      const double v = static_cast<double>(rng() % 21) / 20.0;
      table[text] = v;
      (j < k1 ? side1 : side2).push_back(text);
      (j < k1 ? best1 : best2) = std::max(j < k1 ? best1 : best2, v);
    }
    const TableScorer scorer(table);
    const auto check = check_aggregation_property(side1, side2, scorer);
    const auto a1 = select_aggregate(side1, scorer);
    const auto a2 = select_aggregate(side2, scorer);
    if (!check.holds || scorer.score(a1.defense) < best1 || scorer.score(a2.defense) < best2) ++violations;
  }
  return {violations == 0, std::to_string(kSets) + " table-scorer defense sets, " + std::to_string(violations) +
                               " violations"};
}

Outcome criterion_differentiation() {
  DefenseGenerator gen;  // side 1 ~ U[0.5, 1], side 2 ~ U[0, 0.5]
  constexpr int k = 3;
  const auto s = simulate_differentiation(gen, k, 1000000, 42);
  // Order-statistics oracle: E[max of k U[lo, hi]] = lo + k (hi - lo) / (k + 1).
  const double e_multi = (0.5 + 0.5 * k / (k + 1.0)) - (0.0 + 0.5 * k / (k + 1.0));
  const double e_single = 0.75 - 0.25;
  const bool multi_ok = std::abs(s.mean_multi_gap - 0.75) <= 0.002;
  const bool single_ok = std::abs(s.mean_single_gap - 0.5) <= 0.002;
  const bool frac_ok = s.fraction_multi_gt_single >= 0.99;
  std::string detail = "mean multi_gap " + num(s.mean_multi_gap) + " (target 0.75, order-statistics value " +
                       num(e_multi) + "), mean single_gap " + num(s.mean_single_gap) + " (target 0.5, oracle " +
                       num(e_single) + "), P(multi > single) " + num(s.fraction_multi_gt_single) +
                       " (target >= 0.99)";
  return {multi_ok && single_ok && frac_ok, detail};
}

/// Iterative debate written out longhand: one draw per side per round,
/// best-so-far scores, gap recorded every round.
std::vector<double> iterative_debate(const ImprovementProcess& proc, std::uint64_t seed, double epsilon, int cap) {
  Rng rng(seed);
  auto draw = [&](const UniformRange& r) {
    return r.lo + (r.hi - r.lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  double b1 = 0.0, b2 = 0.0;
  std::vector<double> gaps;
  for (int r = 1; r <= cap; ++r) {
    b1 = std::max(b1, draw(proc.side1));
    b2 = std::max(b2, draw(proc.side2));
    gaps.push_back(std::abs(b1 - b2));
    if (gaps.back() >= 1.0 - epsilon) break;
  }
  return gaps;
}

Outcome criterion_iteration_complexity() {
  const ImprovementProcess proc;
  constexpr double eps = 0.15;
  constexpr std::uint64_t kSeeds = 1000;
  const auto k1 = complexity_sweep(eps, proc, 1, kSeeds, 0);
  const auto k5 = complexity_sweep(eps, proc, 5, kSeeds, 0);
  const bool dominance = k5.median_rounds <= k1.median_rounds;

  int mismatched = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    Rng rng(seed);
    const auto fp = first_passage(proc, 1, eps, rng, kDefaultRoundCap, true);
    const auto ref = iterative_debate(proc, seed, eps, kDefaultRoundCap);
    const auto m = measure_iteration_complexity(eps, proc, 1, seed);
    if (fp.gaps != ref || m.rounds_id != m.rounds_ma || m.reached_id != m.reached_ma) ++mismatched;
  }
  auto median = [](double m) { return std::isfinite(m) ? num(m) : std::string("unreachable"); };
  std::string detail = "median rounds k=5 " + median(k5.median_rounds) + " vs k=1 " + median(k1.median_rounds) +
                       " (reach fraction " + num(k5.reach_fraction, 3) + " / " + num(k1.reach_fraction, 3) +
                       "); k=1 trajectories identical to the iterative debate on " +
                       std::to_string(kSeeds - static_cast<std::uint64_t>(mismatched)) + "/" +
                       std::to_string(kSeeds) + " seeds";
  if (!std::isfinite(k1.median_rounds) && !std::isfinite(k5.median_rounds)) {
    detail += "; dominance holds only because both medians are unreachable";
  }
  return {dominance && mismatched == 0, detail};
}

Outcome criterion_gap_moments() {
  constexpr std::uint64_t kDraws = 100000;
  int cells = 0, failures = 0;
  double worst = 0.0;
  std::uint64_t cell = 0;
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    for (double b : {0.5, 1.0, 2.0, 5.0}) {
      for (int i : {0, 10, 50, 200}) {
        std::vector<int> ws = {0, i / 2, i};
        ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
        for (int w : ws) {
          Rng rng(derive_seed(99, cell++));
          const double pa = a + w, pb = b + i - w, n = a + b + i;
          double sum = 0.0, sum2 = 0.0;
          std::vector<double> xs(kDraws);
          for (auto& x : xs) {
            x = gap::sample_beta(pa, pb, rng);
            sum += x;
          }
          const double mean = sum / kDraws;
          for (double x : xs) sum2 += (x - mean) * (x - mean);
          const double var = sum2 / (kDraws - 1);
          double m4 = 0.0;
          for (double x : xs) m4 += std::pow(x - mean, 4);
          m4 /= kDraws;
          const double true_mean = pa / n;
          const double true_var = pa * pb / (n * n * (n + 1.0));
          const double se_mean = std::sqrt(true_var / kDraws);
          const double se_var = std::sqrt(std::max(m4 - var * var, 1e-300) / kDraws);
          const double z = std::max(std::abs(mean - true_mean) / se_mean, std::abs(var - true_var) / se_var);
          const bool closed_ok = std::abs(gap::gap_mean(a, b, i, w) - true_mean) <= 1e-15 &&
                                 std::abs(gap::gap_variance(a, b, i, w) - true_var) <= 1e-15;
          worst = std::max(worst, z);
          ++cells;
          if (z > 4.0 || !closed_ok) ++failures;
        }
      }
    }
  }
  return {failures == 0, std::to_string(cells) + " (alpha, beta, i, w) cells x 1e5 draws, worst deviation " +
                             num(worst, 3) + " SE, " + std::to_string(failures) + " outside 4 SE"};
}

Outcome criterion_convergence_bound() {
  constexpr std::uint64_t kSamples = 100000;
  const std::vector<int> iters = {10, 50, 200};
  int checks = 0, failed = 0, vacuous = 0, oracle_checks = 0, oracle_failed = 0;
  std::uint64_t cell = 0;
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    for (double b : {0.5, 1.0, 2.0, 5.0}) {
      const gap::Params p{a, b, gap::Deterministic{}, 200};
      for (double eps : {0.05, 0.1, 0.3}) {
        for (const auto& c : gap::verify_convergence(p, eps, iters, kSamples, derive_seed(7, cell++))) {
          ++checks;
          vacuous += c.vacuous ? 1 : 0;
          failed += c.pass ? 0 : 1;
          if (b == 1.0) {
            // Beta(n, 1) has CDF x^n, so P(X >= 1 - eps) = 1 - (1 - eps)^n.
            const double n = a + c.i;
            const double want = 1.0 - std::pow(1.0 - eps, n);
            const double se = std::sqrt(std::max(want * (1.0 - want), 1.0 / kSamples) / kSamples);
            ++oracle_checks;
            oracle_failed += std::abs(c.empirical_prob - want) > 4.0 * se ? 1 : 0;
          }
        }
      }
    }
  }
  return {failed == 0 && oracle_failed == 0,
          std::to_string(checks) + " grid checks (" + std::to_string(vacuous) + " vacuous), " +
              std::to_string(failed) + " failed; Beta(n,1) tail oracle " +
              std::to_string(oracle_checks - oracle_failed) + "/" + std::to_string(oracle_checks) + " within 4 SE"};
}

Outcome criterion_softmax() {
  Rng rng(5);
  int bad = 0;
  constexpr int kCases = 20000;
  for (int c = 0; c < kCases; ++c) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<double> x(n);
    for (auto& v : x) v = uniform(rng, -5.0, 5.0);
    const double tau = uniform(rng, 0.05, 5.0);
    const auto p = softmax(x, tau);
    double total = 0.0;
    for (double v : p) total += v;
    if (std::abs(total - 1.0) > 1e-12) ++bad;
    const double shift = uniform(rng, -100.0, 100.0);
    auto xs = x;
    for (auto& v : xs) v += shift;
    const auto ps = softmax(xs, tau);
    for (std::size_t i = 0; i < n; ++i) bad += std::abs(ps[i] - p[i]) > 1e-12 ? 1 : 0;
    if (argmax(p) != argmax(x)) ++bad;

    // One-hot limit: a maximum at least 0.2 above the rest leaves < e^-20 elsewhere.
    std::vector<double> y(n);
    for (auto& v : y) v = uniform(rng, 0.0, 0.8);
    const std::size_t top = rng() % n;
    y[top] = 1.0;
    const auto q = softmax(y, 0.01);
    for (std::size_t i = 0; i < n; ++i) bad += std::abs(q[i] - (i == top ? 1.0 : 0.0)) > 1e-8 ? 1 : 0;
  }
  return {bad == 0, std::to_string(kCases) + " random vectors: normalization, shift invariance, argmax, tau=0.01 "
                                              "one-hot; " + std::to_string(bad) + " violations"};
}

Outcome criterion_ttest() {
  const auto doc = Json::parse(testing::slurp(testing::fixture("ttest/cases.json")));
  double worst = 0.0;
  int n = 0;
  for (const auto& c : doc["cases"]) {
    const auto x = c["x"].get<std::vector<double>>();
    const auto y = c["y"].get<std::vector<double>>();
    const auto r = paired_t_test(x, y);
    const double t = testing::oracle_t(x, y);
    worst = std::max(worst, std::abs(r.p - testing::oracle_p(t, static_cast<int>(x.size()) - 1)));
    worst = std::max(worst, std::abs(r.t - t) / std::max(1.0, std::abs(t)));
    ++n;
  }
  const double p4 = student_t_two_sided_p(4.0, 4);
  const double o4 = testing::oracle_p(4.0, 4);
  const auto ex = paired_t_test({0.9, 0.8, 0.85, 0.95, 0.9}, {0.8, 0.75, 0.8, 0.85, 0.85});
  const bool ok = n == 20 && worst <= 1e-6 && std::abs(p4 - o4) <= 1e-6 && std::abs(p4 - 0.016) < 0.0005;
  return {ok, std::to_string(n) + " cases, max |p - oracle| " + num(worst, 3) + "; t=4.0 df=4 gives p=" + num(p4, 5) +
                  " (oracle " + num(o4, 5) + "); the worked-example data itself gives t=" + num(ex.t, 6) +
                  ", p=" + num(ex.p, 6)};
}

Outcome criterion_accuracy() {
  using W = Winner;
  bool ok = accuracy({W::Answer1, W::Answer2, W::Answer1, W::Answer1}, {Side::A, Side::A, Side::A, Side::A}) == 0.75;
  const auto c = load_conformance();
  const auto report = run_conformance(c, 3);
  const auto j = to_json(report);
  std::string detail = "[A,B,A,A] vs [A,A,A,A] = 0.75";
  for (const auto& p : j["protocols"]) {
    // Hand count from the trace.
    const auto& want = c.expected[p["name"].get<std::string>()];
    int hand = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto& w = want["winners"][i];
      const auto& l = c.expected["labels"][i];
      hand += (w == "Answer1" && l == "A") || (w == "Answer2" && l == "B") ? 1 : 0;
    }
    // Recount from the report's item records.
    int recount = 0, n = 0;
    for (const auto& it : p["items"]) {
      if (it["winner"].is_null()) continue;
      ++n;
      recount += it["match"].get<bool>() ? 1 : 0;
    }
    const double acc = p["accuracy"].get<double>();
    ok = ok && n == 10 && acc == hand / 10.0 && acc == static_cast<double>(recount) / n;
    detail += "; " + p["name"].get<std::string>() + " " + num(acc, 3);
  }
  return {ok, detail};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::slurp(e.path());
  }
  return files;
}

Outcome criterion_reproducibility() {
  const auto c = load_conformance();
  const auto a = testing::scratch_dir("acceptance_run_a");
  const auto b = testing::scratch_dir("acceptance_run_b");
  write_report(run_conformance(c, 1), a);
  write_report(run_conformance(c, 4), b);
  const auto ta = read_tree(a);
  const auto tb = read_tree(b);
  return {!ta.empty() && ta == tb, std::to_string(ta.size()) + " report and transcript files, " +
                                       (ta == tb ? "byte-identical" : "DIFFERENT")};
}

// ---------------------------------------------------------------------------
// Prompt fidelity against the templates as printed in the reference document.

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

/// Converts a printed template block to plain text: `\\` ends a line, `\_` is
/// an underscore, a leading `\textbackslash{}n` is a literal newline.
std::string convert_block(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (line == "\\textbackslash{}n") {
      out += "\n";
      continue;
    }
    if (line.size() >= 2 && line.compare(line.size() - 2, 2, "\\\\") == 0) {
      line.resize(line.size() - 2);
      if (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    } else {
      out += line;
      if (i + 1 < lines.size()) out += " ";
    }
  }
  out = replace_all(out, "\\_", "_");
  // The printed summarizer drops the braces around its slot.
  out = replace_all(out, "summarize:content", "summarize:{content}");
  return out;
}

std::map<std::string, std::string> reference_templates(const std::string& path) {
  static const std::map<std::string, std::string> kHeadings = {
      {"Judge Prompt", "more_judge"},
      {"Advocate Prompts", "more_advocate"},
      {"Summarizer Prompt", "summarizer"},
      {"Defend Answer Prompt", "samre_defend"},
      {"Aggregate Defense Prompt", "samre_aggregate"},
      {"Judge Answer Prompt", "samre_judge_feedback"},
      {"Score Answer Prompt", "samre_score"},
      {"Baseline Model Prompt", "baseline_judge"}};
  std::ifstream in(path);
  std::map<std::string, std::string> out;
  std::string line, heading;
  bool inside = false;
  std::vector<std::string> block;
  while (std::getline(in, line)) {
    if (!inside) {
      for (const std::string tag : {"\\subsubsection{", "\\subsection{"}) {
        if (line.rfind(tag, 0) == 0) heading = line.substr(tag.size(), line.find('}') - tag.size());
      }
      if (line == "\\texttt{" && kHeadings.contains(heading)) {
        inside = true;
        block.clear();
      }
    } else if (line == "}") {
      out[kHeadings.at(heading)] = convert_block(block);
      inside = false;
    } else {
      block.push_back(line);
    }
  }
  return out;
}

std::string substitute(std::string text, const SlotMap& slots) {
  for (const auto& [k, v] : slots) text = replace_all(text, "{" + k + "}", v);
  return text;
}

const CallRecord* find_call(const std::vector<CallRecord>& calls, Role role, const std::string& task, int round,
                            int side) {
  for (const auto& c : calls) {
    if (c.context.role == role && c.context.task == task && c.context.round == round && c.context.side == side) {
      return &c;
    }
  }
  return nullptr;
}

Outcome criterion_prompt_fidelity() {
  const auto refs = reference_templates(ADVOCATES_REFERENCE_DOC);
  if (refs.size() != 8) return {false, "found " + std::to_string(refs.size()) + "/8 templates in the reference"};
  std::vector<std::string> bad;

  // Template level: every slot filled with fixture text.
  const auto ds = load_dataset(testing::fixture("conformance/dataset.csv"), DatasetFormat::Csv);
  const auto& item = ds.items[6];  // quotes and a newline in the question
  const SlotMap all = {{"question", item.question},
                       {"answer", item.answer_a},
                       {"answer1", item.answer_a},
                       {"answer2", item.answer_b},
                       {"opponent_answer", item.answer_b},
                       {"feedback", "Cite a source."},
                       {"opponent_argument", "The other answer is vague."},
                       {"team_arguments", "First argument.\nSecond argument."},
                       {"advocate_id", "1"},
                       {"defenses", "Advocate 1: x\n\nAdvocate 2: y"},
                       {"defense1", "Defense one."},
                       {"defense2", "Defense two."},
                       {"current_round", "2"},
                       {"max_rounds", "4"},
                       {"total_rounds", "4"},
                       {"previous_scores", "(90, 80)"},
                       {"content", "Summarize me (95, 87)."}};
  for (const auto& [name, ref] : refs) {
    const auto& tpl = templates::by_name(name);
    SlotMap slots;
    for (const auto& s : tpl.required_slots) {
      if (all.contains(s)) slots[s] = all.at(s);
    }
    try {
      if (render_prompt(tpl, slots, true) != substitute(ref, slots)) bad.push_back(name + " differs");
    } catch (const Error& e) {
      bad.push_back(name + ": " + e.what());
    }
  }

  // Protocol level: the prompts actually sent during runs.
  std::vector<ScriptedBackend::Entry> entries;
  auto add = [&](Json j) {
    j["repeat"] = true;
    entries.push_back(ScriptedBackend::entry_from_json(j));
  };
  add({{"response", "D1"}, {"role", "advocate"}, {"side", 1}});
  add({{"response", "D2"}, {"role", "advocate"}, {"side", 2}});
  add({{"response", "AGG1"}, {"role", "aggregator"}, {"side", 1}});
  add({{"response", "AGG2"}, {"role", "aggregator"}, {"side", 2}});
  add({{"response", "SUM"}, {"role", "summarizer"}});
  add({{"response", "(9, 1)"}, {"role", "judge"}, {"task", "judge"}});
  add({{"response", "(9, 1) sharpen"}, {"role", "judge"}, {"task", "score"}, {"round", 1}});
  add({{"response", "(8, 2)"}, {"role", "judge"}, {"task", "score"}, {"round", 2}});
  add({{"response", "FB"}, {"role", "judge"}, {"task", "feedback"}});
  add({{"response", "(1, 0)"}, {"role", "juror"}});
  auto backend = std::make_shared<ScriptedBackend>(std::move(entries));

  auto more = ProtocolConfig::more(2);
  more.use_llm_aggregation = true;
  more.use_summarizer = true;
  auto samre = ProtocolConfig::samre();
  samre.use_llm_aggregation = true;
  samre.separate_feedback_call = true;
  CallLog log;
  for (const auto& cfg : {ProtocolConfig::baseline(), more, samre}) {
    run_protocol(item, make_panel(cfg, backend), cfg, &log);
  }
  const auto calls = log.snapshot();
  const std::string q = item.question, a = item.answer_a, b = item.answer_b;
  const std::string rounds = std::to_string(samre.max_rounds);
  struct Expect {
    std::string what;
    Role role;
    std::string task;
    int round;
    int side;
    std::string tpl;
    SlotMap slots;
  };
  const std::vector<Expect> expects = {
      {"baseline judge", Role::Judge, "judge", 1, 0, "baseline_judge", {{"question", q}, {"answer1", a}, {"answer2", b}}},
      {"MORE advocate", Role::Advocate, "defend", 1, 1, "more_advocate",
       {{"answer", a}, {"question", q}, {"opponent_answer", b}, {"feedback", ""}, {"opponent_argument", ""}}},
      {"MORE aggregator", Role::Aggregator, "aggregate", 1, 2, "samre_aggregate",
       {{"answer", b}, {"question", q}, {"opponent_answer", a}, {"defenses", "Advocate 1: D2\n\nAdvocate 2: D2"},
        {"feedback", ""}}},
      {"MORE summarizer", Role::Summarizer, "summarize", 1, 0, "summarizer", {{"content", "AGG1"}}},
      {"MORE judge", Role::Judge, "judge", 1, 0, "more_judge",
       {{"question", q}, {"answer1", a}, {"answer2", b}, {"current_round", "1"}, {"max_rounds", "1"},
        {"previous_scores", "None"}, {"defense1", "SUM"}, {"defense2", "SUM"}}},
      {"SAMRE advocate round 2", Role::Advocate, "defend", 2, 2, "samre_defend",
       {{"advocate_id", "1"}, {"answer", b}, {"question", q}, {"opponent_answer", a}, {"feedback", "FB"},
        {"opponent_argument", "AGG1"}, {"team_arguments", "AGG2"}}},
      {"SAMRE aggregator round 2", Role::Aggregator, "aggregate", 2, 1, "samre_aggregate",
       {{"answer", a}, {"question", q}, {"opponent_answer", b}, {"defenses", "Advocate 1: AGG1\n\nAdvocate 2: D1"},
        {"feedback", "FB"}}},
      {"SAMRE score round 2", Role::Judge, "score", 2, 0, "samre_score",
       {{"question", q}, {"answer1", a}, {"answer2", b}, {"total_rounds", rounds}, {"previous_scores", "(9, 1)"},
        {"defense1", "AGG1"}, {"defense2", "AGG2"}}},
      {"SAMRE feedback round 1", Role::Judge, "feedback", 1, 0, "samre_judge_feedback",
       {{"question", q}, {"answer1", a}, {"answer2", b}, {"current_round", "1"}, {"total_rounds", rounds},
        {"previous_scores", "None"}, {"defense1", "AGG1"}, {"defense2", "AGG2"}}},
  };
  int checked = 0;
  for (const auto& e : expects) {
    // The baseline and MORE judges share role and task; the first such call is the baseline's.
    const CallRecord* call = nullptr;
    if (e.what == "MORE judge") {
      for (const auto& c : calls) {
        if (c.context.protocol == "MORE" && c.context.task == "judge") call = &c;
      }
    } else {
      call = find_call(calls, e.role, e.task, e.round, e.side);
    }
    if (!call) {
      bad.push_back(e.what + ": no call logged");
      continue;
    }
    ++checked;
    if (call->prompt != substitute(refs.at(e.tpl), e.slots)) bad.push_back(e.what + " prompt differs");
  }
  if (!bad.empty()) return {false, bad.front() + (bad.size() > 1 ? " (+" + std::to_string(bad.size() - 1) + " more)" : "")};
  return {true, "8 reference templates match after substitution; " + std::to_string(checked) +
                    " prompts sent by protocol runs match whitespace-exactly"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"protocol conformance", criterion_conformance},
      {"call-budget accounting", criterion_call_budget},
      {"aggregation property", criterion_aggregation_property},
      {"score differentiation", criterion_differentiation},
      {"iteration complexity", criterion_iteration_complexity},
      {"gap-model moments", criterion_gap_moments},
      {"convergence bound", criterion_convergence_bound},
      {"softmax", criterion_softmax},
      {"paired t-test oracle", criterion_ttest},
      {"accuracy identity", criterion_accuracy},
      {"reproducibility", criterion_reproducibility},
      {"prompt fidelity", criterion_prompt_fidelity},
  };
  // Runtime limits in seconds, where one applies.
  const std::map<int, double> limits = {{1, 5.0}, {4, 30.0}, {7, 60.0}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (const auto it = limits.find(id); it != limits.end() && secs > it->second) {
      o.pass = false;
      o.detail += "; over the " + num(it->second) + " s limit";
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << std::setw(2) << id << " " << criteria[i].first << " ("
              << std::fixed << std::setprecision(2) << secs << " s): " << o.detail << std::endl;
    std::cout.unsetf(std::ios::fixed);
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
