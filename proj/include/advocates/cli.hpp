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
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advocates/aggregation.hpp"
#include "advocates/config.hpp"
#include "advocates/gap_model.hpp"
#include "advocates/harness.hpp"
#include "advocates/live_backend.hpp"

namespace advocates::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::InvalidParameter, "range '" + text + "' must be lo,hi");
  return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

inline std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

inline std::string budget_text(const config::RunConfig& c, std::size_t items) {
  std::ostringstream out;
  std::size_t total = 0;
  out << "planned agent-call budget (upper bound, no repair retries) for " << items << " items:\n";
  for (const auto& p : c.protocols) {
    const auto per_item = static_cast<std::size_t>(p.max_calls());
    total += per_item * items;
    out << "  " << std::left << std::setw(14) << to_string(p.label()) << per_item << " calls/item, "
        << per_item * items << " total\n";
  }
  out << "  total " << total << "\n";
  return out.str();
}

}  // namespace detail

struct EvalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool dry_run = false;
  bool lenient = false;
  std::string format = "table";
};

/// Runs the benchmark described by a config file. Exit 0 on success, 1 when
/// the batch aborts, 2 on config or input errors.
inline int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  config::RunConfig cfg;
  Dataset dataset;
  std::shared_ptr<Backend> backend;
  try {
    auto overrides = opt.overrides;
    if (!opt.out_dir.empty()) overrides.push_back("run.out_dir=\"" + opt.out_dir + "\"");
    cfg = config::load(opt.config_path, overrides, !opt.lenient);
    dataset = load_dataset(cfg.dataset_path, cfg.dataset_format);
    if (opt.dry_run) {
      out << "config OK: " << opt.config_path << "\n" << detail::budget_text(cfg, dataset.items.size());
      return kExitOk;
    }
    if (cfg.backend == "scripted") {
      backend = ScriptedBackend::from_jsonl(cfg.script_path);
    } else {
      backend = std::make_shared<LiveBackend>(cfg.live);
    }
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  }

  Sampling sampling = cfg.sampling;
  if (cfg.backend == "live") sampling.seed = cfg.seed;
  BenchmarkOptions bopt;
  bopt.workers = cfg.workers;
  bopt.seed = cfg.seed;
  bopt.abort_fraction = cfg.abort_fraction;
  bopt.config_hash = config::config_hash(cfg);
  if (cfg.timestamps) bopt.started_at = detail::utc_now();

  try {
    const auto report = run_benchmark(
        dataset, cfg.protocols,
        [&](const ProtocolConfig& p) { return make_panel(p, backend, sampling); }, bopt);
    write_report(report, cfg.out_dir);
    if (opt.format == "json") {
      out << to_json(report).dump(2) << "\n";
    } else {
      out << summary_table(report);
      out << "report written to " << cfg.out_dir << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "evaluation failed: " << e.what() << "\n";
    return e.kind() == ErrorKind::BatchAborted ? kExitRuntime : kExitUsage;
  }
}

inline int cmd_validate_config(const std::string& path, const std::vector<std::string>& overrides,
                               bool lenient, std::ostream& out, std::ostream& err) {
  EvalOptions opt;
  opt.config_path = path;
  opt.overrides = overrides;
  opt.dry_run = true;
  opt.lenient = lenient;
  const int rc = cmd_eval(opt, out, err);
  if (rc != kExitOk) return rc;
  try {
    const auto cfg = config::load(path, overrides, !lenient);
    if (cfg.backend == "scripted" && !std::filesystem::exists(cfg.script_path)) {
      err << "config error: script file not found: " << cfg.script_path << "\n";
      return kExitUsage;
    }
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

struct SimulateOptions {
  std::string subject;
  int k = 3;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 0;
  std::string side1;
  std::string side2;
  double epsilon = 0.15;
  std::vector<int> ks = {1, 5};
  std::uint64_t seeds = 1000;
  int cap = kDefaultRoundCap;
  unsigned workers = 0;
  std::string format = "json";
  std::string out_dir;
  bool dry_run = false;
};

inline Json to_json(const DifferentiationStats& s, int k, const DefenseGenerator& g) {
  return Json{{"subject", "differentiation"},
              {"k", k},
              {"side1", {g.side1.lo, g.side1.hi}},
              {"side2", {g.side2.lo, g.side2.hi}},
              {"trials", s.trials},
              {"conditioned_trials", s.conditioned},
              {"mean_single_gap", s.mean_single_gap},
              {"mean_multi_gap", s.mean_multi_gap},
              {"expected_single_gap", g.side1.expected_max(1) - g.side2.expected_max(1)},
              {"expected_multi_gap", g.side1.expected_max(k) - g.side2.expected_max(k)},
              {"fraction_multi_gt_single", s.fraction_multi_gt_single},
              {"fraction_multi_ge_single", s.fraction_multi_ge_single},
              {"mean_amplification", s.mean_amplification}};
}

/// Differentiation and iteration-complexity simulations on synthetic scorers. Exit 2 on out-of-range params.
inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  std::string body;
  std::string file;
  try {
    if (opt.format != "json" && opt.format != "csv") {
      throw Error(ErrorKind::InvalidParameter, "--format must be json or csv");
    }
    if (opt.subject == "differentiation") {
      DefenseGenerator gen;
      if (!opt.side1.empty()) std::tie(gen.side1.lo, gen.side1.hi) = detail::parse_range(opt.side1);
      if (!opt.side2.empty()) std::tie(gen.side2.lo, gen.side2.hi) = detail::parse_range(opt.side2);
      gen.side1.validate();
      gen.side2.validate();
      if (opt.k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1");
      if (opt.trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
      if (opt.dry_run) {
        out << "differentiation: k=" << opt.k << " trials=" << opt.trials << " seed=" << opt.seed
            << "; 0 agent calls\n";
        return kExitOk;
      }
      const auto s = simulate_differentiation(gen, opt.k, opt.trials, opt.seed, opt.workers);
      const auto j = to_json(s, opt.k, gen);
      if (opt.format == "json") {
        body = j.dump(2) + "\n";
      } else {
        body = "k,trials,conditioned_trials,mean_single_gap,mean_multi_gap,fraction_multi_gt_single,"
               "mean_amplification\n" +
               std::to_string(opt.k) + "," + std::to_string(s.trials) + "," + std::to_string(s.conditioned) +
               "," + detail::fmt(s.mean_single_gap) + "," + detail::fmt(s.mean_multi_gap) + "," +
               detail::fmt(s.fraction_multi_gt_single) + "," + detail::fmt(s.mean_amplification) + "\n";
      }
      file = "differentiation." + opt.format;
    } else if (opt.subject == "complexity") {
      validate_epsilon(opt.epsilon);
      ImprovementProcess proc;
      if (!opt.side1.empty()) std::tie(proc.side1.lo, proc.side1.hi) = detail::parse_range(opt.side1);
      if (!opt.side2.empty()) std::tie(proc.side2.lo, proc.side2.hi) = detail::parse_range(opt.side2);
      proc.side1.validate();
      proc.side2.validate();
      if (opt.ks.empty()) throw Error(ErrorKind::InvalidParameter, "--ks needs at least one k");
      for (int k : opt.ks) {
        if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1");
      }
      if (opt.seeds < 1 || opt.cap < 1) throw Error(ErrorKind::InvalidParameter, "seeds and cap must be >= 1");
      if (opt.dry_run) {
        out << "complexity: epsilon=" << opt.epsilon << " ks=" << opt.ks.size() << " seeds=" << opt.seeds
            << " cap=" << opt.cap << "; 0 agent calls\n";
        return kExitOk;
      }
      Json j{{"subject", "complexity"}, {"epsilon", opt.epsilon}, {"seeds", opt.seeds},
             {"base_seed", opt.seed},   {"round_cap", opt.cap},   {"results", Json::array()}};
      body = "k,seeds,median_rounds,reach_fraction\n";
      for (int k : opt.ks) {
        const auto s = complexity_sweep(opt.epsilon, proc, k, opt.seeds, opt.seed, opt.cap, opt.workers);
        const bool reached = std::isfinite(s.median_rounds);
        j["results"].push_back(Json{{"k", k},
                                    {"median_rounds", reached ? Json(s.median_rounds) : Json("unreachable")},
                                    {"reach_fraction", s.reach_fraction}});
        body += std::to_string(k) + "," + std::to_string(opt.seeds) + "," +
                (reached ? detail::fmt(s.median_rounds) : std::string("unreachable")) + "," +
                detail::fmt(s.reach_fraction) + "\n";
      }
      if (opt.format == "json") body = j.dump(2) + "\n";
      file = "complexity." + opt.format;
    } else {
      throw Error(ErrorKind::InvalidParameter, "subject must be differentiation or complexity");
    }
  } catch (const Error& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitUsage;
  }
  out << body;
  if (!opt.out_dir.empty()) detail::write_file(std::filesystem::path(opt.out_dir) / file, body);
  return kExitOk;
}

struct GapOptions {
  std::vector<double> alphas = {1.0};
  std::vector<double> betas = {1.0};
  std::vector<double> epsilons = {0.1};
  std::vector<int> iterations = {10, 50, 200};
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string success = "deterministic";
  bool grid = false;
  unsigned workers = 0;
  std::string format = "csv";
  std::string out_dir;
  bool dry_run = false;
};

inline gap::SuccessProcess parse_success(const std::string& text) {
  if (text == "deterministic") return gap::Deterministic{};
  if (text.rfind("bernoulli:", 0) == 0) return gap::Bernoulli{std::stod(text.substr(10))};
  throw Error(ErrorKind::InvalidParameter, "success must be deterministic or bernoulli:<p>");
}

/// Convergence checks over the (alpha, beta, epsilon, i) grid. Exit 0 iff
/// every non-vacuous check passes.
inline int cmd_gap(GapOptions opt, std::ostream& out, std::ostream& err) {
  if (opt.grid) {
    opt.alphas = opt.betas = {0.5, 1.0, 2.0, 5.0};
    opt.iterations = {10, 50, 200};
    opt.epsilons = {0.05, 0.1, 0.3};
  }
  std::vector<std::pair<gap::Params, std::vector<gap::ConvergenceCheck>>> results;
  try {
    if (opt.format != "json" && opt.format != "csv") {
      throw Error(ErrorKind::InvalidParameter, "--format must be json or csv");
    }
    const auto success = parse_success(opt.success);
    std::vector<gap::Params> params;
    for (double a : opt.alphas) {
      for (double b : opt.betas) {
        gap::Params p{a, b, success, 1};
        for (int i : opt.iterations) p.horizon = std::max(p.horizon, i);
        p.validate();
        params.push_back(p);
      }
    }
    for (double eps : opt.epsilons) {
      if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::NonpositiveEpsilon, "epsilon must lie in (0, 1)");
    }
    if (opt.samples < 1) throw Error(ErrorKind::InvalidParameter, "samples must be >= 1");
    if (opt.dry_run) {
      out << "gap: " << params.size() * opt.epsilons.size() * opt.iterations.size() << " checks x "
          << opt.samples << " samples; 0 agent calls\n";
      return kExitOk;
    }
    std::uint64_t cell = 0;
    for (const auto& p : params) {
      for (double eps : opt.epsilons) {
        results.emplace_back(p, gap::verify_convergence(p, eps, opt.iterations, opt.samples,
                                                        derive_seed(opt.seed, cell++), opt.workers));
      }
    }
  } catch (const Error& e) {
    err << "gap: " << e.what() << "\n";
    return kExitUsage;
  }

  bool ok = true;
  std::string body;
  Json j = Json::array();
  if (opt.format == "csv") body = "alpha,beta,epsilon,i,w_i,mean,variance,bound,vacuous,empirical_prob,pass\n";
  for (const auto& [p, checks] : results) {
    for (const auto& c : checks) {
      ok = ok && (c.vacuous || c.pass);
      if (opt.format == "csv") {
        body += detail::fmt(p.alpha) + "," + detail::fmt(p.beta) + "," + detail::fmt(c.epsilon) + "," +
                std::to_string(c.i) + "," + std::to_string(c.w) + "," + detail::fmt(c.mean) + "," +
                detail::fmt(c.variance) + "," + detail::fmt(c.bound) + "," + (c.vacuous ? "1" : "0") + "," +
                detail::fmt(c.empirical_prob) + "," + (c.pass ? "1" : "0") + "\n";
      } else {
        j.push_back(Json{{"alpha", p.alpha}, {"beta", p.beta}, {"epsilon", c.epsilon}, {"i", c.i},
                         {"w_i", c.w}, {"mean", c.mean}, {"variance", c.variance}, {"bound", c.bound},
                         {"vacuous", c.vacuous}, {"empirical_prob", c.empirical_prob},
                         {"sample_count", c.sample_count}, {"margin", c.margin}, {"pass", c.pass}});
      }
    }
  }
  if (opt.format == "json") body = j.dump(2) + "\n";
  out << body;
  if (!opt.out_dir.empty()) detail::write_file(std::filesystem::path(opt.out_dir) / ("gap." + opt.format), body);
  if (!ok) err << "gap: at least one non-vacuous bound check failed\n";
  return ok ? kExitOk : kExitRuntime;
}

/// Entry point shared by the executable and the CLI tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Debate-based pairwise answer evaluation and model verification"};
  app.require_subcommand(1);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "run protocols over a dataset");
  eval_cmd->add_option("-c,--config", eval.config_path, "config file")->required();
  eval_cmd->add_option("--set", eval.overrides, "override: section.key=value");
  eval_cmd->add_option("--out-dir", eval.out_dir, "output directory");
  eval_cmd->add_option("--format", eval.format, "stdout: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  eval_cmd->add_flag("--dry-run", eval.dry_run, "validate and print the call budget");
  eval_cmd->add_flag("--lenient", eval.lenient, "ignore unknown config keys");

  std::string validate_path;
  std::vector<std::string> validate_overrides;
  bool validate_lenient = false;
  auto* validate_cmd = app.add_subcommand("validate-config", "check a config file");
  validate_cmd->add_option("-c,--config", validate_path, "config file")->required();
  validate_cmd->add_option("--set", validate_overrides, "override: section.key=value");
  validate_cmd->add_flag("--lenient", validate_lenient, "ignore unknown config keys");
  validate_cmd->add_flag("--dry-run", "accepted for uniformity; validation never calls agents");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "score-differentiation / iteration-complexity simulations");
  sim_cmd->add_option("subject", sim.subject, "differentiation or complexity")->required();
  sim_cmd->add_option("--k", sim.k, "advocates per side (differentiation)");
  sim_cmd->add_option("--trials", sim.trials, "Monte Carlo trials (differentiation)");
  sim_cmd->add_option("--seed", sim.seed, "seed (complexity: first of the seed range)");
  sim_cmd->add_option("--side1", sim.side1, "side-1 uniform range lo,hi");
  sim_cmd->add_option("--side2", sim.side2, "side-2 uniform range lo,hi");
  sim_cmd->add_option("--epsilon", sim.epsilon, "tolerance (complexity)");
  sim_cmd->add_option("--ks", sim.ks, "advocate counts to compare (complexity)")->delimiter(',');
  sim_cmd->add_option("--seeds", sim.seeds, "number of matched seeds (complexity)");
  sim_cmd->add_option("--cap", sim.cap, "round cap (complexity)");
  sim_cmd->add_option("--workers", sim.workers, "threads (0 = all cores)");
  sim_cmd->add_option("--format", sim.format, "json or csv");
  sim_cmd->add_option("--out-dir", sim.out_dir, "also write the report here");
  sim_cmd->add_flag("--dry-run", sim.dry_run, "validate parameters only");

  GapOptions gapo;
  auto* gap_cmd = app.add_subcommand("gap", "Beta gap-model convergence checks");
  gap_cmd->add_option("--alpha", gapo.alphas, "alpha values")->delimiter(',');
  gap_cmd->add_option("--beta", gapo.betas, "beta values")->delimiter(',');
  gap_cmd->add_option("--epsilon", gapo.epsilons, "tolerances")->delimiter(',');
  gap_cmd->add_option("--iterations", gapo.iterations, "iterations i")->delimiter(',');
  gap_cmd->add_option("--samples", gapo.samples, "Beta draws per check");
  gap_cmd->add_option("--seed", gapo.seed, "seed");
  gap_cmd->add_option("--success", gapo.success, "deterministic or bernoulli:<p>");
  gap_cmd->add_flag("--grid", gapo.grid, "full alpha/beta/i/epsilon verification grid");
  gap_cmd->add_option("--workers", gapo.workers, "threads (0 = all cores)");
  gap_cmd->add_option("--format", gapo.format, "csv or json");
  gap_cmd->add_option("--out-dir", gapo.out_dir, "also write the table here");
  gap_cmd->add_flag("--dry-run", gapo.dry_run, "validate parameters only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (*eval_cmd) return cmd_eval(eval, out, err);
  if (*validate_cmd) return cmd_validate_config(validate_path, validate_overrides, validate_lenient, out, err);
  if (*sim_cmd) return cmd_simulate(sim, out, err);
  if (*gap_cmd) return cmd_gap(gapo, out, err);
  return kExitUsage;
}

}  // namespace advocates::cli
