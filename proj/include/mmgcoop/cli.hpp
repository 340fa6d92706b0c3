// Copyright 2026 The mmgcoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The `mmgcoop` command line. Kept in a header so tests can drive it
// in-process; tools/mmgcoop_main.cpp only forwards argv.
//
// Exit codes: 0 success, 1 internal error, 2 usage/parse/validation error,
// 3 infeasible or unbounded, 4 solver limit reached.

#ifndef MMGCOOP_CLI_HPP
#define MMGCOOP_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmgcoop/mmgcoop.hpp"

#ifndef MMGCOOP_DEFAULT_SCENARIO_DIR
#define MMGCOOP_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace mmgcoop::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInvalid = 2,
  kInfeasible = 3,
  kLimit = 4,
};

inline constexpr const char* kOutDirEnv = "MMGCOOP_OUT_DIR";

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

struct GlobalOptions {
  std::optional<double> risk_weight;
  std::optional<bool> worst_case;
  std::optional<std::string> pricing_mode;
  bool paper_literal_risk = false;
  bool no_dr_objective_term = false;
  bool terminal_soc = false;
  std::optional<double> gap;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool verbose = false;
  int threads = 0;
  double time_limit = 0.0;
  long node_limit = 0;
  std::string branching = "most-fractional";
};

// A bundled name ("paper3mg"), a file path, or "synthetic:<n>".
inline Scenario resolve_scenario(const std::string& spec, std::uint64_t seed) {
  if (spec.rfind("synthetic:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(spec.substr(10));
    } catch (const std::exception&) {
      throw CliError(kInvalid, "bad synthetic scenario '" + spec + "'");
    }
    if (n < 1 || n > kMaxPlayers) throw CliError(kInvalid, "synthetic size must be in [1, 20]");
    return synthetic_scenario(n, seed);
  }
  std::filesystem::path p(spec);
  if (!std::filesystem::exists(p)) {
    const std::filesystem::path bundled =
        std::filesystem::path(MMGCOOP_DEFAULT_SCENARIO_DIR) / (spec + ".json");
    if (std::filesystem::exists(bundled)) p = bundled;
  }
  if (!std::filesystem::exists(p)) throw CliError(kInvalid, "scenario not found: " + spec);
  return load_scenario(p);
}

inline Scenario apply_overrides(Scenario s, const GlobalOptions& g) {
  if (g.risk_weight) s.risk_weight = *g.risk_weight;
  if (g.worst_case) s.options.worst_case_enabled = *g.worst_case;
  if (g.pricing_mode) {
    if (*g.pricing_mode == "block") {
      s.options.cdg_pricing = CdgPricing::block;
    } else if (*g.pricing_mode == "all_units" || *g.pricing_mode == "all-units") {
      s.options.cdg_pricing = CdgPricing::all_units;
    } else {
      throw CliError(kInvalid, "unknown pricing mode '" + *g.pricing_mode + "'");
    }
  }
  if (g.paper_literal_risk) s.options.paper_literal_risk = true;
  if (g.no_dr_objective_term) s.options.dr_objective_term_enabled = false;
  if (g.terminal_soc) s.options.terminal_soc = true;
  validate(s);
  return s;
}

inline SolverConfig solver_config(const GlobalOptions& g, std::ostream& err) {
  SolverConfig cfg;
  if (g.gap) cfg.mip_gap_rel = *g.gap;
  cfg.time_limit_seconds = g.time_limit;
  if (g.node_limit > 0) cfg.node_limit = g.node_limit;
  if (g.branching == "pseudo-cost") {
    cfg.branching = BranchingRule::pseudo_cost;
  } else if (g.branching != "most-fractional") {
    throw CliError(kInvalid, "unknown branching rule '" + g.branching + "'");
  }
  if (g.verbose) cfg.node_log = &err;
  if (!(cfg.mip_gap_rel > 0.0)) throw CliError(kInvalid, "--gap must be positive");
  return cfg;
}

// "all", or a comma-separated list of 1-based indices and/or names.
inline Coalition parse_coalition(const std::string& spec, const Scenario& s) {
  if (spec.empty() || spec == "all") return Coalition::all(s.num_players());
  std::uint32_t mask = 0;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int k = -1;
    for (std::size_t i = 0; i < s.microgrids.size(); ++i) {
      if (s.microgrids[i].name == tok) k = static_cast<int>(i);
    }
    if (k < 0) {
      try {
        std::size_t used = 0;
        k = std::stoi(tok, &used) - 1;
        if (used != tok.size()) k = -1;
      } catch (const std::exception&) {
        k = -1;
      }
    }
    if (k < 0 || static_cast<std::size_t>(k) >= s.num_players()) {
      throw CliError(kInvalid, "unknown coalition member '" + tok + "'");
    }
    mask |= std::uint32_t{1} << k;
  }
  if (!mask) throw CliError(kInvalid, "empty coalition");
  return Coalition::from_mask(mask);
}

inline std::filesystem::path output_dir(const GlobalOptions& g) {
  if (!g.out_dir.empty()) return g.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "mmgcoop-out";
}

inline RunManifest base_manifest(const std::string& sub, const std::string& scenario,
                                 const GlobalOptions& g, const std::filesystem::path& dir) {
  RunManifest m;
  m.subcommand = sub;
  m.scenario = scenario;
  m.output_directory = dir.generic_string();
  m.seed = g.seed;
  auto add = [&](const char* k, const std::string& v) { m.overrides.emplace_back(k, v); };
  if (g.risk_weight) add("risk_weight", format_number(*g.risk_weight));
  if (g.worst_case) add("worst_case", *g.worst_case ? "true" : "false");
  if (g.pricing_mode) add("pricing_mode", *g.pricing_mode);
  if (g.paper_literal_risk) add("paper_literal_risk", "true");
  if (g.no_dr_objective_term) add("dr_objective_term", "false");
  if (g.terminal_soc) add("terminal_soc", "true");
  if (g.gap) add("gap", format_number(*g.gap));
  if (g.branching != "most-fractional") add("branching", g.branching);
  if (g.node_limit > 0) add("node_limit", std::to_string(g.node_limit));
  if (g.time_limit > 0) add("time_limit", format_number(g.time_limit));
  return m;
}

inline void finish_manifest(RunManifest m, const std::filesystem::path& dir) {
  m.files.push_back("manifest.json");
  write_text_file(dir / "manifest.json", manifest_json(m).dump(2) + "\n");
}

inline int status_exit(MipStatus st) {
  switch (st) {
    case MipStatus::optimal: return kOk;
    case MipStatus::feasible:
    case MipStatus::limit: return kLimit;
    case MipStatus::infeasible:
    case MipStatus::unbounded: return kInfeasible;
  }
  return kInternal;
}

inline SolveResult solve_for_cli(const Scenario& s, const Coalition& c, const SolverConfig& cfg,
                                 std::ostream& err) {
  SolveResult r = solve_coalition(s, c, cfg);
  if (!r.incumbent) {
    throw CliError(status_exit(r.status), std::string("solve failed: ") + to_string(r.status));
  }
  if (r.status != MipStatus::optimal) {
    err << "warning: stopped at a limit, gap " << format_number(r.gap) << "\n";
  }
  return r;
}

inline int cmd_solve(const GlobalOptions& g, const std::string& scenario_spec,
                     const std::string& coalition_spec, std::ostream& out, std::ostream& err) {
  const Scenario s = apply_overrides(resolve_scenario(scenario_spec, g.seed), g);
  const Coalition c = parse_coalition(coalition_spec, s);
  const SolveResult r = solve_for_cli(s, c, solver_config(g, err), err);
  const auto dir = output_dir(g);
  RunManifest m = base_manifest("solve", scenario_spec, g, dir);
  m.overrides.emplace_back("coalition", coalition_spec.empty() ? "all" : coalition_spec);
  m.files = write_tables(dir, schedule_tables(*r.incumbent, &r));
  finish_manifest(m, dir);
  const auto& b = r.incumbent->breakdown;
  out << "status " << to_string(r.status) << "\n"
      << "objective " << format_number(r.incumbent->objective_total) << "\n"
      << "cdg_cost " << format_number(b.cdg_cost) << "\n"
      << "grid_buy_cost " << format_number(b.grid_buy_cost) << "\n"
      << "grid_sell_revenue " << format_number(b.grid_sell_revenue) << "\n"
      << "dr_term " << format_number(b.dr_term) << "\n"
      << "risk_term " << format_number(b.risk_term) << "\n"
      << "outputs " << dir.generic_string() << "\n";
  return status_exit(r.status);
}

inline void print_allocation(const AllocationReport& r, std::ostream& out) {
  out << "microgrid,shapley,isolated,savings_pct\n";
  for (int k = 0; k < r.table.n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out << r.table.player(k) << "," << format_number(r.shapley[uk]) << ","
        << format_number(r.isolated[uk]) << ","
        << (r.savings_pct[uk] ? format_number(*r.savings_pct[uk]) : "") << "\n";
  }
  out << "grand_cost " << format_number(r.grand_cost) << "\n";
  if (r.grand_savings_pct) out << "grand_savings_pct " << format_number(*r.grand_savings_pct) << "\n";
  out << "subadditivity_violations " << r.subadditivity_violations.size() << "\n";
}

inline int cmd_allocate(const GlobalOptions& g, const std::string& scenario_spec,
                        const std::string& table_file, std::ostream& out, std::ostream& err) {
  AllocationReport rep;
  std::string source;
  if (!table_file.empty()) {
    try {
      rep = shapley(read_value_table(read_csv_file(table_file)));
    } catch (const std::invalid_argument& e) {
      throw CliError(kInvalid, e.what());
    }
    source = table_file;
  } else {
    if (scenario_spec.empty()) throw CliError(kInvalid, "allocate needs a scenario or --table-file");
    const Scenario s = apply_overrides(resolve_scenario(scenario_spec, g.seed), g);
    EvaluateOptions eo;
    eo.threads = g.threads;
    eo.warnings = &err;
    try {
      rep = compare_modes(s, solver_config(g, err), eo);
    } catch (const CoalitionSolveError& e) {
      throw CliError(status_exit(e.status()), e.what());
    }
    source = scenario_spec;
  }
  const auto dir = output_dir(g);
  RunManifest m = base_manifest("allocate", source, g, dir);
  m.files = write_tables(dir, {{"value_table.csv", value_table_csv(rep.table)},
                               {"allocation.csv", allocation_csv(rep)}});
  write_text_file(dir / "allocation.json", allocation_json(rep).dump(2) + "\n");
  m.files.push_back("allocation.json");
  finish_manifest(m, dir);
  print_allocation(rep, out);
  int code = kOk;
  for (MipStatus st : rep.table.status) code = std::max(code, status_exit(st));
  return code;
}

inline int cmd_estimate_cov(const GlobalOptions& g, const std::string& history, double alpha,
                            std::ostream& out) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw CliError(kInvalid, "--alpha must lie in [0, 1]");
  const PriceHistory h = history_from_table(read_csv_file(history), alpha);
  const CovarianceEstimate v = estimate_covariance(h);
  const auto dir = output_dir(g);
  RunManifest m = base_manifest("estimate-cov", history, g, dir);
  m.overrides.emplace_back("alpha", format_number(alpha));
  m.files = write_tables(dir, {{"covariance.csv", covariance_csv(v)}});
  finish_manifest(m, dir);
  out << "days " << v.days_used << "\n"
      << "positive_definite " << (v.positive_definite ? "yes" : "no") << "\n"
      << "smallest_pivot " << format_number(v.smallest_pivot) << "\n";
  if (v.days_used < v.dimension()) {
    out << "note: fewer days than periods, the estimate cannot be positive definite\n";
  }
  return kOk;
}

inline int cmd_load_factor(const GlobalOptions& g, const std::string& scenario_spec,
                           const std::string& coalition_spec, std::ostream& out,
                           std::ostream& err) {
  const Scenario s = apply_overrides(resolve_scenario(scenario_spec, g.seed), g);
  const Coalition c = parse_coalition(coalition_spec, s);
  const SolveResult r = solve_for_cli(s, c, solver_config(g, err), err);
  const auto rows = load_factors(*r.incumbent);
  const auto dir = output_dir(g);
  RunManifest m = base_manifest("load-factor", scenario_spec, g, dir);
  m.overrides.emplace_back("coalition", coalition_spec.empty() ? "all" : coalition_spec);
  m.files = write_tables(dir, {{"load_factor.csv", load_factor_table(rows)}});
  finish_manifest(m, dir);
  write_csv(out, load_factor_table(rows));
  return status_exit(r.status);
}

inline int cmd_dump_model(const GlobalOptions& g, const std::string& scenario_spec,
                          const std::string& coalition_spec, const std::string& file,
                          std::ostream& out) {
  const Scenario s = apply_overrides(resolve_scenario(scenario_spec, g.seed), g);
  const Coalition c = parse_coalition(coalition_spec, s);
  const OptimizationModel model = build_model(s, c);
  const auto dir = output_dir(g);
  std::filesystem::path target = file.empty() ? dir / "model.mps" : std::filesystem::path(file);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  write_mps_file(target, model);
  if (file.empty()) {
    RunManifest m = base_manifest("dump-model", scenario_spec, g, dir);
    m.overrides.emplace_back("coalition", coalition_spec.empty() ? "all" : coalition_spec);
    m.files.push_back("model.mps");
    finish_manifest(m, dir);
  }
  out << "columns " << model.num_cols() << "\nrows " << model.num_rows() << "\nintegers "
      << model.mip.integer_cols.size() << "\nwritten " << target.generic_string() << "\n";
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Cooperative day-ahead scheduling and Shapley cost allocation for microgrids",
               "mmgcoop"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  GlobalOptions g;
  double risk = 0.0;
  std::string pricing;
  double gap = 0.0;
  bool worst = false;
  bool no_worst = false;
  auto* risk_opt = app.add_option("--risk-weight", risk, "Risk weight r (>= 0)")
                       ->check(CLI::NonNegativeNumber);
  app.add_flag("--worst-case", worst, "Schedule against load upper / PV lower bounds");
  app.add_flag("--no-worst-case", no_worst, "Use forecast load and PV");
  auto* pricing_opt = app.add_option("--pricing-mode", pricing, "CDG pricing: block | all_units");
  app.add_flag("--paper-literal-risk", g.paper_literal_risk,
               "Pair sell-price covariance with purchases and vice versa");
  app.add_flag("--no-dr-objective-term", g.no_dr_objective_term,
               "Drop the explicit demand-response price term from the objective");
  app.add_flag("--terminal-soc", g.terminal_soc, "Require final SOC >= initial SOC");
  auto* gap_opt = app.add_option("--gap", gap, "Relative MIP gap")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for synthetic scenarios");
  app.add_option("--out-dir", g.out_dir, std::string("Output directory (default $") + kOutDirEnv +
                                             " or ./mmgcoop-out)");
  app.add_flag("--verbose", g.verbose, "Print the branch-and-bound node log to stderr");
  app.add_option("--threads", g.threads, "Parallel coalition solves (0 = all cores)");
  app.add_option("--time-limit", g.time_limit, "Per-solve time limit in seconds (0 = none)");
  app.add_option("--node-limit", g.node_limit, "Per-solve node limit (0 = none)");
  app.add_option("--branching", g.branching, "most-fractional | pseudo-cost");

  std::string scenario;
  std::string coalition = "all";
  std::string table_file;
  std::string history;
  std::string model_file;
  double alpha = 0.9;

  auto* solve = app.add_subcommand("solve", "Solve one coalition and write schedule CSVs");
  solve->add_option("scenario", scenario, "Scenario file, bundled name, or synthetic:<n>")
      ->required();
  solve->add_option("--coalition", coalition, "all, or comma-separated members");

  auto* allocate = app.add_subcommand("allocate", "Solve every coalition and allocate costs");
  allocate->add_option("scenario", scenario, "Scenario file, bundled name, or synthetic:<n>");
  allocate->add_option("--table-file", table_file, "Allocate from a value-table CSV instead");

  auto* cov = app.add_subcommand("estimate-cov", "Estimate the price covariance from a history CSV");
  cov->add_option("history", history, "History CSV (actual_d, forecast_d columns)")->required();
  cov->add_option("--alpha", alpha, "Decay parameter in [0, 1]");

  auto* lf = app.add_subcommand("load-factor", "Load factor before and after demand response");
  lf->add_option("scenario", scenario, "Scenario file, bundled name, or synthetic:<n>")->required();
  lf->add_option("--coalition", coalition, "all, or comma-separated members");

  auto* dump = app.add_subcommand("dump-model", "Write the coalition model in MPS format");
  dump->add_option("scenario", scenario, "Scenario file, bundled name, or synthetic:<n>")
      ->required();
  dump->add_option("--coalition", coalition, "all, or comma-separated members");
  dump->add_option("-o,--output", model_file, "MPS file (default <out-dir>/model.mps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }
  if (*risk_opt) g.risk_weight = risk;
  if (*pricing_opt) g.pricing_mode = pricing;
  if (*gap_opt) g.gap = gap;
  if (worst && no_worst) {
    err << "error: --worst-case and --no-worst-case are exclusive\n";
    return kInvalid;
  }
  if (worst) g.worst_case = true;
  if (no_worst) g.worst_case = false;

  try {
    if (*solve) return cmd_solve(g, scenario, coalition, out, err);
    if (*allocate) return cmd_allocate(g, scenario, table_file, out, err);
    if (*cov) return cmd_estimate_cov(g, history, alpha, out);
    if (*lf) return cmd_load_factor(g, scenario, coalition, out, err);
    if (*dump) return cmd_dump_model(g, scenario, coalition, model_file, out);
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInvalid;
}

}  // namespace mmgcoop::cli

#endif  // MMGCOOP_CLI_HPP
