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

// Output files: per-period schedule tables, objective terms, allocation
// tables, load factors and the run manifest. All writers are deterministic:
// same inputs, same bytes.

#ifndef MMGCOOP_REPORT_HPP
#define MMGCOOP_REPORT_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmgcoop/csv.hpp"
#include "mmgcoop/game.hpp"
#include "mmgcoop/model.hpp"
#include "mmgcoop/solver.hpp"
#include "mmgcoop/uncertainty.hpp"

namespace mmgcoop {

inline constexpr const char* kToolVersion = "1.0.0";

// mean / max; an all-zero profile counts as flat.
inline double load_factor(const Series& load) {
  if (load.empty()) return 1.0;
  const double peak = *std::max_element(load.begin(), load.end());
  if (peak <= 0.0) return 1.0;
  const double mean = std::accumulate(load.begin(), load.end(), 0.0) /
                      static_cast<double>(load.size());
  return mean / peak;
}

struct LoadFactorRow {
  std::string name;
  double before = 1.0;
  double after = 1.0;
  double improvement_pct = 0.0;
};

inline std::vector<LoadFactorRow> load_factors(const ScheduleSolution& sol) {
  std::vector<LoadFactorRow> out;
  for (const MemberSchedule& ms : sol.members) {
    LoadFactorRow r;
    r.name = ms.name;
    r.before = load_factor(ms.load_original);
    r.after = load_factor(ms.load_adj);
    r.improvement_pct = (r.after - r.before) / r.before * 100.0;
    out.push_back(r);
  }
  return out;
}

inline CsvTable load_factor_table(const std::vector<LoadFactorRow>& rows) {
  CsvTable t;
  t.header = {"microgrid", "load_factor_before", "load_factor_after", "improvement_pct"};
  for (const auto& r : rows) {
    t.rows.push_back({r.name, format_number(r.before), format_number(r.after),
                      format_number(r.improvement_pct)});
  }
  return t;
}

// Named per-period tables for one schedule, keyed by file name.
inline std::map<std::string, CsvTable> schedule_tables(const ScheduleSolution& sol,
                                                       const SolveResult* result = nullptr) {
  std::map<std::string, CsvTable> files;
  NamedSeries cdg;
  NamedSeries bess;
  NamedSeries load;
  NamedSeries diag;
  for (const MemberSchedule& ms : sol.members) {
    cdg.emplace_back(ms.name, ms.cdg);
    bess.emplace_back(ms.name + "_charge", ms.charge);
    bess.emplace_back(ms.name + "_discharge", ms.discharge);
    bess.emplace_back(ms.name + "_soc", ms.soc);
    bess.emplace_back(ms.name + "_mode", ms.mode);
    load.emplace_back(ms.name + "_original", ms.load_original);
    load.emplace_back(ms.name + "_adjusted", ms.load_adj);
    load.emplace_back(ms.name + "_pv", ms.pv);
  }
  const auto diags = derive_diagnostics(sol);
  for (const auto& d : diags) {
    diag.emplace_back(d.name + "_shortage", d.shortage);
    diag.emplace_back(d.name + "_surplus", d.surplus);
  }
  files["cdg.csv"] = series_table(cdg);
  files["grid.csv"] = series_table({{"buy", sol.buy},
                                    {"sell", sol.sell},
                                    {"price_buy", sol.price_buy},
                                    {"price_sell", sol.price_sell}});
  files["bess.csv"] = series_table(bess);
  files["load.csv"] = series_table(load);
  files["diagnostics.csv"] = series_table(diag);

  CsvTable dr;
  dr.header = {"microgrid", "dr_profit"};
  for (const auto& d : diags) dr.rows.push_back({d.name, format_number(d.dr_profit)});
  files["dr_profit.csv"] = dr;

  CsvTable obj;
  obj.header = {"objective_total", "cdg_cost", "grid_buy_cost", "grid_sell_revenue",
                "dr_term", "risk_term", "bound", "gap", "nodes_explored", "cuts_added"};
  const auto& b = sol.breakdown;
  obj.rows.push_back({format_number(sol.objective_total), format_number(b.cdg_cost),
                      format_number(b.grid_buy_cost), format_number(b.grid_sell_revenue),
                      format_number(b.dr_term), format_number(b.risk_term),
                      format_number(sol.bound), format_number(sol.gap),
                      std::to_string(result ? result->nodes_explored : 0),
                      std::to_string(result ? result->cuts_added : 0)});
  files["objective.csv"] = obj;
  files["load_factor.csv"] = load_factor_table(load_factors(sol));
  return files;
}

inline CsvTable value_table_csv(const CoalitionValueTable& t) {
  CsvTable out;
  out.header = {"mask", "members", "size", "value"};
  for (std::uint32_t mask = 1; mask <= t.grand(); ++mask) {
    std::string members;
    for (int k = 0; k < t.n; ++k) {
      if (!((mask >> k) & 1u)) continue;
      if (!members.empty()) members += "+";
      members += t.player(k);
    }
    out.rows.push_back({std::to_string(mask), members, std::to_string(std::popcount(mask)),
                        format_number(t.values[mask])});
  }
  return out;
}

// Reads a value table. Coalitions come from a `mask` column when present,
// otherwise from `members` listing 1-based player numbers joined by '+'.
inline CoalitionValueTable read_value_table(const CsvTable& csv) {
  const Series values = csv.numeric("value");
  std::vector<std::uint32_t> masks;
  const bool by_mask = csv.has_column("mask");
  const std::size_t col = by_mask ? csv.column("mask") : csv.column("members");
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const std::string& cell = csv.rows[i][col];
    std::uint32_t mask = 0;
    try {
      if (by_mask) {
        mask = static_cast<std::uint32_t>(std::stoul(cell));
      } else {
        std::stringstream ss(cell);
        std::string tok;
        while (std::getline(ss, tok, '+')) {
          const int k = std::stoi(tok);
          if (k < 1 || k > kMaxPlayers) throw std::out_of_range("player");
          mask |= std::uint32_t{1} << (k - 1);
        }
      }
    } catch (const std::exception&) {
      throw ParseError("value table row " + std::to_string(i + 2) + ": bad coalition '" +
                       cell + "'");
    }
    if (mask == 0) {
      throw ParseError("value table row " + std::to_string(i + 2) + ": empty coalition");
    }
    masks.push_back(mask);
  }
  std::uint32_t all = 0;
  for (auto m : masks) all |= m;
  const int n = std::bit_width(all);
  CoalitionValueTable t = CoalitionValueTable::with_players(n);
  std::fill(t.values.begin() + 1, t.values.end(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < masks.size(); ++i) t.values[masks[i]] = values[i];
  check_complete(t);
  return t;
}

inline CsvTable allocation_csv(const AllocationReport& r) {
  CsvTable out;
  out.header = {"microgrid", "shapley", "isolated", "savings_pct", "individually_rational"};
  for (int k = 0; k < r.table.n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out.rows.push_back({r.table.player(k), format_number(r.shapley[uk]),
                        format_number(r.isolated[uk]),
                        r.savings_pct[uk] ? format_number(*r.savings_pct[uk]) : "",
                        r.individually_rational[uk] ? "1" : "0"});
  }
  return out;
}

inline nlohmann::ordered_json allocation_json(const AllocationReport& r) {
  nlohmann::ordered_json j;
  auto num = [](double v) { return std::stod(format_number(v)); };
  j["players"] = r.table.n;
  j["grand_cost"] = num(r.grand_cost);
  j["grand_savings_pct"] = r.grand_savings_pct ? nlohmann::ordered_json(num(*r.grand_savings_pct))
                                               : nlohmann::ordered_json(nullptr);
  j["efficiency_residual"] = num(r.efficiency_residual);
  j["in_core"] = r.in_core;
  auto& alloc = j["allocation"] = nlohmann::ordered_json::array();
  for (int k = 0; k < r.table.n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    nlohmann::ordered_json a;
    a["microgrid"] = r.table.player(k);
    a["shapley"] = num(r.shapley[uk]);
    a["isolated"] = num(r.isolated[uk]);
    a["savings_pct"] = r.savings_pct[uk] ? nlohmann::ordered_json(num(*r.savings_pct[uk]))
                                         : nlohmann::ordered_json(nullptr);
    a["individually_rational"] = static_cast<bool>(r.individually_rational[uk]);
    alloc.push_back(a);
  }
  auto& viol = j["subadditivity_violations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.subadditivity_violations) {
    viol.push_back({{"s", r.table.label(v.s)}, {"t", r.table.label(v.t)}, {"excess", num(v.excess)}});
  }
  return j;
}

inline CsvTable covariance_csv(const CovarianceEstimate& v) {
  CsvTable out;
  const int n = v.dimension();
  out.header.push_back("period");
  for (int j = 0; j < n; ++j) out.header.push_back("t" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i + 1)};
    for (int j = 0; j < n; ++j) row.push_back(format_number(v.matrix(i, j)));
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string subcommand;
  std::string scenario;
  std::vector<std::pair<std::string, std::string>> overrides;  // flag, value
  std::string output_directory;
  std::uint64_t seed = 0;
  std::vector<std::string> files;
};

inline nlohmann::ordered_json manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "mmgcoop";
  j["tool_version"] = m.tool_version;
  j["subcommand"] = m.subcommand;
  j["scenario"] = m.scenario;
  auto& o = j["overrides"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.overrides) o[k] = v;
  j["output_directory"] = m.output_directory;
  j["seed"] = m.seed;
  std::vector<std::string> files = m.files;
  std::sort(files.begin(), files.end());
  j["files"] = files;
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

// Writes each table under `dir` and returns the file names written.
inline std::vector<std::string> write_tables(const std::filesystem::path& dir,
                                             const std::map<std::string, CsvTable>& tables) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (const auto& [name, table] : tables) {
    write_csv_file(dir / name, table);
    names.push_back(name);
  }
  return names;
}

}  // namespace mmgcoop

#endif  // MMGCOOP_REPORT_HPP
