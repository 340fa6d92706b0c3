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

// Scenario documents (JSON). The schema is described in scenarios/README.md.

#ifndef MMGCOOP_SCENARIO_IO_HPP
#define MMGCOOP_SCENARIO_IO_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mmgcoop/csv.hpp"
#include "mmgcoop/errors.hpp"
#include "mmgcoop/scenario.hpp"

namespace mmgcoop {

namespace detail {

using json = nlohmann::json;

inline const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key + ": missing");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const char* key, double fallback,
                        const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "." + key);
}

inline bool flag_or(const json& obj, const char* key, bool fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ParseError(path + "." + key + ": expected true/false");
  return it->get<bool>();
}

inline Series series(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + ": expected an array of numbers");
  Series out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], indexed(path, i)));
  return out;
}

inline std::optional<Series> optional_series(const json& obj, const char* key,
                                             const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return series(*it, path + "." + key);
}

inline PriceHistory history_from_json(const json& v, const std::string& path,
                                      const std::filesystem::path& base_dir) {
  const double alpha = number(member(v, "alpha", path), path + ".alpha");
  if (auto it = v.find("csv"); it != v.end()) {
    if (!it->is_string()) throw ParseError(path + ".csv: expected a file name");
    return history_from_table(read_csv_file(base_dir / it->get<std::string>()), alpha);
  }
  PriceHistory h;
  h.alpha = alpha;
  const json& days = member(v, "days", path);
  if (!days.is_array()) throw ParseError(path + ".days: expected an array");
  for (std::size_t d = 0; d < days.size(); ++d) {
    const std::string dp = indexed(path + ".days", d);
    h.days.push_back({series(member(days[d], "actual", dp), dp + ".actual"),
                      series(member(days[d], "forecast", dp), dp + ".forecast")});
  }
  return h;
}

inline Microgrid microgrid_from_json(const json& v, const std::string& path,
                                     const std::filesystem::path& base_dir) {
  Microgrid mg;
  const json& name = member(v, "name", path);
  if (!name.is_string()) throw ParseError(path + ".name: expected a string");
  mg.name = name.get<std::string>();

  if (auto it = v.find("cdg"); it != v.end() && !it->is_null()) {
    const std::string cp = path + ".cdg";
    CdgSpec c;
    c.p_min = number_or(*it, "p_min", 0.0, cp);
    c.p_max = number(member(*it, "p_max", cp), cp + ".p_max");
    const json& tiers = member(*it, "tiers", cp);
    if (!tiers.is_array()) throw ParseError(cp + ".tiers: expected an array");
    for (std::size_t j = 0; j < tiers.size(); ++j) {
      const std::string tp = indexed(cp + ".tiers", j);
      c.cost_tiers.push_back({number(member(tiers[j], "upper", tp), tp + ".upper"),
                              number(member(tiers[j], "price", tp), tp + ".price")});
    }
    mg.cdg = std::move(c);
  }

  if (auto it = v.find("bess"); it != v.end() && !it->is_null()) {
    const std::string bp = path + ".bess";
    BessSpec b;
    b.capacity = number(member(*it, "capacity", bp), bp + ".capacity");
    b.converter_efficiency = number_or(*it, "converter_efficiency", 1.0, bp);
    b.converter_capacity = number(member(*it, "converter_capacity", bp), bp + ".converter_capacity");
    b.loss_charge = number_or(*it, "loss_charge", 0.0, bp);
    b.loss_discharge = number_or(*it, "loss_discharge", 0.0, bp);
    b.self_discharge_rate = number_or(*it, "self_discharge_rate", 0.0, bp);
    b.soc_initial = number_or(*it, "soc_initial", 0.0, bp);
    mg.bess = b;
  }

  // Series can come inline or from a per-microgrid CSV; inline wins per column.
  NamedSeries from_csv;
  if (auto it = v.find("series_csv"); it != v.end()) {
    if (!it->is_string()) throw ParseError(path + ".series_csv: expected a file name");
    from_csv = read_series_csv(base_dir / it->get<std::string>());
  }
  auto csv_column = [&from_csv](const std::string& name) -> std::optional<Series> {
    for (const auto& [n, s] : from_csv) {
      if (n == name) return s;
    }
    return std::nullopt;
  };

  const json empty = json::object();
  const json& load = v.contains("load") ? v["load"] : empty;
  const json& pv = v.contains("pv") ? v["pv"] : empty;
  const std::string lp = path + ".load";
  const std::string pp = path + ".pv";

  auto pick = [&](const json& obj, const char* key, const std::string& p,
                  const std::string& csv_name) -> std::optional<Series> {
    if (auto s = optional_series(obj, key, p)) return s;
    return csv_column(csv_name);
  };

  auto fixed = pick(load, "fixed", lp, "fixed");
  if (!fixed) throw ParseError(lp + ".fixed: missing");
  mg.load.fixed = *fixed;
  const std::size_t n = fixed->size();
  mg.load.controllable = pick(load, "controllable", lp, "controllable").value_or(Series(n, 0.0));
  mg.load.inflow_max = pick(load, "inflow_max", lp, "inflow_max")
                           .value_or(default_inflow_max(mg.load.controllable));
  if (auto ub = pick(load, "upper_bound", lp, "load_upper_bound")) {
    mg.load.load_upper_bound = *ub;
  } else {
    mg.load.load_upper_bound.resize(n);
    for (std::size_t t = 0; t < n && t < mg.load.controllable.size(); ++t) {
      mg.load.load_upper_bound[t] = mg.load.total(t);
    }
  }
  mg.pv.forecast = pick(pv, "forecast", pp, "pv_forecast").value_or(Series(n, 0.0));
  mg.pv.lower_bound = pick(pv, "lower_bound", pp, "pv_lower_bound").value_or(mg.pv.forecast);
  return mg;
}

}  // namespace detail

// Parses and validates. `base_dir` resolves relative CSV references.
inline Scenario scenario_from_json(const nlohmann::json& doc,
                                   const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  Scenario s;
  if (!doc.is_object()) throw ParseError("scenario: expected a JSON object");

  const json& h = member(doc, "horizon", "scenario");
  s.horizon.num_periods = static_cast<int>(number(member(h, "num_periods", "horizon"),
                                                  "horizon.num_periods"));
  s.horizon.period_hours = number_or(h, "period_hours", 1.0, "horizon");

  const json& mgs = member(doc, "microgrids", "scenario");
  if (!mgs.is_array()) throw ParseError("microgrids: expected an array");
  for (std::size_t k = 0; k < mgs.size(); ++k) {
    s.microgrids.push_back(microgrid_from_json(mgs[k], indexed("microgrids", k), base_dir));
  }

  const json& prices = member(doc, "prices", "scenario");
  s.prices.buy = series(member(prices, "buy", "prices"), "prices.buy");
  s.prices.sell = series(member(prices, "sell", "prices"), "prices.sell");

  if (auto it = doc.find("buy_history"); it != doc.end() && !it->is_null()) {
    s.buy_history = history_from_json(*it, "buy_history", base_dir);
  }
  if (auto it = doc.find("sell_history"); it != doc.end() && !it->is_null()) {
    s.sell_history = history_from_json(*it, "sell_history", base_dir);
  }
  s.risk_weight = number_or(doc, "risk_weight", 0.0, "scenario");

  if (auto it = doc.find("options"); it != doc.end()) {
    const json& o = *it;
    s.options.worst_case_enabled = flag_or(o, "worst_case", false, "options");
    s.options.dr_objective_term_enabled = flag_or(o, "dr_objective_term", true, "options");
    s.options.paper_literal_risk = flag_or(o, "paper_literal_risk", false, "options");
    s.options.terminal_soc = flag_or(o, "terminal_soc", false, "options");
    if (auto m = o.find("cdg_pricing"); m != o.end()) {
      const std::string mode = m->is_string() ? m->get<std::string>() : "";
      if (mode == "block") {
        s.options.cdg_pricing = CdgPricing::block;
      } else if (mode == "all_units") {
        s.options.cdg_pricing = CdgPricing::all_units;
      } else {
        throw ParseError("options.cdg_pricing: expected \"block\" or \"all_units\"");
      }
    }
  }

  validate(s);
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc, path.parent_path());
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using json = nlohmann::json;
  auto history = [](const PriceHistory& h) {
    json days = json::array();
    for (const auto& d : h.days) days.push_back({{"actual", d.actual}, {"forecast", d.forecast}});
    return json{{"alpha", h.alpha}, {"days", days}};
  };

  json doc;
  doc["horizon"] = {{"num_periods", s.horizon.num_periods},
                    {"period_hours", s.horizon.period_hours}};
  json mgs = json::array();
  for (const Microgrid& mg : s.microgrids) {
    json m;
    m["name"] = mg.name;
    if (mg.cdg) {
      json tiers = json::array();
      for (const auto& t : mg.cdg->cost_tiers) {
        tiers.push_back({{"upper", t.upper_bound}, {"price", t.price}});
      }
      m["cdg"] = {{"p_min", mg.cdg->p_min}, {"p_max", mg.cdg->p_max}, {"tiers", tiers}};
    }
    if (mg.bess) {
      const BessSpec& b = *mg.bess;
      m["bess"] = {{"capacity", b.capacity},
                   {"converter_efficiency", b.converter_efficiency},
                   {"converter_capacity", b.converter_capacity},
                   {"loss_charge", b.loss_charge},
                   {"loss_discharge", b.loss_discharge},
                   {"self_discharge_rate", b.self_discharge_rate},
                   {"soc_initial", b.soc_initial}};
    }
    m["load"] = {{"fixed", mg.load.fixed},
                 {"controllable", mg.load.controllable},
                 {"inflow_max", mg.load.inflow_max},
                 {"upper_bound", mg.load.load_upper_bound}};
    m["pv"] = {{"forecast", mg.pv.forecast}, {"lower_bound", mg.pv.lower_bound}};
    mgs.push_back(std::move(m));
  }
  doc["microgrids"] = std::move(mgs);
  doc["prices"] = {{"buy", s.prices.buy}, {"sell", s.prices.sell}};
  if (s.buy_history) doc["buy_history"] = history(*s.buy_history);
  if (s.sell_history) doc["sell_history"] = history(*s.sell_history);
  doc["risk_weight"] = s.risk_weight;
  doc["options"] = {{"worst_case", s.options.worst_case_enabled},
                    {"dr_objective_term", s.options.dr_objective_term_enabled},
                    {"cdg_pricing", to_string(s.options.cdg_pricing)},
                    {"paper_literal_risk", s.options.paper_literal_risk},
                    {"terminal_soc", s.options.terminal_soc}};
  return doc;
}

inline void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace mmgcoop

#endif  // MMGCOOP_SCENARIO_IO_HPP
