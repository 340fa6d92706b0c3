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

// Day-ahead scheduling model for one coalition of microgrids.
//
// Per member k and period t the model carries CDG output, battery
// charge/discharge/mode/SOC, load shifts t -> t' and the adjusted load; the
// coalition trades with the main grid through one buy/sell pair per period.
// Everything is linear except the price-risk quadratics, which enter through
// epigraph columns handled by the MIP layer.

#ifndef MMGCOOP_MODEL_HPP
#define MMGCOOP_MODEL_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmgcoop/errors.hpp"
#include "mmgcoop/lp.hpp"
#include "mmgcoop/mip.hpp"
#include "mmgcoop/scenario.hpp"
#include "mmgcoop/uncertainty.hpp"

namespace mmgcoop {

inline constexpr double kFeasibilityTolerance = 1e-6;
inline constexpr double kObjectiveTolerance = 1e-6;

// Sorted, duplicate-free microgrid indices.
struct Coalition {
  std::vector<int> members;

  static Coalition all(std::size_t n) {
    Coalition c;
    for (std::size_t k = 0; k < n; ++k) c.members.push_back(static_cast<int>(k));
    return c;
  }

  static Coalition from_mask(std::uint32_t mask) {
    Coalition c;
    for (int k = 0; mask >> k; ++k) {
      if ((mask >> k) & 1u) c.members.push_back(k);
    }
    return c;
  }

  std::uint32_t mask() const {
    std::uint32_t m = 0;
    for (int k : members) m |= 1u << k;
    return m;
  }

  bool operator==(const Coalition&) const = default;
};

// Column indices of one member's variables; -1 marks an absent entry.
struct MemberLayout {
  int microgrid = -1;
  std::vector<int> cdg;        // [t]
  std::vector<int> charge;     // [t]
  std::vector<int> discharge;  // [t]
  std::vector<int> mode;       // [t], 1 = discharging
  std::vector<int> soc;        // [t], fraction after period t
  std::vector<int> load_adj;   // [t]
  std::vector<std::vector<int>> shift;        // [t][t'], load moved from t to t'
  std::vector<std::vector<int>> segment;      // [t][tier], block pricing
  std::vector<std::vector<int>> tier_select;  // [t][tier], all-units pricing
  std::vector<std::vector<int>> tier_output;  // [t][tier], all-units pricing
};

struct VariableLayout {
  int num_periods = 0;
  std::vector<MemberLayout> members;
  std::vector<int> buy;   // [t]
  std::vector<int> sell;  // [t]
  int z_buy = -1;
  int z_sell = -1;
};

struct OptimizationModel {
  Scenario scenario;  // effective data (worst case already applied)
  Coalition coalition;
  VariableLayout layout;
  MipProblem mip;
  std::optional<CovarianceEstimate> buy_covariance;   // paired with purchases
  std::optional<CovarianceEstimate> sell_covariance;  // paired with sales
  double risk_weight = 0.0;

  int num_cols() const { return mip.lp.num_cols(); }
  int num_rows() const { return mip.lp.num_rows(); }
};

namespace detail {

inline std::string var_name(const std::string& base, const std::string& mg, int t) {
  return base + "[" + mg + ",t" + std::to_string(t + 1) + "]";
}

inline void check_coalition(const Scenario& s, const Coalition& c) {
  if (c.members.empty()) throw std::invalid_argument("coalition is empty");
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    const int k = c.members[i];
    if (k < 0 || static_cast<std::size_t>(k) >= s.num_players()) {
      throw std::invalid_argument("coalition member " + std::to_string(k) + " out of range");
    }
    if (i && c.members[i - 1] >= k) {
      throw std::invalid_argument("coalition members must be sorted and distinct");
    }
  }
}

inline void check_series_length(const Series& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    throw DimensionError(what + " has " + std::to_string(v.size()) + " values, expected " +
                         std::to_string(n));
  }
}

}  // namespace detail

// Returns the scenario the model is built from: worst-case data when enabled.
inline Scenario effective_scenario(const Scenario& s) {
  return s.options.worst_case_enabled ? apply_worst_case(s) : s;
}

inline OptimizationModel build_model(const Scenario& input, const Coalition& coalition) {
  detail::check_coalition(input, coalition);
  OptimizationModel m;
  m.scenario = effective_scenario(input);
  m.coalition = coalition;
  const Scenario& s = m.scenario;
  const int T = s.horizon.num_periods;
  const auto nT = static_cast<std::size_t>(T);
  const double dt = s.horizon.period_hours;
  detail::check_series_length(s.prices.buy, nT, "prices.buy");
  detail::check_series_length(s.prices.sell, nT, "prices.sell");

  lp::Problem& p = m.mip.lp;
  VariableLayout& L = m.layout;
  L.num_periods = T;
  const bool all_units = s.options.cdg_pricing == CdgPricing::all_units;
  using detail::var_name;

  for (int k : coalition.members) {
    const Microgrid& mg = s.microgrids[static_cast<std::size_t>(k)];
    const std::string& nm = mg.name;
    const std::string path = "microgrids[" + std::to_string(k) + "]";
    detail::check_series_length(mg.load.fixed, nT, path + ".load.fixed");
    detail::check_series_length(mg.load.controllable, nT, path + ".load.controllable");
    detail::check_series_length(mg.load.inflow_max, nT, path + ".load.inflow_max");
    detail::check_series_length(mg.pv.forecast, nT, path + ".pv.forecast");

    MemberLayout ml;
    ml.microgrid = k;
    ml.shift.assign(nT, std::vector<int>(nT, -1));
    ml.segment.assign(nT, {});
    ml.tier_select.assign(nT, {});
    ml.tier_output.assign(nT, {});

    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);

      // CDG output and its tiered cost.
      if (mg.cdg) {
        const CdgSpec& g = *mg.cdg;
        const int col = p.add_column(0.0, g.p_min, g.p_max, var_name("p_cdg", nm, t));
        ml.cdg.push_back(col);
        lp::Row link;
        link.add(col, 1.0);
        link.lower = link.upper = 0.0;
        if (!all_units) {
          for (std::size_t j = 0; j < g.cost_tiers.size(); ++j) {
            const double width = g.cost_tiers[j].upper_bound - g.tier_lower(j);
            const int seg = p.add_column(dt * g.cost_tiers[j].price, 0.0, width,
                                         var_name("seg" + std::to_string(j + 1), nm, t));
            ml.segment[ut].push_back(seg);
            link.add(seg, -1.0);
          }
          link.name = var_name("cdg_tiers", nm, t);
          p.add_row(link);
        } else {
          lp::Row pick;
          pick.lower = pick.upper = 1.0;
          pick.name = var_name("tier_pick", nm, t);
          for (std::size_t j = 0; j < g.cost_tiers.size(); ++j) {
            const std::string tag = std::to_string(j + 1);
            const double lo = g.tier_lower(j);
            const double hi = g.cost_tiers[j].upper_bound;
            const int b = p.add_column(0.0, 0.0, 1.0, var_name("tier_sel" + tag, nm, t));
            const int w = p.add_column(dt * g.cost_tiers[j].price, 0.0, hi,
                                       var_name("tier_out" + tag, nm, t));
            ml.tier_select[ut].push_back(b);
            ml.tier_output[ut].push_back(w);
            m.mip.integer_cols.push_back(b);
            pick.add(b, 1.0);
            link.add(w, -1.0);
            lp::Row upper;
            upper.add(w, 1.0);
            upper.add(b, -hi);
            upper.upper = 0.0;
            upper.name = var_name("tier_hi" + tag, nm, t);
            p.add_row(upper);
            lp::Row lower;
            lower.add(w, 1.0);
            lower.add(b, -lo);
            lower.lower = 0.0;
            lower.name = var_name("tier_lo" + tag, nm, t);
            p.add_row(lower);
          }
          link.name = var_name("cdg_tiers", nm, t);
          p.add_row(link);
          p.add_row(pick);
        }
      } else {
        ml.cdg.push_back(p.add_column(0.0, 0.0, 0.0, var_name("p_cdg", nm, t)));
      }

      // Battery.
      if (mg.bess) {
        const BessSpec& b = *mg.bess;
        const double eta = b.converter_efficiency;
        const double gate = b.converter_capacity / eta;
        const double in_eff = (1.0 - b.loss_charge) * eta;
        const double out_eff = (1.0 - b.loss_discharge) * eta;
        const double cap = b.capacity;
        const int ch = p.add_column(0.0, 0.0, gate, var_name("p_charge", nm, t));
        const int dis = p.add_column(0.0, 0.0, gate, var_name("p_discharge", nm, t));
        const int u = p.add_column(0.0, 0.0, 1.0, var_name("u", nm, t));
        const double soc_lo = (s.options.terminal_soc && t == T - 1) ? b.soc_initial : 0.0;
        const int soc = p.add_column(0.0, soc_lo, 1.0, var_name("soc", nm, t));
        m.mip.integer_cols.push_back(u);
        ml.charge.push_back(ch);
        ml.discharge.push_back(dis);
        ml.mode.push_back(u);
        ml.soc.push_back(soc);
        const int prev = t > 0 ? ml.soc[ut - 1] : -1;

        // Charge headroom: stored energy cannot exceed capacity.
        lp::Row chg;
        chg.add(ch, dt * in_eff);
        if (prev >= 0) {
          chg.add(prev, cap);
          chg.upper = cap;
        } else {
          chg.upper = cap * (1.0 - b.soc_initial);
        }
        chg.name = var_name("chg_soc", nm, t);
        p.add_row(chg);

        // Discharge limited by the energy available at the start of the period.
        lp::Row dsc;
        dsc.add(dis, dt);
        if (prev >= 0) {
          dsc.add(prev, -out_eff * cap);
          dsc.upper = 0.0;
        } else {
          dsc.upper = out_eff * cap * b.soc_initial;
        }
        dsc.name = var_name("dis_soc", nm, t);
        p.add_row(dsc);

        // Mode gating: u = 0 allows charging only, u = 1 discharging only.
        lp::Row cg;
        cg.add(ch, 1.0);
        cg.add(u, gate);
        cg.upper = gate;
        cg.name = var_name("chg_gate", nm, t);
        p.add_row(cg);
        lp::Row dg;
        dg.add(dis, 1.0);
        dg.add(u, -gate);
        dg.upper = 0.0;
        dg.name = var_name("dis_gate", nm, t);
        p.add_row(dg);

        // soc(t) = (1 - delta) soc(t-1) + charge in - discharge out.
        lp::Row rec;
        rec.add(soc, 1.0);
        rec.add(ch, -dt * in_eff / cap);
        rec.add(dis, dt / (out_eff * cap));
        const double keep = 1.0 - b.self_discharge_rate;
        if (prev >= 0) {
          rec.add(prev, -keep);
          rec.lower = rec.upper = 0.0;
        } else {
          rec.lower = rec.upper = keep * b.soc_initial;
        }
        rec.name = var_name("soc_balance", nm, t);
        p.add_row(rec);
      } else {
        ml.charge.push_back(p.add_column(0.0, 0.0, 0.0, var_name("p_charge", nm, t)));
        ml.discharge.push_back(p.add_column(0.0, 0.0, 0.0, var_name("p_discharge", nm, t)));
        ml.mode.push_back(p.add_column(0.0, 0.0, 0.0, var_name("u", nm, t)));
        ml.soc.push_back(p.add_column(0.0, 0.0, 0.0, var_name("soc", nm, t)));
      }
    }

    // Demand response: shifts t -> t' with the price delta as objective term.
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      for (int t2 = 0; t2 < T; ++t2) {
        if (t2 == t) continue;
        const auto ut2 = static_cast<std::size_t>(t2);
        const double ub = std::max(
            0.0, std::min(mg.load.controllable[ut], mg.load.inflow_max[ut2]));
        const double c = s.options.dr_objective_term_enabled
                             ? dt * (s.prices.buy[ut2] - s.prices.buy[ut])
                             : 0.0;
        ml.shift[ut][ut2] = p.add_column(
            c, 0.0, ub,
            "shift[" + nm + ",t" + std::to_string(t + 1) + ",t" + std::to_string(t2 + 1) + "]");
      }
    }
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      const int adj = p.add_column(0.0, 0.0, lp::kInf, var_name("load_adj", nm, t));
      ml.load_adj.push_back(adj);
      lp::Row in;
      lp::Row out;
      lp::Row bal;
      bal.add(adj, 1.0);
      for (int t2 = 0; t2 < T; ++t2) {
        if (t2 == t) continue;
        const auto ut2 = static_cast<std::size_t>(t2);
        in.add(ml.shift[ut2][ut], 1.0);
        out.add(ml.shift[ut][ut2], 1.0);
        bal.add(ml.shift[ut2][ut], -1.0);
        bal.add(ml.shift[ut][ut2], 1.0);
      }
      in.upper = mg.load.inflow_max[ut];
      in.name = var_name("dr_in", nm, t);
      out.upper = mg.load.controllable[ut];
      out.name = var_name("dr_out", nm, t);
      bal.lower = bal.upper = mg.load.total(ut);
      bal.name = var_name("load_adj_def", nm, t);
      if (T > 1) {
        p.add_row(in);
        p.add_row(out);
      }
      p.add_row(bal);
    }
    L.members.push_back(std::move(ml));
  }

  // Coalition-level grid exchange and power balance.
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const std::string tn = "[t" + std::to_string(t + 1) + "]";
    L.buy.push_back(p.add_column(dt * s.prices.buy[ut], 0.0, lp::kInf, "p_buy" + tn));
    L.sell.push_back(p.add_column(-dt * s.prices.sell[ut], 0.0, lp::kInf, "p_sell" + tn));
  }
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    lp::Row bal;
    double pv = 0.0;
    for (const MemberLayout& ml : L.members) {
      const Microgrid& mg = s.microgrids[static_cast<std::size_t>(ml.microgrid)];
      pv += mg.pv.forecast[ut];
      bal.add(ml.cdg[ut], 1.0);
      bal.add(ml.discharge[ut], 1.0);
      bal.add(ml.load_adj[ut], -1.0);
      bal.add(ml.charge[ut], -1.0);
    }
    bal.add(L.buy[ut], 1.0);
    bal.add(L.sell[ut], -1.0);
    bal.lower = bal.upper = -pv;
    bal.name = "balance[t" + std::to_string(t + 1) + "]";
    p.add_row(bal);
  }

  // Price risk: z >= p' V p for purchases and for sales.
  m.risk_weight = s.risk_weight;
  const bool risky = s.risk_weight > 0.0;
  L.z_buy = p.add_column(risky ? s.risk_weight : 0.0, 0.0, risky ? lp::kInf : 0.0, "z_buy");
  L.z_sell = p.add_column(risky ? s.risk_weight : 0.0, 0.0, risky ? lp::kInf : 0.0, "z_sell");
  if (risky) {
    if (!s.buy_history || !s.sell_history) {
      throw std::invalid_argument("risk_weight > 0 needs buy and sell price histories");
    }
    CovarianceEstimate vb = estimate_covariance(*s.buy_history);
    CovarianceEstimate vs = estimate_covariance(*s.sell_history);
    if (s.options.paper_literal_risk) std::swap(vb, vs);
    check_dimension(vb, nT);
    check_dimension(vs, nT);
    m.buy_covariance = vb;
    m.sell_covariance = vs;
    m.mip.epigraphs.push_back({L.z_buy, L.buy, vb, "risk_buy"});
    m.mip.epigraphs.push_back({L.z_sell, L.sell, vs, "risk_sell"});
  }
  return m;
}

struct ObjectiveBreakdown {
  double cdg_cost = 0.0;
  double grid_buy_cost = 0.0;
  double grid_sell_revenue = 0.0;
  double dr_term = 0.0;
  double risk_term = 0.0;

  double total() const {
    return cdg_cost + grid_buy_cost - grid_sell_revenue + dr_term + risk_term;
  }
};

struct MemberSchedule {
  int microgrid = -1;
  std::string name;
  Series cdg;
  Series charge;
  Series discharge;
  Series mode;
  Series soc;
  Series load_adj;
  Series load_original;  // fixed + controllable
  Series pv;
  std::vector<Series> shift;        // [t][t']
  std::vector<Series> tier_select;  // [t][tier], all-units pricing only
};

struct ScheduleSolution {
  Coalition coalition;
  std::vector<MemberSchedule> members;
  Series buy;
  Series sell;
  double z_buy = 0.0;
  double z_sell = 0.0;
  Series price_buy;
  Series price_sell;
  double period_hours = 1.0;
  double objective_total = 0.0;
  ObjectiveBreakdown breakdown;
  MipStatus status = MipStatus::optimal;
  double gap = 0.0;
  double bound = 0.0;
};

// Recomputes the objective terms from a full column vector, using the
// exact quadratics for the risk term.
inline ObjectiveBreakdown objective_breakdown(const OptimizationModel& m,
                                              std::span<const double> x) {
  const Scenario& s = m.scenario;
  const double dt = s.horizon.period_hours;
  const auto& L = m.layout;
  ObjectiveBreakdown b;
  for (const MemberLayout& ml : L.members) {
    const Microgrid& mg = s.microgrids[static_cast<std::size_t>(ml.microgrid)];
    for (int t = 0; t < L.num_periods; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      if (mg.cdg) {
        for (std::size_t j = 0; j < ml.segment[ut].size(); ++j) {
          b.cdg_cost += dt * mg.cdg->cost_tiers[j].price * x[ml.segment[ut][j]];
        }
        for (std::size_t j = 0; j < ml.tier_output[ut].size(); ++j) {
          b.cdg_cost += dt * mg.cdg->cost_tiers[j].price * x[ml.tier_output[ut][j]];
        }
      }
      if (s.options.dr_objective_term_enabled) {
        for (int t2 = 0; t2 < L.num_periods; ++t2) {
          const int col = ml.shift[ut][static_cast<std::size_t>(t2)];
          if (col < 0) continue;
          b.dr_term +=
              dt * x[col] * (s.prices.buy[static_cast<std::size_t>(t2)] - s.prices.buy[ut]);
        }
      }
    }
  }
  for (int t = 0; t < L.num_periods; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    b.grid_buy_cost += dt * s.prices.buy[ut] * x[L.buy[ut]];
    b.grid_sell_revenue += dt * s.prices.sell[ut] * x[L.sell[ut]];
  }
  if (m.risk_weight > 0.0) {
    for (const auto& e : m.mip.epigraphs) b.risk_term += m.risk_weight * e.exact(x);
  }
  return b;
}

inline ScheduleSolution extract_solution(const OptimizationModel& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.num_cols()) {
    throw DimensionError("solution vector does not match the model");
  }
  const Scenario& s = m.scenario;
  const auto& L = m.layout;
  const auto nT = static_cast<std::size_t>(L.num_periods);
  auto gather = [&](const std::vector<int>& cols) {
    Series v(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) v[i] = x[cols[i]];
    return v;
  };
  ScheduleSolution sol;
  sol.coalition = m.coalition;
  sol.period_hours = s.horizon.period_hours;
  sol.price_buy = s.prices.buy;
  sol.price_sell = s.prices.sell;
  for (const MemberLayout& ml : L.members) {
    const Microgrid& mg = s.microgrids[static_cast<std::size_t>(ml.microgrid)];
    MemberSchedule ms;
    ms.microgrid = ml.microgrid;
    ms.name = mg.name;
    ms.cdg = gather(ml.cdg);
    ms.charge = gather(ml.charge);
    ms.discharge = gather(ml.discharge);
    ms.mode = gather(ml.mode);
    ms.soc = gather(ml.soc);
    ms.load_adj = gather(ml.load_adj);
    ms.pv = mg.pv.forecast;
    ms.load_original.resize(nT);
    ms.shift.assign(nT, Series(nT, 0.0));
    for (std::size_t t = 0; t < nT; ++t) {
      ms.load_original[t] = mg.load.total(t);
      for (std::size_t t2 = 0; t2 < nT; ++t2) {
        if (ml.shift[t][t2] >= 0) ms.shift[t][t2] = x[ml.shift[t][t2]];
      }
      if (!ml.tier_select[t].empty()) ms.tier_select.push_back(gather(ml.tier_select[t]));
    }
    sol.members.push_back(std::move(ms));
  }
  sol.buy = gather(L.buy);
  sol.sell = gather(L.sell);
  sol.breakdown = objective_breakdown(m, x);
  // Epigraph values raised to the exact quadratics (still feasible for every cut).
  sol.z_buy = x[L.z_buy];
  sol.z_sell = x[L.z_sell];
  if (m.risk_weight > 0.0) {
    sol.z_buy = std::max(sol.z_buy, m.mip.epigraphs[0].exact(x));
    sol.z_sell = std::max(sol.z_sell, m.mip.epigraphs[1].exact(x));
  }
  sol.objective_total = sol.breakdown.total();
  return sol;
}

// Inverse of extract_solution: lays the schedule back out as a column vector.
inline std::vector<double> solution_vector(const OptimizationModel& m,
                                           const ScheduleSolution& sol) {
  const auto& L = m.layout;
  const auto nT = static_cast<std::size_t>(L.num_periods);
  if (sol.members.size() != L.members.size() || sol.buy.size() != nT || sol.sell.size() != nT) {
    throw DimensionError("schedule does not match the model layout");
  }
  std::vector<double> x(static_cast<std::size_t>(m.num_cols()), 0.0);
  auto scatter = [&](const std::vector<int>& cols, const Series& v, const char* what) {
    if (v.size() != cols.size()) throw DimensionError(std::string("schedule series ") + what);
    for (std::size_t i = 0; i < cols.size(); ++i) x[cols[i]] = v[i];
  };
  for (std::size_t i = 0; i < L.members.size(); ++i) {
    const MemberLayout& ml = L.members[i];
    const MemberSchedule& ms = sol.members[i];
    const Microgrid& mg = m.scenario.microgrids[static_cast<std::size_t>(ml.microgrid)];
    scatter(ml.cdg, ms.cdg, "cdg");
    scatter(ml.charge, ms.charge, "charge");
    scatter(ml.discharge, ms.discharge, "discharge");
    scatter(ml.mode, ms.mode, "mode");
    scatter(ml.soc, ms.soc, "soc");
    scatter(ml.load_adj, ms.load_adj, "load_adj");
    if (ms.shift.size() != nT) throw DimensionError("schedule series shift");
    for (std::size_t t = 0; t < nT; ++t) {
      for (std::size_t t2 = 0; t2 < nT; ++t2) {
        if (ml.shift[t][t2] >= 0) x[ml.shift[t][t2]] = ms.shift[t][t2];
      }
      const double p = ms.cdg[t];
      if (!mg.cdg) continue;
      const CdgSpec& g = *mg.cdg;
      // Tier variables follow from the output level.
      for (std::size_t j = 0; j < ml.segment[t].size(); ++j) {
        const double lo = g.tier_lower(j);
        x[ml.segment[t][j]] = std::clamp(p - lo, 0.0, g.cost_tiers[j].upper_bound - lo);
      }
      if (!ml.tier_select[t].empty()) {
        if (t < ms.tier_select.size()) {
          scatter(ml.tier_select[t], ms.tier_select[t], "tier_select");
        }
        for (std::size_t j = 0; j < ml.tier_output[t].size(); ++j) {
          x[ml.tier_output[t][j]] = x[ml.tier_select[t][j]] * p;
        }
      }
    }
  }
  scatter(L.buy, sol.buy, "buy");
  scatter(L.sell, sol.sell, "sell");
  x[static_cast<std::size_t>(L.z_buy)] = sol.z_buy;
  x[static_cast<std::size_t>(L.z_sell)] = sol.z_sell;
  return x;
}

struct Finding {
  std::string constraint;  // row or column name, or "objective"
  double amount = 0.0;     // size of the violation
  std::string detail;
};

struct ViolationReport {
  std::vector<Finding> findings;
  double recomputed_objective = 0.0;

  bool ok() const { return findings.empty(); }
};

// Lists every bound, row, integrality and epigraph violation beyond the
// feasibility tolerance, and compares the reported objective with one
// recomputed from scratch.
inline ViolationReport check_solution(const OptimizationModel& m, const ScheduleSolution& sol,
                                      double tol = kFeasibilityTolerance) {
  ViolationReport rep;
  const std::vector<double> x = solution_vector(m, sol);
  const lp::Problem& p = m.mip.lp;
  for (int j = 0; j < p.num_cols(); ++j) {
    const double below = p.lower[j] - x[j];
    const double above = x[j] - p.upper[j];
    if (below > tol) rep.findings.push_back({p.col_names[j], below, "below lower bound"});
    if (above > tol) rep.findings.push_back({p.col_names[j], above, "above upper bound"});
  }
  for (int j : m.mip.integer_cols) {
    const double frac = std::abs(x[j] - std::round(x[j]));
    if (frac > tol) rep.findings.push_back({p.col_names[j], frac, "not integral"});
  }
  for (const lp::Row& r : p.rows) {
    const double a = r.activity(x);
    if (r.lower - a > tol) rep.findings.push_back({r.name, r.lower - a, "row below its lower side"});
    if (a - r.upper > tol) rep.findings.push_back({r.name, a - r.upper, "row above its upper side"});
  }
  const ObjectiveBreakdown exact = objective_breakdown(m, x);
  rep.recomputed_objective = exact.total();
  const double scale = std::max(1.0, std::abs(rep.recomputed_objective));
  if (m.risk_weight > 0.0) {
    const double zs[2] = {sol.z_buy, sol.z_sell};
    for (std::size_t e = 0; e < 2; ++e) {
      const double f = m.mip.epigraphs[e].exact(x);
      const double gap = m.risk_weight * (f - zs[e]);
      if (gap > kObjectiveTolerance * scale) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "epigraph below p'Vp = %.9g by %.9g (objective gap %.9g)",
                      f, f - zs[e], gap);
        rep.findings.push_back({m.mip.epigraphs[e].name, gap, buf});
      }
    }
  }
  // Reported objective as the solver would evaluate it: linear part plus r z.
  const double reported = sol.objective_total;
  const double diff = std::abs(reported - rep.recomputed_objective);
  if (diff > kObjectiveTolerance * scale) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "reported %.10g, recomputed %.10g", reported,
                  rep.recomputed_objective);
    rep.findings.push_back({"objective", diff, buf});
  }
  const double parts = sol.breakdown.total();
  if (std::abs(parts - reported) > kObjectiveTolerance * scale) {
    rep.findings.push_back(
        {"objective_breakdown", std::abs(parts - reported), "terms do not sum to the total"});
  }
  return rep;
}

struct MemberDiagnostics {
  int microgrid = -1;
  std::string name;
  Series shortage;  // local deficit covered by the coalition or the grid
  Series surplus;   // local excess exported
  double dr_profit = 0.0;
};

inline std::vector<MemberDiagnostics> derive_diagnostics(const ScheduleSolution& sol) {
  std::vector<MemberDiagnostics> out;
  for (const MemberSchedule& ms : sol.members) {
    MemberDiagnostics d;
    d.microgrid = ms.microgrid;
    d.name = ms.name;
    const std::size_t n = ms.cdg.size();
    d.shortage.assign(n, 0.0);
    d.surplus.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double net = ms.load_adj[t] + ms.charge[t] - ms.pv[t] - ms.cdg[t] - ms.discharge[t];
      d.shortage[t] = std::max(0.0, net);
      d.surplus[t] = std::max(0.0, -net);
      for (std::size_t t2 = 0; t2 < ms.shift[t].size(); ++t2) {
        if (t2 == t) continue;
        d.dr_profit +=
            sol.period_hours * ms.shift[t][t2] * (sol.price_buy[t] - sol.price_buy[t2]);
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace mmgcoop

#endif  // MMGCOOP_MODEL_HPP
