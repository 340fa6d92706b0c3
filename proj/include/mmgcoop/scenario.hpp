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

// Problem-instance data model for day-ahead multi-microgrid scheduling.
//
// Units: power in kW, energy in kWh, prices in $ per kWh of energy. With the
// default one-hour period, a power value and the energy it delivers in one
// period are numerically equal.

#ifndef MMGCOOP_SCENARIO_HPP
#define MMGCOOP_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mmgcoop/errors.hpp"

namespace mmgcoop {

using Series = std::vector<double>;

struct Horizon {
  int num_periods = 24;
  double period_hours = 1.0;

  bool operator==(const Horizon&) const = default;
};

struct CostTier {
  double upper_bound = 0.0;  // kW, inclusive
  double price = 0.0;        // $/kWh

  bool operator==(const CostTier&) const = default;
};

enum class CdgPricing {
  block,      // marginal: each tier price applies to the slice inside the tier
  all_units,  // the tier reached by the output prices every unit
};

struct CdgSpec {
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<CostTier> cost_tiers;

  // Lower edge of tier `j` (0 for the first tier).
  double tier_lower(std::size_t j) const {
    return j == 0 ? 0.0 : cost_tiers[j - 1].upper_bound;
  }

  // Hourly cost rate ($/h) of running at `p` kW.
  double cost_rate(double p, CdgPricing mode) const {
    if (cost_tiers.empty()) return 0.0;
    if (mode == CdgPricing::all_units) {
      for (const auto& tier : cost_tiers) {
        if (p <= tier.upper_bound) return tier.price * p;
      }
      return cost_tiers.back().price * p;
    }
    double cost = 0.0;
    for (std::size_t j = 0; j < cost_tiers.size(); ++j) {
      const double lo = tier_lower(j);
      const double slice = std::clamp(p - lo, 0.0, cost_tiers[j].upper_bound - lo);
      cost += slice * cost_tiers[j].price;
    }
    return cost;
  }

  bool operator==(const CdgSpec&) const = default;
};

struct BessSpec {
  double capacity = 0.0;              // kWh
  double converter_efficiency = 1.0;  // (0, 1]
  double converter_capacity = 0.0;    // kW
  double loss_charge = 0.0;           // fraction
  double loss_discharge = 0.0;        // fraction
  double self_discharge_rate = 0.0;   // fraction of SOC lost per period
  double soc_initial = 0.0;           // fraction of capacity

  // Grid-side energy returned per unit of grid-side energy stored.
  double round_trip_efficiency() const {
    return (1.0 - loss_charge) * (1.0 - loss_discharge) * converter_efficiency *
           converter_efficiency;
  }

  bool operator==(const BessSpec&) const = default;
};

struct LoadProfile {
  Series fixed;
  Series controllable;
  Series inflow_max;
  Series load_upper_bound;

  double total(std::size_t t) const { return fixed[t] + controllable[t]; }

  bool operator==(const LoadProfile&) const = default;
};

struct PvProfile {
  Series forecast;
  Series lower_bound;

  bool operator==(const PvProfile&) const = default;
};

struct PriceSeries {
  Series buy;
  Series sell;

  bool operator==(const PriceSeries&) const = default;
};

struct HistoryDay {
  Series actual;
  Series forecast;

  bool operator==(const HistoryDay&) const = default;
};

// Actual/forecast price pairs for the days before the scheduling day,
// oldest first.
struct PriceHistory {
  std::vector<HistoryDay> days;
  double alpha = 0.0;

  bool operator==(const PriceHistory&) const = default;
};

struct Microgrid {
  std::string name;
  std::optional<CdgSpec> cdg;
  std::optional<BessSpec> bess;
  LoadProfile load;
  PvProfile pv;

  bool operator==(const Microgrid&) const = default;
};

struct ScenarioOptions {
  bool worst_case_enabled = false;
  bool dr_objective_term_enabled = true;
  CdgPricing cdg_pricing = CdgPricing::block;
  // Pair the sell-history covariance with purchases and vice versa.
  bool paper_literal_risk = false;
  // Require the final SOC to be at least the initial SOC.
  bool terminal_soc = false;

  bool operator==(const ScenarioOptions&) const = default;
};

struct Scenario {
  Horizon horizon;
  std::vector<Microgrid> microgrids;
  PriceSeries prices;
  std::optional<PriceHistory> buy_history;
  std::optional<PriceHistory> sell_history;
  double risk_weight = 0.0;
  ScenarioOptions options;

  std::size_t num_players() const { return microgrids.size(); }
  std::size_t num_periods() const {
    return static_cast<std::size_t>(horizon.num_periods);
  }

  bool operator==(const Scenario&) const = default;
};

inline const char* to_string(CdgPricing mode) {
  return mode == CdgPricing::block ? "block" : "all_units";
}

// Default shift-in cap: the day's controllable energy spread evenly.
inline Series default_inflow_max(const Series& controllable) {
  const double total = std::accumulate(controllable.begin(), controllable.end(), 0.0);
  const double avg = controllable.empty() ? 0.0 : total / static_cast<double>(controllable.size());
  return Series(controllable.size(), avg);
}

namespace detail {

inline std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

inline void check_series(const Series& s, std::size_t n, const std::string& path,
                         bool nonnegative = true) {
  require(s.size() == n, path,
          "expected " + std::to_string(n) + " values, got " + std::to_string(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(std::isfinite(s[i]), indexed(path, i), "not a finite number");
    if (nonnegative) require(s[i] >= 0.0, indexed(path, i), "must be >= 0");
  }
}

inline void check_fraction(double v, const std::string& path, bool allow_one) {
  require(std::isfinite(v) && v >= 0.0 && (allow_one ? v <= 1.0 : v < 1.0), path,
          allow_one ? "must lie in [0, 1]" : "must lie in [0, 1)");
}

inline void check_history(const PriceHistory& h, std::size_t n, const std::string& path) {
  require(!h.days.empty(), path + ".days", "at least one day is required");
  require(std::isfinite(h.alpha) && h.alpha >= 0.0 && h.alpha <= 1.0, path + ".alpha",
          "must lie in [0, 1]");
  for (std::size_t d = 0; d < h.days.size(); ++d) {
    const std::string day = indexed(path + ".days", d);
    check_series(h.days[d].actual, n, day + ".actual", false);
    check_series(h.days[d].forecast, n, day + ".forecast", false);
  }
}

}  // namespace detail

// Throws ValidationError naming the first violated invariant.
inline void validate(const Scenario& s) {
  using detail::check_series;
  using detail::indexed;
  using detail::require;

  require(s.horizon.num_periods >= 1, "horizon.num_periods", "must be >= 1");
  require(std::isfinite(s.horizon.period_hours) && s.horizon.period_hours > 0.0,
          "horizon.period_hours", "must be > 0");
  const std::size_t n = s.num_periods();

  require(!s.microgrids.empty(), "microgrids", "at least one microgrid is required");
  for (std::size_t k = 0; k < s.microgrids.size(); ++k) {
    const Microgrid& mg = s.microgrids[k];
    const std::string path = indexed("microgrids", k);
    require(!mg.name.empty(), path + ".name", "must not be empty");
    for (std::size_t j = 0; j < k; ++j) {
      require(s.microgrids[j].name != mg.name, path + ".name", "duplicate name '" + mg.name + "'");
    }

    if (mg.cdg) {
      const CdgSpec& c = *mg.cdg;
      const std::string cp = path + ".cdg";
      require(std::isfinite(c.p_min) && c.p_min >= 0.0, cp + ".p_min", "must be >= 0");
      require(std::isfinite(c.p_max) && c.p_max >= c.p_min, cp + ".p_max", "must be >= p_min");
      require(!c.cost_tiers.empty(), cp + ".tiers", "at least one tier is required");
      for (std::size_t j = 0; j < c.cost_tiers.size(); ++j) {
        const std::string tp = indexed(cp + ".tiers", j);
        require(std::isfinite(c.cost_tiers[j].price) && c.cost_tiers[j].price >= 0.0,
                tp + ".price", "must be >= 0");
        require(std::isfinite(c.cost_tiers[j].upper_bound), tp + ".upper", "not finite");
        if (j > 0) {
          require(c.cost_tiers[j].upper_bound > c.cost_tiers[j - 1].upper_bound, tp + ".upper",
                  "tier bounds must be strictly increasing");
          require(c.cost_tiers[j].price > c.cost_tiers[j - 1].price, tp + ".price",
                  "tier prices must be strictly increasing");
        } else {
          require(c.cost_tiers[j].upper_bound >= 0.0, tp + ".upper", "must be >= 0");
        }
      }
      require(c.cost_tiers.back().upper_bound == c.p_max,
              indexed(cp + ".tiers", c.cost_tiers.size() - 1) + ".upper",
              "last tier bound must equal p_max");
    }

    if (mg.bess) {
      const BessSpec& b = *mg.bess;
      const std::string bp = path + ".bess";
      require(std::isfinite(b.capacity) && b.capacity > 0.0, bp + ".capacity", "must be > 0");
      require(std::isfinite(b.converter_efficiency) && b.converter_efficiency > 0.0 &&
                  b.converter_efficiency <= 1.0,
              bp + ".converter_efficiency", "must lie in (0, 1]");
      require(std::isfinite(b.converter_capacity) && b.converter_capacity >= 0.0,
              bp + ".converter_capacity", "must be >= 0");
      detail::check_fraction(b.loss_charge, bp + ".loss_charge", false);
      detail::check_fraction(b.loss_discharge, bp + ".loss_discharge", false);
      detail::check_fraction(b.self_discharge_rate, bp + ".self_discharge_rate", false);
      detail::check_fraction(b.soc_initial, bp + ".soc_initial", true);
    }

    const std::string lp = path + ".load";
    check_series(mg.load.fixed, n, lp + ".fixed");
    check_series(mg.load.controllable, n, lp + ".controllable");
    check_series(mg.load.inflow_max, n, lp + ".inflow_max");
    check_series(mg.load.load_upper_bound, n, lp + ".upper_bound");
    for (std::size_t t = 0; t < n; ++t) {
      require(mg.load.load_upper_bound[t] >= mg.load.total(t) * (1.0 - 1e-12),
              indexed(lp + ".upper_bound", t), "must be >= fixed + controllable");
    }

    const std::string pp = path + ".pv";
    check_series(mg.pv.forecast, n, pp + ".forecast");
    check_series(mg.pv.lower_bound, n, pp + ".lower_bound");
    for (std::size_t t = 0; t < n; ++t) {
      require(mg.pv.lower_bound[t] <= mg.pv.forecast[t], indexed(pp + ".lower_bound", t),
              "must be <= forecast");
    }
  }

  check_series(s.prices.buy, n, "prices.buy");
  check_series(s.prices.sell, n, "prices.sell");
  for (std::size_t t = 0; t < n; ++t) {
    require(s.prices.sell[t] <= s.prices.buy[t], indexed("prices.sell", t),
            "sell price must not exceed buy price");
  }

  require(std::isfinite(s.risk_weight) && s.risk_weight >= 0.0, "risk_weight", "must be >= 0");
  if (s.buy_history) detail::check_history(*s.buy_history, n, "buy_history");
  if (s.sell_history) detail::check_history(*s.sell_history, n, "sell_history");
  if (s.risk_weight > 0.0) {
    require(s.buy_history.has_value(), "buy_history", "required when risk_weight > 0");
    require(s.sell_history.has_value(), "sell_history", "required when risk_weight > 0");
  }
}

// Demand at its upper bound, PV at its lower bound. Fixed and controllable
// parts are scaled by a common factor so the flexible share is preserved.
inline Scenario apply_worst_case(const Scenario& s) {
  Scenario out = s;
  for (Microgrid& mg : out.microgrids) {
    LoadProfile& load = mg.load;
    for (std::size_t t = 0; t < load.fixed.size(); ++t) {
      const double base = load.total(t);
      const double upper = load.load_upper_bound[t];
      if (base > 0.0) {
        const double factor = upper / base;
        load.fixed[t] *= factor;
        load.controllable[t] *= factor;
      } else {
        load.fixed[t] = upper;
      }
      // Pin the bound to the rounded sum so a second application is the identity.
      load.load_upper_bound[t] = load.total(t);
    }
    mg.pv.forecast = mg.pv.lower_bound;
  }
  return out;
}

}  // namespace mmgcoop

#endif  // MMGCOOP_SCENARIO_HPP
