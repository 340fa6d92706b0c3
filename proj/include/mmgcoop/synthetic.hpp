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

// Seeded random scenarios for tests and experiments.

#ifndef MMGCOOP_SYNTHETIC_HPP
#define MMGCOOP_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "mmgcoop/scenario.hpp"

namespace mmgcoop {

struct SyntheticOptions {
  int num_periods = 24;
  double risk_weight = 0.0;
  int history_days = 30;
  double history_alpha = 0.9;
  double controllable_share = 0.06;
  bool with_bess = true;
  // All microgrids share one set of parameters (a symmetric game).
  bool identical = false;
};

namespace detail {

// Uniform draw built from raw engine output so the sequence does not depend
// on the standard library's distribution implementation.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline double normal(std::mt19937_64& rng) {
  // Box-Muller; one value per call keeps the stream simple.
  const double u1 = uniform(rng, 1e-12, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }

inline PriceHistory synthetic_history(std::mt19937_64& rng, const Series& base, int days,
                                      double alpha, double sigma) {
  PriceHistory h;
  h.alpha = alpha;
  for (int d = 0; d < days; ++d) {
    HistoryDay day;
    const double level = normal(rng) * sigma;
    for (double b : base) {
      const double f = b * uniform(rng, 0.95, 1.05);
      day.forecast.push_back(round_to(f, 0.01));
      day.actual.push_back(round_to(f + level + normal(rng) * sigma, 0.01));
    }
    h.days.push_back(std::move(day));
  }
  return h;
}

}  // namespace detail

inline Microgrid synthetic_microgrid(std::mt19937_64& rng, const std::string& name,
                                     const SyntheticOptions& o) {
  using detail::round_to;
  using detail::uniform;
  const auto T = static_cast<std::size_t>(o.num_periods);
  Microgrid mg;
  mg.name = name;

  CdgSpec g;
  g.p_min = 0.0;
  const double t1 = round_to(uniform(rng, 100.0, 250.0), 10.0);
  const double t2 = t1 + round_to(uniform(rng, 100.0, 200.0), 10.0);
  const double t3 = t2 + round_to(uniform(rng, 50.0, 200.0), 10.0);
  const double c1 = round_to(uniform(rng, 14.0, 28.0), 1.0);
  const double c2 = c1 + round_to(uniform(rng, 4.0, 16.0), 1.0);
  const double c3 = c2 + round_to(uniform(rng, 4.0, 20.0), 1.0);
  g.p_max = t3;
  g.cost_tiers = {{t1, c1}, {t2, c2}, {t3, c3}};
  mg.cdg = g;

  if (o.with_bess) {
    BessSpec b;
    b.capacity = round_to(uniform(rng, 100.0, 300.0), 10.0);
    b.converter_efficiency = 0.98;
    b.converter_capacity = round_to(b.capacity * uniform(rng, 0.5, 1.0), 10.0);
    b.loss_charge = 0.03;
    b.loss_discharge = 0.03;
    b.self_discharge_rate = 0.0;
    b.soc_initial = 0.25;
    mg.bess = b;
  }

  const double peak = uniform(rng, 300.0, 700.0);
  const double peak_hour = uniform(rng, 0.35, 0.8) * static_cast<double>(T);
  const double pv_size = uniform(rng, 0.0, 400.0);
  for (std::size_t t = 0; t < T; ++t) {
    const double x = static_cast<double>(t);
    const double shape = 0.55 + 0.45 * std::exp(-std::pow((x - peak_hour) / (0.2 * T), 2.0));
    const double total = round_to(peak * shape * uniform(rng, 0.95, 1.05), 0.1);
    const double con = round_to(total * o.controllable_share, 0.1);
    mg.load.fixed.push_back(round_to(total - con, 0.1));
    mg.load.controllable.push_back(con);
    mg.load.load_upper_bound.push_back(round_to(total * 1.05, 0.1));
    const double sun = std::sin(std::numbers::pi * (x - 0.25 * T) / (0.5 * T));
    const double pv = sun > 0.0 ? round_to(pv_size * sun, 0.1) : 0.0;
    mg.pv.forecast.push_back(pv);
    mg.pv.lower_bound.push_back(round_to(0.9 * pv, 0.1));
  }
  mg.load.inflow_max = default_inflow_max(mg.load.controllable);
  return mg;
}

inline Scenario synthetic_scenario(int num_microgrids, std::uint64_t seed,
                                   const SyntheticOptions& o = {}) {
  using detail::round_to;
  using detail::uniform;
  std::mt19937_64 rng(seed);
  Scenario s;
  s.horizon.num_periods = o.num_periods;
  s.horizon.period_hours = 1.0;
  const auto T = static_cast<std::size_t>(o.num_periods);

  for (int k = 0; k < num_microgrids; ++k) {
    const std::string name = "MG" + std::to_string(k + 1);
    if (o.identical) {
      std::mt19937_64 copy = rng;  // every member replays the same draws
      s.microgrids.push_back(synthetic_microgrid(copy, name, o));
    } else {
      s.microgrids.push_back(synthetic_microgrid(rng, name, o));
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    const double x = static_cast<double>(t) / static_cast<double>(T);
    const double base = 30.0 + 18.0 * std::exp(-std::pow((x - 0.75) / 0.12, 2.0)) +
                        8.0 * std::exp(-std::pow((x - 0.35) / 0.1, 2.0));
    const double buy = round_to(base * uniform(rng, 0.95, 1.05), 0.01);
    s.prices.buy.push_back(buy);
    s.prices.sell.push_back(round_to(buy * uniform(rng, 0.6, 0.85), 0.01));
  }
  s.risk_weight = o.risk_weight;
  if (o.history_days > 0) {
    s.buy_history = detail::synthetic_history(rng, s.prices.buy, o.history_days,
                                              o.history_alpha, 2.0);
    s.sell_history = detail::synthetic_history(rng, s.prices.sell, o.history_days,
                                               o.history_alpha, 1.5);
  }
  return s;
}

}  // namespace mmgcoop

#endif  // MMGCOOP_SYNTHETIC_HPP
