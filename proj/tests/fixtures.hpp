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

// Small hand-made scenarios and schedule-level property checks shared by the
// unit tests and the acceptance runner.

#ifndef MMGCOOP_TESTS_FIXTURES_HPP
#define MMGCOOP_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "mmgcoop/model.hpp"
#include "mmgcoop/scenario.hpp"
#include "mmgcoop/scenario_io.hpp"

namespace testing_fixtures {

using mmgcoop::Scenario;
using mmgcoop::ScheduleSolution;
using mmgcoop::Series;

inline Scenario paper3mg() {
  return mmgcoop::load_scenario(std::filesystem::path(MMGCOOP_DEFAULT_SCENARIO_DIR) /
                                "paper3mg.json");
}

// One microgrid, no generator, lossless 10 kWh battery starting empty,
// demand 10 kW in both hours, buy prices 0.1 then 0.3.
inline Scenario two_period_battery() {
  Scenario s;
  s.horizon.num_periods = 2;
  mmgcoop::Microgrid mg;
  mg.name = "A";
  mmgcoop::BessSpec b;
  b.capacity = 10;
  b.converter_efficiency = 1.0;
  b.converter_capacity = 10;
  b.soc_initial = 0.0;
  mg.bess = b;
  mg.load.fixed = {10, 10};
  mg.load.controllable = {0, 0};
  mg.load.inflow_max = {0, 0};
  mg.load.load_upper_bound = {10, 10};
  mg.pv.forecast = {0, 0};
  mg.pv.lower_bound = {0, 0};
  s.microgrids.push_back(mg);
  s.prices.buy = {0.1, 0.3};
  s.prices.sell = {0.0, 0.0};
  return s;
}

// Largest |sum_t load_adj - sum_t original| over members, relative to the
// daily energy.
inline double dr_conservation_error(const ScheduleSolution& sol) {
  double worst = 0.0;
  for (const auto& ms : sol.members) {
    double adj = 0.0;
    double orig = 0.0;
    for (std::size_t t = 0; t < ms.load_adj.size(); ++t) {
      adj += ms.load_adj[t];
      orig += ms.load_original[t];
    }
    worst = std::max(worst, std::abs(adj - orig) / std::max(1.0, orig));
  }
  return worst;
}

// Largest excess of shifted-in or shifted-out energy over its limit.
inline double dr_limit_violation(const Scenario& effective, const ScheduleSolution& sol) {
  double worst = 0.0;
  for (const auto& ms : sol.members) {
    const auto& load = effective.microgrids[static_cast<std::size_t>(ms.microgrid)].load;
    const std::size_t n = ms.shift.size();
    for (std::size_t t = 0; t < n; ++t) {
      double in = 0.0;
      double out = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        if (u == t) continue;
        in += ms.shift[u][t];
        out += ms.shift[t][u];
      }
      worst = std::max({worst, in - load.inflow_max[t], out - load.controllable[t]});
    }
  }
  return worst;
}

// Largest min(charge, discharge) over members and periods; zero when the
// battery never does both in one period.
inline double simultaneous_charge_discharge(const ScheduleSolution& sol) {
  double worst = 0.0;
  for (const auto& ms : sol.members) {
    for (std::size_t t = 0; t < ms.charge.size(); ++t) {
      worst = std::max(worst, std::min(ms.charge[t], ms.discharge[t]));
    }
  }
  return worst;
}

// Replays the SOC recursion from the battery data and the charge/discharge
// traces; returns the largest deviation from the reported SOC.
inline double soc_replay_error(const Scenario& effective, const ScheduleSolution& sol) {
  double worst = 0.0;
  const double dt = effective.horizon.period_hours;
  for (const auto& ms : sol.members) {
    const auto& bess = effective.microgrids[static_cast<std::size_t>(ms.microgrid)].bess;
    if (!bess) continue;
    double soc = bess->soc_initial;
    for (std::size_t t = 0; t < ms.soc.size(); ++t) {
      const double eta = bess->converter_efficiency;
      soc = (1.0 - bess->self_discharge_rate) * soc +
            ms.charge[t] * dt * (1.0 - bess->loss_charge) * eta / bess->capacity -
            ms.discharge[t] * dt / ((1.0 - bess->loss_discharge) * eta * bess->capacity);
      worst = std::max(worst, std::abs(soc - ms.soc[t]));
    }
  }
  return worst;
}

inline double total_purchases(const ScheduleSolution& sol) {
  double s = 0.0;
  for (double b : sol.buy) s += b;
  return s;
}

}  // namespace testing_fixtures

#endif  // MMGCOOP_TESTS_FIXTURES_HPP
