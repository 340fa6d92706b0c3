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

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "mmgcoop/csv.hpp"
#include "mmgcoop/scenario.hpp"
#include "mmgcoop/scenario_io.hpp"
#include "mmgcoop/synthetic.hpp"

namespace mmgcoop {
namespace {

Scenario one_mg(std::size_t T) {
  Scenario s;
  s.horizon.num_periods = static_cast<int>(T);
  Microgrid mg;
  mg.name = "A";
  mg.load.fixed.assign(T, 0.0);
  mg.load.controllable.assign(T, 0.0);
  mg.load.inflow_max.assign(T, 0.0);
  mg.load.load_upper_bound.assign(T, 0.0);
  mg.pv.forecast.assign(T, 0.0);
  mg.pv.lower_bound.assign(T, 0.0);
  s.microgrids.push_back(mg);
  s.prices.buy.assign(T, 0.0);
  s.prices.sell.assign(T, 0.0);
  return s;
}

std::string field_of(const Scenario& s) {
  try {
    validate(s);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

TEST(Scenario, AllZeroSingleMicrogridIsValid) { EXPECT_NO_THROW(validate(one_mg(24))); }

TEST(Scenario, SellAboveBuyNamesTheEntry) {
  Scenario s = one_mg(8);
  s.prices.buy.assign(8, 1.0);
  s.prices.sell.assign(8, 0.5);
  s.prices.sell[5] = 2.0;
  EXPECT_EQ(field_of(s), "prices.sell[5]");
}

TEST(Scenario, ValidationFieldPaths) {
  {
    Scenario s = one_mg(4);
    s.microgrids[0].load.fixed.pop_back();
    EXPECT_EQ(field_of(s), "microgrids[0].load.fixed");
  }
  {
    Scenario s = one_mg(4);
    s.microgrids[0].load.fixed[2] = -1.0;
    EXPECT_EQ(field_of(s), "microgrids[0].load.fixed[2]");
  }
  {
    Scenario s = one_mg(4);
    BessSpec b;
    b.capacity = 10;
    b.converter_capacity = 5;
    b.soc_initial = 1.5;
    s.microgrids[0].bess = b;
    EXPECT_EQ(field_of(s), "microgrids[0].bess.soc_initial");
  }
  {
    Scenario s = one_mg(4);
    CdgSpec c;
    c.p_max = 100;
    c.cost_tiers = {{50, 10}, {100, 5}};
    s.microgrids[0].cdg = c;
    EXPECT_EQ(field_of(s), "microgrids[0].cdg.tiers[1].price");
  }
  {
    Scenario s = one_mg(4);
    s.risk_weight = 0.1;
    EXPECT_EQ(field_of(s), "buy_history");
  }
  {
    Scenario s = one_mg(4);
    s.microgrids.push_back(s.microgrids[0]);
    EXPECT_EQ(field_of(s), "microgrids[1].name");
  }
}

TEST(Scenario, WorstCaseTakesPvLowerBound) {
  Scenario s = one_mg(2);
  s.microgrids[0].pv.forecast = {100, 80};
  s.microgrids[0].pv.lower_bound = {90, 70};
  const Scenario w = apply_worst_case(s);
  EXPECT_EQ(w.microgrids[0].pv.forecast, (Series{90, 70}));
}

TEST(Scenario, WorstCaseIdentityWhenUpperEqualsForecast) {
  Scenario s = one_mg(2);
  auto& l = s.microgrids[0].load;
  l.fixed = {40, 30};
  l.controllable = {10, 5};
  l.load_upper_bound = {50, 35};
  const Scenario w = apply_worst_case(s);
  EXPECT_EQ(w.microgrids[0].load.fixed, l.fixed);
  EXPECT_EQ(w.microgrids[0].load.controllable, l.controllable);
}

TEST(Scenario, WorstCaseSplitsIncreaseProportionally) {
  Scenario s = one_mg(1);
  auto& l = s.microgrids[0].load;
  l.fixed = {50};
  l.controllable = {50};
  l.load_upper_bound = {120};
  const Scenario w = apply_worst_case(s);
  EXPECT_DOUBLE_EQ(w.microgrids[0].load.fixed[0], 60.0);
  EXPECT_DOUBLE_EQ(w.microgrids[0].load.controllable[0], 60.0);
  // Applying it twice changes nothing.
  const Scenario w2 = apply_worst_case(w);
  EXPECT_DOUBLE_EQ(w2.microgrids[0].load.fixed[0], 60.0);
}

TEST(Scenario, BlockAndAllUnitsCost) {
  CdgSpec c;
  c.p_max = 500;
  c.cost_tiers = {{200, 25}, {400, 41}, {500, 60}};
  // 200*25 + 151*41 by hand; all-units charges every kW at the tier rate.
  EXPECT_DOUBLE_EQ(c.cost_rate(351, CdgPricing::block), 11191.0);
  EXPECT_DOUBLE_EQ(c.cost_rate(351, CdgPricing::all_units), 14391.0);
  double prev = 0.0;
  double prev_marginal = 0.0;
  for (int p = 1; p <= 500; ++p) {
    const double cost = c.cost_rate(p, CdgPricing::block);
    EXPECT_GE(cost - prev + 1e-9, prev_marginal);
    prev_marginal = cost - prev;
    prev = cost;
  }
}

TEST(Scenario, RoundTripEfficiencyMatchesHandValue) {
  BessSpec b;
  b.capacity = 200;
  b.converter_efficiency = 0.98;
  b.loss_charge = 0.03;
  b.loss_discharge = 0.03;
  EXPECT_NEAR(b.round_trip_efficiency(), 0.97 * 0.97 * 0.98 * 0.98, 1e-15);
}

TEST(Scenario, DefaultInflowIsMeanControllable) {
  const Series v = default_inflow_max({6, 0, 3, 3});
  EXPECT_EQ(v, (Series{3, 3, 3, 3}));
}

TEST(ScenarioIo, JsonRoundTripIsExact) {
  Scenario s = synthetic_scenario(3, 7, {.risk_weight = 0.002});
  s.options.cdg_pricing = CdgPricing::all_units;
  s.options.terminal_soc = true;
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back).dump(), scenario_to_json(s).dump());
  EXPECT_EQ(back.options.cdg_pricing, CdgPricing::all_units);
  ASSERT_TRUE(back.buy_history);
  EXPECT_EQ(back.buy_history->days.size(), 30u);
}

TEST(ScenarioIo, ParseErrorsNameTheKey) {
  nlohmann::json doc = scenario_to_json(one_mg(2));
  doc.erase("prices");
  EXPECT_THROW(scenario_from_json(doc), ParseError);
  nlohmann::json bad = scenario_to_json(one_mg(2));
  bad["options"]["cdg_pricing"] = "stepwise";
  EXPECT_THROW(scenario_from_json(bad), ParseError);
  nlohmann::json neg = scenario_to_json(one_mg(2));
  neg["prices"]["sell"][1] = 5.0;
  try {
    scenario_from_json(neg);
    FAIL() << "expected validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "prices.sell[1]");
  }
}

TEST(ScenarioIo, BundledExampleHasPublishedLimits) {
  const Scenario s =
      load_scenario(std::filesystem::path(MMGCOOP_DEFAULT_SCENARIO_DIR) / "paper3mg.json");
  ASSERT_EQ(s.num_players(), 3u);
  EXPECT_EQ(s.num_periods(), 24u);
  EXPECT_EQ(s.microgrids[0].cdg->p_max, 500);
  EXPECT_EQ(s.microgrids[1].cdg->p_max, 600);
  EXPECT_EQ(s.microgrids[2].cdg->p_max, 550);
  EXPECT_EQ(s.microgrids[2].cdg->cost_tiers[0].price, 16);
  EXPECT_EQ(s.microgrids[0].bess->capacity, 200);
  EXPECT_DOUBLE_EQ(s.microgrids[0].bess->soc_initial * 200, 50.0);
  EXPECT_DOUBLE_EQ(s.risk_weight, 0.001);
  for (double p : s.prices.buy) EXPECT_GT(p, 26.0);
}

TEST(Csv, RoundTripAndNumberFormat) {
  CsvTable t;
  t.header = {"a", "b"};
  // Solver noise below 1e-9 prints as 0.
  t.rows = {{format_number(0.1), format_number(1e-12)}, {format_number(-3), format_number(2.5)}};
  std::stringstream ss;
  write_csv(ss, t);
  EXPECT_EQ(ss.str(), "a,b\n0.1,0\n-3,2.5\n");
  const CsvTable back = read_csv(ss);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.numeric("b"), (Series{0, 2.5}));
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
}

TEST(Csv, HistoryTableRoundTrip) {
  PriceHistory h;
  h.alpha = 0.5;
  h.days = {{{1, 2}, {1.5, 2}}, {{3, 4}, {3, 3.5}}};
  const PriceHistory back = history_from_table(history_table(h), 0.5);
  ASSERT_EQ(back.days.size(), 2u);
  EXPECT_EQ(back.days[1].actual, (Series{3, 4}));
  EXPECT_EQ(back.days[0].forecast, (Series{1.5, 2}));
}

}  // namespace
}  // namespace mmgcoop
