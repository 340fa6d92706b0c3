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

#include "mmgcoop/game.hpp"

#include <random>

#include <gtest/gtest.h>

#include "mmgcoop/synthetic.hpp"
#include "oracles.hpp"

namespace mmgcoop {
namespace {

CoalitionValueTable table_of(int n, std::vector<double> v) {
  CoalitionValueTable t = CoalitionValueTable::with_players(n);
  t.values = std::move(v);
  return t;
}

CoalitionValueTable random_table(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-100.0, 1000.0);
  CoalitionValueTable t = CoalitionValueTable::with_players(n);
  for (std::size_t m = 1; m < t.values.size(); ++m) t.values[m] = u(rng);
  return t;
}

TEST(Shapley, TwoPlayerHandExample) {
  const auto phi = shapley_values(table_of(2, {0, 10, 10, 16}));
  EXPECT_DOUBLE_EQ(phi[0], 8.0);
  EXPECT_DOUBLE_EQ(phi[1], 8.0);
}

TEST(Shapley, ThreePlayerHandExample) {
  const auto phi = shapley_values(table_of(3, {0, 6, 6, 10, 6, 10, 10, 12}));
  for (double p : phi) EXPECT_DOUBLE_EQ(p, 4.0);
}

TEST(Shapley, SinglePlayerGetsItsValue) {
  EXPECT_EQ(shapley_values(table_of(1, {0, 42.5}))[0], 42.5);
}

TEST(Shapley, MatchesOrderingAverage) {
  std::mt19937 rng(1);
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const CoalitionValueTable t = random_table(rng, n);
      const auto phi = shapley_values(t);
      const auto want = testing_oracles::shapley_by_orderings(t.values, n);
      for (int k = 0; k < n; ++k) EXPECT_NEAR(phi[k], want[k], 1e-9) << "n " << n;
    }
  }
}

TEST(Shapley, Efficiency) {
  std::mt19937 rng(2);
  for (int n = 1; n <= 8; ++n) {
    const CoalitionValueTable t = random_table(rng, n);
    const AllocationReport r = shapley(t);
    EXPECT_LE(r.efficiency_residual, 1e-9 * std::max(1.0, std::abs(r.grand_cost)));
  }
}

TEST(Shapley, DummyPlayerGetsZero) {
  std::mt19937 rng(3);
  CoalitionValueTable t = random_table(rng, 4);
  // Player 3 adds nothing to any coalition.
  for (std::uint32_t m = 0; m < 8; ++m) t.values[m | 8u] = t.values[m];
  EXPECT_EQ(shapley_values(t)[3], 0.0);
}

TEST(Shapley, Additivity) {
  std::mt19937 rng(4);
  const CoalitionValueTable a = random_table(rng, 5);
  const CoalitionValueTable b = random_table(rng, 5);
  CoalitionValueTable sum = a;
  for (std::size_t m = 0; m < sum.values.size(); ++m) sum.values[m] += b.values[m];
  const auto pa = shapley_values(a);
  const auto pb = shapley_values(b);
  const auto ps = shapley_values(sum);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(ps[k], pa[k] + pb[k], 1e-9);
}

TEST(Shapley, SwappingPlayersSwapsAllocations) {
  std::mt19937 rng(5);
  const CoalitionValueTable t = random_table(rng, 4);
  CoalitionValueTable s = t;
  auto swap01 = [](std::uint32_t m) {
    const std::uint32_t b0 = m & 1u;
    const std::uint32_t b1 = (m >> 1) & 1u;
    return (m & ~3u) | (b0 << 1) | b1;
  };
  for (std::uint32_t m = 0; m < 16; ++m) s.values[swap01(m)] = t.values[m];
  const auto pt = shapley_values(t);
  const auto ps = shapley_values(s);
  EXPECT_NEAR(ps[0], pt[1], 1e-12);
  EXPECT_NEAR(ps[1], pt[0], 1e-12);
  EXPECT_NEAR(ps[2], pt[2], 1e-12);
}

TEST(Shapley, IncompleteTableIsRejected) {
  CoalitionValueTable t = CoalitionValueTable::with_players(3);
  t.values.pop_back();
  EXPECT_THROW(shapley_values(t), std::invalid_argument);
  CoalitionValueTable u = CoalitionValueTable::with_players(2);
  u.values[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(shapley_values(u), std::invalid_argument);
}

TEST(Shapley, WeightsSumToOnePerPlayer) {
  for (int n = 1; n <= 20; ++n) {
    const auto w = shapley_weights(n);
    // Sum over coalition sizes s of C(n-1, s-1) w(s) = 1.
    double total = 0.0;
    double binom = 1.0;
    for (int s = 1; s <= n; ++s) {
      total += binom * w[static_cast<std::size_t>(s)];
      binom = binom * (n - s) / s;
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << n;
  }
}

TEST(Subadditivity, ListsViolatingPairs) {
  // V({1,2}) = 25 > 10 + 10.
  const CoalitionValueTable t = table_of(2, {0, 10, 10, 25});
  const auto v = check_subadditivity(t);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].s, 1u);
  EXPECT_EQ(v[0].t, 2u);
  EXPECT_DOUBLE_EQ(v[0].excess, 5.0);
  EXPECT_TRUE(check_subadditivity(table_of(2, {0, 10, 10, 16})).empty());
}

TEST(Core, ShapleyOfConvexGameIsInCore) {
  // Concave cost game: marginal costs shrink as coalitions grow.
  const CoalitionValueTable t = table_of(3, {0, 6, 6, 10, 6, 10, 10, 12});
  const AllocationReport r = shapley(t);
  EXPECT_TRUE(r.in_core);
  // {1}, {1,2} and {1,3} are all charged more than they cost alone.
  EXPECT_EQ(core_violations(t, {10, 1, 1}), (std::vector<std::uint32_t>{1, 3, 5}));
  for (bool ir : r.individually_rational) EXPECT_TRUE(ir);
  ASSERT_TRUE(r.grand_savings_pct);
  EXPECT_NEAR(*r.grand_savings_pct, (18.0 - 12.0) / 18.0 * 100.0, 1e-12);
  EXPECT_NEAR(*r.savings_pct[0], (6.0 - 4.0) / 6.0 * 100.0, 1e-12);
}

TEST(Report, SavingsUndefinedForNonPositiveIsolatedCost) {
  const AllocationReport r = shapley(table_of(2, {0, -5, 10, 3}));
  EXPECT_FALSE(r.savings_pct[0]);
  EXPECT_TRUE(r.savings_pct[1]);
}

TEST(Evaluate, SingleMicrogrid) {
  const Scenario s = synthetic_scenario(1, 8, {.num_periods = 6});
  const CoalitionValueTable t = evaluate_coalitions(s);
  ASSERT_EQ(t.values.size(), 2u);
  EXPECT_NEAR(t.values[1], solve_coalition(s, Coalition::all(1)).objective(), 1e-9);
}

TEST(Evaluate, IdenticalMicrogridsWithoutCouplingAreAdditive) {
  SyntheticOptions o;
  o.num_periods = 8;
  o.identical = true;
  o.with_bess = false;
  o.controllable_share = 0.0;
  Scenario s = synthetic_scenario(2, 21, o);
  s.prices.sell = s.prices.buy;
  for (double& p : s.prices.sell) p *= 0.5;
  const CoalitionValueTable t = evaluate_coalitions(s);
  EXPECT_NEAR(t.values[3], t.values[1] + t.values[2], 1e-6 * std::abs(t.values[3]));
  EXPECT_DOUBLE_EQ(t.values[1], t.values[2]);
}

TEST(Evaluate, SymmetricInstanceGivesEqualShares) {
  const Scenario s = synthetic_scenario(3, 4, {.num_periods = 8, .identical = true});
  const AllocationReport r = compare_modes(s);
  EXPECT_NEAR(r.shapley[0], r.shapley[1], 1e-6 * std::abs(r.grand_cost));
  EXPECT_NEAR(r.shapley[1], r.shapley[2], 1e-6 * std::abs(r.grand_cost));
  EXPECT_LE(r.efficiency_residual, 1e-6 * std::max(1.0, std::abs(r.grand_cost)));
}

TEST(Evaluate, EmptyMicrogridIsDummy) {
  Scenario s = synthetic_scenario(2, 9, {.num_periods = 6});
  Microgrid empty;
  empty.name = "EMPTY";
  const std::size_t T = 6;
  empty.load.fixed.assign(T, 0.0);
  empty.load.controllable.assign(T, 0.0);
  empty.load.inflow_max.assign(T, 0.0);
  empty.load.load_upper_bound.assign(T, 0.0);
  empty.pv.forecast.assign(T, 0.0);
  empty.pv.lower_bound.assign(T, 0.0);
  s.microgrids.push_back(empty);
  const AllocationReport r = compare_modes(s);
  EXPECT_NEAR(r.shapley[2], 0.0, 1e-6 * std::abs(r.grand_cost));
  EXPECT_EQ(r.isolated[2], 0.0);
}

TEST(Evaluate, ThreadCountDoesNotChangeTheTable) {
  const Scenario s = synthetic_scenario(3, 10, {.num_periods = 6});
  const CoalitionValueTable a = evaluate_coalitions(s, {}, {.threads = 1});
  const CoalitionValueTable b = evaluate_coalitions(s, {}, {.threads = 4});
  EXPECT_EQ(a.values, b.values);
}

TEST(Evaluate, RandomInstancesAreSubadditiveWithoutRisk) {
  for (std::uint64_t seed = 100; seed < 104; ++seed) {
    const Scenario s = synthetic_scenario(3, seed, {.num_periods = 8});
    const AllocationReport r = compare_modes(s);
    EXPECT_TRUE(r.subadditivity_violations.empty()) << seed;
    EXPECT_LE(r.grand_cost, r.isolated[0] + r.isolated[1] + r.isolated[2] + 1e-6);
  }
}

TEST(Evaluate, InfeasibleCoalitionIsNamed) {
  // A full battery that leaks cannot finish the day full again.
  Scenario s = synthetic_scenario(2, 9, {.num_periods = 4});
  s.microgrids[1].bess->soc_initial = 1.0;
  s.microgrids[1].bess->self_discharge_rate = 0.05;
  s.options.terminal_soc = true;
  try {
    evaluate_coalitions(s);
    FAIL() << "expected a coalition error";
  } catch (const CoalitionSolveError& e) {
    EXPECT_EQ(e.mask(), 2u);
    EXPECT_EQ(e.status(), MipStatus::infeasible);
    EXPECT_NE(std::string(e.what()).find("{MG2}"), std::string::npos);
  }
}

}  // namespace
}  // namespace mmgcoop
