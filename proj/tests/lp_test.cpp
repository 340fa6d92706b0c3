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

#include "mmgcoop/lp.hpp"

#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"

namespace mmgcoop::lp {
namespace {

TEST(SolveLp, LowerBoundIsOptimum) {
  Problem p;
  p.add_column(1.0, 3.0, kInf, "x");
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_DOUBLE_EQ(s.x[0], 3.0);
}

TEST(SolveLp, MaximizeAsMinimizeNegated) {
  Problem p;
  p.add_column(-1.0, 0.0, kInf, "x");
  Row r;
  r.add(0, 1.0);
  r.upper = 5.0;
  p.add_row(r);
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.x[0], 5.0, 1e-12);
  EXPECT_NEAR(s.objective, -5.0, 1e-12);
}

TEST(SolveLp, DetectsInfeasibleRows) {
  Problem p;
  p.add_column(1.0, 0.0, 10.0);
  p.add_column(1.0, 0.0, 10.0);
  Row r;
  r.add(0, 1.0);
  r.add(1, 1.0);
  r.lower = 25.0;
  p.add_row(r);
  EXPECT_EQ(solve_lp(p).status, Status::infeasible);
}

TEST(SolveLp, DetectsUnbounded) {
  Problem p;
  p.add_column(-1.0, 0.0, kInf);
  p.add_column(0.0, 0.0, kInf);
  Row r;
  r.add(0, 1.0);
  r.add(1, -1.0);
  r.upper = 2.0;
  p.add_row(r);
  EXPECT_EQ(solve_lp(p).status, Status::unbounded);
}

TEST(SolveLp, FreeColumnAndEqualityRow) {
  // min x + 2y  s.t.  x - y = 1, y >= -4, x free.
  Problem p;
  p.add_column(1.0, -kInf, kInf, "x");
  p.add_column(2.0, -4.0, kInf, "y");
  Row r;
  r.add(0, 1.0);
  r.add(1, -1.0);
  r.lower = r.upper = 1.0;
  p.add_row(r);
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.x[1], -4.0, 1e-9);
  EXPECT_NEAR(s.x[0], -3.0, 1e-9);
}

TEST(SolveLp, RandomProblemsMatchVertexEnumeration) {
  std::mt19937 rng(7);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Problem p = testing_oracles::random_box_lp(rng, 2 + trial % 3, 1 + trial % 4);
    const auto expected = testing_oracles::vertex_enumeration(p);
    const LpSolution s = solve_lp(p);
    if (!expected) {
      EXPECT_EQ(s.status, Status::infeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, Status::optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, *expected, 1e-7 * (1.0 + std::abs(*expected))) << "trial " << trial;
    EXPECT_LE(testing_oracles::max_violation(p, s.x), 1e-7) << "trial " << trial;
  }
  EXPECT_GT(feasible, 60);
}

TEST(Simplex, WarmStartAfterBoundChangesAndNewRows) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Problem p = testing_oracles::random_box_lp(rng, 4, 3);
    Simplex warm(p);
    warm.solve();
    // Tighten a column, then add a row; compare with a cold solve.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int col = trial % 4;
    const double mid = p.lower[col] + u(rng) * (p.upper[col] - p.lower[col]);
    if (trial % 2) {
      p.lower[col] = mid;
    } else {
      p.upper[col] = mid;
    }
    warm.set_bounds(col, p.lower[col], p.upper[col]);
    Row extra;
    for (int j = 0; j < 4; ++j) extra.add(j, u(rng) * 2.0 - 1.0);
    extra.upper = u(rng);
    warm.add_row(extra);
    p.add_row(extra);

    const Status ws = warm.solve();
    const LpSolution cold = solve_lp(p);
    ASSERT_EQ(ws, cold.status) << "trial " << trial;
    if (cold.status == Status::optimal) {
      EXPECT_NEAR(warm.objective(), cold.objective, 1e-8 * (1.0 + std::abs(cold.objective)));
    }
    // Remove the added row again.
    warm.remove_rows({warm.num_rows() - 1});
    p.rows.pop_back();
    const Status ws2 = warm.solve();
    const LpSolution cold2 = solve_lp(p);
    ASSERT_EQ(ws2, cold2.status) << "trial " << trial;
    if (cold2.status == Status::optimal) {
      EXPECT_NEAR(warm.objective(), cold2.objective, 1e-8 * (1.0 + std::abs(cold2.objective)));
    }
  }
}

TEST(Simplex, DegenerateProblemTerminates) {
  // Many redundant rows through the optimal vertex.
  Problem p;
  p.add_column(-1.0, 0.0, kInf);
  p.add_column(-1.0, 0.0, kInf);
  for (int k = 1; k <= 30; ++k) {
    Row r;
    r.add(0, static_cast<double>(k));
    r.add(1, static_cast<double>(31 - k));
    r.upper = 31.0;
    p.add_row(r);
  }
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, -2.0, 1e-9);
}

TEST(Simplex, IterationLimitIsReported) {
  Problem p;
  for (int j = 0; j < 10; ++j) p.add_column(-1.0, 0.0, kInf);
  for (int i = 0; i < 10; ++i) {
    Row r;
    for (int j = 0; j < 10; ++j) r.add(j, 1.0 + ((i + j) % 3));
    r.upper = 10.0 + i;
    p.add_row(r);
  }
  Options o;
  o.iteration_limit = 1;
  EXPECT_EQ(solve_lp(p, o).status, Status::iteration_limit);
}

}  // namespace
}  // namespace mmgcoop::lp
