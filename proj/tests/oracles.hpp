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

// Independent reference implementations used as test oracles. Each one is
// deliberately naive and shares no code path with the library routine it
// checks.

#ifndef MMGCOOP_TESTS_ORACLES_HPP
#define MMGCOOP_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mmgcoop/lp.hpp"
#include "mmgcoop/mip.hpp"

namespace testing_oracles {

using mmgcoop::lp::kInf;
using mmgcoop::lp::Problem;
using mmgcoop::lp::Row;

// Random LP with finite column boxes and `m` two-sided or one-sided rows.
inline Problem random_box_lp(std::mt19937& rng, int n, int m) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> box(0.5, 4.0);
  std::uniform_int_distribution<int> kind(0, 3);
  Problem p;
  for (int j = 0; j < n; ++j) {
    const double lo = std::round(coef(rng));
    p.add_column(std::round(coef(rng) * 2.0) / 2.0, lo, lo + std::round(box(rng)));
  }
  for (int i = 0; i < m; ++i) {
    Row r;
    for (int j = 0; j < n; ++j) {
      const double a = std::round(coef(rng));
      if (a != 0.0) r.add(j, a);
    }
    const double rhs = std::round(coef(rng) * 2.0);
    switch (kind(rng)) {
      case 0: r.upper = rhs; break;
      case 1: r.lower = rhs; break;
      case 2: r.lower = rhs - 1.0; r.upper = rhs + 1.0; break;
      default: r.lower = r.upper = rhs; break;
    }
    p.add_row(r);
  }
  return p;
}

inline double max_violation(const Problem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < p.num_cols(); ++j) {
    worst = std::max({worst, p.lower[j] - x[j], x[j] - p.upper[j]});
  }
  for (const Row& r : p.rows) {
    const double a = r.activity(x);
    worst = std::max({worst, r.lower - a, a - r.upper});
  }
  return worst;
}

// Minimum over all basic feasible points: every choice of n linearly
// independent tight constraints among bounds and row sides. Requires finite
// column boxes (so the feasible set, if nonempty, has a vertex).
inline std::optional<double> vertex_enumeration(const Problem& p) {
  const int n = p.num_cols();
  struct Hyperplane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Hyperplane> planes;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[j] = 1.0;
    planes.push_back({a, p.lower[j]});
    planes.push_back({a, p.upper[j]});
  }
  for (const Row& r : p.rows) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < r.index.size(); ++k) a[r.index[k]] += r.value[k];
    if (std::isfinite(r.lower)) planes.push_back({a, r.lower});
    if (std::isfinite(r.upper) && r.upper != r.lower) planes.push_back({a, r.upper});
  }
  const int k = static_cast<int>(planes.size());
  std::vector<int> choose(static_cast<std::size_t>(n));
  std::iota(choose.begin(), choose.end(), 0);
  std::optional<double> best;
  if (k < n) return best;
  for (;;) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      a.row(i) = planes[choose[i]].a.transpose();
      b[i] = planes[choose[i]].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == n) {
      const Eigen::VectorXd v = lu.solve(b);
      std::vector<double> x(v.data(), v.data() + n);
      if (max_violation(p, x) <= 1e-9) {
        const double obj = p.objective(x);
        if (!best || obj < *best) best = obj;
      }
    }
    int i = n - 1;
    while (i >= 0 && choose[i] == k - n + i) --i;
    if (i < 0) break;
    ++choose[i];
    for (int j = i + 1; j < n; ++j) choose[j] = choose[j - 1] + 1;
  }
  return best;
}

// Random MIP with `nb` binaries and `nc` boxed continuous columns. Row sides
// are placed around a random point, so every instance is feasible.
inline mmgcoop::MipProblem random_mip(std::mt19937& rng, int nb, int nc, int m) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  mmgcoop::MipProblem mp;
  Problem& p = mp.lp;
  std::vector<double> x0;
  for (int j = 0; j < nb; ++j) {
    p.add_column(std::round(coef(rng) * 2.0) / 2.0, 0.0, 1.0);
    mp.integer_cols.push_back(j);
    x0.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
  }
  for (int j = 0; j < nc; ++j) {
    const double lo = std::round(coef(rng));
    const double hi = lo + 1.0 + std::round(2.0 * unit(rng));
    p.add_column(std::round(coef(rng) * 2.0) / 2.0, lo, hi);
    x0.push_back(lo + (hi - lo) * unit(rng));
  }
  for (int i = 0; i < m; ++i) {
    Row r;
    double a0 = 0.0;
    for (int j = 0; j < nb + nc; ++j) {
      const double a = std::round(coef(rng));
      if (a != 0.0) r.add(j, a);
      a0 += a * x0[static_cast<std::size_t>(j)];
    }
    if (unit(rng) < 0.5) {
      r.upper = std::ceil(a0);
    } else {
      r.lower = std::floor(a0);
    }
    p.add_row(r);
  }
  return mp;
}

// Minimum over all 2^nb binary patterns of the LP in the continuous columns,
// each solved by vertex enumeration. Binaries must be the leading columns.
inline std::optional<double> mip_enumeration(const mmgcoop::MipProblem& mp) {
  const Problem& p = mp.lp;
  const int nb = static_cast<int>(mp.integer_cols.size());
  const int nc = p.num_cols() - nb;
  std::optional<double> best;
  for (std::uint32_t pat = 0; pat < (1u << nb); ++pat) {
    Problem q;
    double fixed_cost = 0.0;
    for (int j = 0; j < nb; ++j) fixed_cost += p.cost[j] * ((pat >> j) & 1u);
    for (int j = 0; j < nc; ++j) q.add_column(p.cost[nb + j], p.lower[nb + j], p.upper[nb + j]);
    for (const Row& r : p.rows) {
      Row s;
      double shift = 0.0;
      for (std::size_t k = 0; k < r.index.size(); ++k) {
        const int j = r.index[k];
        if (j < nb) {
          shift += r.value[k] * ((pat >> j) & 1u);
        } else {
          s.add(j - nb, r.value[k]);
        }
      }
      s.lower = r.lower - shift;
      s.upper = r.upper - shift;
      q.add_row(s);
    }
    const auto v = vertex_enumeration(q);
    if (v && (!best || *v + fixed_cost < *best)) best = *v + fixed_cost;
  }
  return best;
}

// Covariance by explicit triple loop: V_ab = sum_i (1-a) a^(i-1) e_i[a] e_i[b],
// where i = 1 is the newest day.
inline Eigen::MatrixXd covariance_triple_loop(const std::vector<std::vector<double>>& actual,
                                              const std::vector<std::vector<double>>& forecast,
                                              double alpha) {
  const int d = static_cast<int>(actual.size());
  const int t = static_cast<int>(actual.front().size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(t, t);
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      double s = 0.0;
      for (int i = 1; i <= d; ++i) {
        const int day = d - i;
        const double w = (1.0 - alpha) * std::pow(alpha, i - 1);
        s += w * (actual[day][a] - forecast[day][a]) * (actual[day][b] - forecast[day][b]);
      }
      v(a, b) = s;
    }
  }
  return v;
}

// Shapley value by averaging marginal costs over every join order.
// `value` is indexed by bitmask with value[0] = 0.
inline std::vector<double> shapley_by_orderings(const std::vector<double>& value, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  long count = 0;
  do {
    std::uint32_t mask = 0;
    for (int k : order) {
      const std::uint32_t next = mask | (1u << k);
      sum[k] += value[next] - value[mask];
      mask = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& s : sum) s /= static_cast<double>(count);
  return sum;
}

}  // namespace testing_oracles

#endif  // MMGCOOP_TESTS_ORACLES_HPP
