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

// Price-risk model: an exponentially weighted covariance of day-ahead price
// forecast errors, the quadratic risk it induces on a traded-power profile,
// and supporting hyperplanes of that quadratic.

#ifndef MMGCOOP_UNCERTAINTY_HPP
#define MMGCOOP_UNCERTAINTY_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmgcoop/errors.hpp"
#include "mmgcoop/scenario.hpp"

namespace mmgcoop {

inline constexpr double kPsdEigenvalueFloor = -1e-9;
inline constexpr double kPositiveDefinitePivot = 1e-10;

struct CovarianceEstimate {
  Eigen::MatrixXd matrix;  // T x T, ($/kWh)^2
  double alpha = 0.0;
  int days_used = 0;
  bool positive_definite = false;
  double smallest_pivot = 0.0;  // of a pivoted LDL^T factorization

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

// Smallest diagonal entry of D in a pivoted LDL^T factorization.
inline double smallest_ldlt_pivot(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  return ldlt.vectorD().minCoeff();
}

inline CovarianceEstimate covariance_from_matrix(Eigen::MatrixXd m, double alpha = 0.0,
                                                 int days = 0) {
  if (m.rows() != m.cols()) throw DimensionError("covariance matrix must be square");
  CovarianceEstimate est;
  est.matrix = std::move(m);
  est.alpha = alpha;
  est.days_used = days;
  est.smallest_pivot = smallest_ldlt_pivot(est.matrix);
  est.positive_definite = est.smallest_pivot > kPositiveDefinitePivot;
  return est;
}

// Weighted sum of outer products of daily forecast errors e_d = actual - forecast.
// The newest day carries weight (1 - alpha), the one before (1 - alpha) alpha,
// and so on; 0^0 is taken as 1 so alpha = 0 keeps only the newest day.
inline CovarianceEstimate estimate_covariance(const PriceHistory& h) {
  if (h.days.empty()) throw std::invalid_argument("price history has no days");
  if (!(h.alpha >= 0.0 && h.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  const std::size_t n = h.days.front().actual.size();
  for (std::size_t d = 0; d < h.days.size(); ++d) {
    if (h.days[d].actual.size() != n || h.days[d].forecast.size() != n) {
      throw DimensionError("price history day " + std::to_string(d + 1) +
                           ": actual and forecast must both have " + std::to_string(n) +
                           " values");
    }
  }

  const auto num_days = static_cast<int>(h.days.size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  Eigen::VectorXd e(static_cast<Eigen::Index>(n));
  double decay = 1.0;  // alpha^(i-1)
  for (int i = 1; i <= num_days; ++i) {
    const HistoryDay& day = h.days[static_cast<std::size_t>(num_days - i)];
    for (std::size_t t = 0; t < n; ++t) {
      e[static_cast<Eigen::Index>(t)] = day.actual[t] - day.forecast[t];
    }
    v.selfadjointView<Eigen::Lower>().rankUpdate(e, (1.0 - h.alpha) * decay);
    decay *= h.alpha;
  }
  v.triangularView<Eigen::StrictlyUpper>() = v.transpose();

  CovarianceEstimate est = covariance_from_matrix(std::move(v), h.alpha, num_days);
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.matrix, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, est.matrix.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < kPsdEigenvalueFloor * scale) {
      throw std::logic_error("covariance estimate lost positive semidefiniteness");
    }
  }
  return est;
}

inline void check_dimension(const CovarianceEstimate& v, std::size_t n) {
  if (static_cast<std::size_t>(v.dimension()) != n) {
    throw DimensionError("power vector has " + std::to_string(n) +
                         " entries, covariance is " + std::to_string(v.dimension()) + "x" +
                         std::to_string(v.dimension()));
  }
}

// p' V p.
inline double risk_value(const CovarianceEstimate& v, std::span<const double> p) {
  check_dimension(v, p.size());
  const Eigen::Map<const Eigen::VectorXd> x(p.data(), static_cast<Eigen::Index>(p.size()));
  const double r = x.dot(v.matrix * x);
  return r < 0.0 && r > -1e-12 * (1.0 + x.squaredNorm()) ? 0.0 : r;
}

// Tangent plane of p' V p at p0:  z >= coefficients . p + offset.
struct LinearCut {
  std::vector<double> coefficients;
  double offset = 0.0;

  double evaluate(std::span<const double> p) const {
    double s = offset;
    for (std::size_t i = 0; i < p.size(); ++i) s += coefficients[i] * p[i];
    return s;
  }
};

inline LinearCut risk_cut(const CovarianceEstimate& v, std::span<const double> p0) {
  check_dimension(v, p0.size());
  const Eigen::Map<const Eigen::VectorXd> x(p0.data(), static_cast<Eigen::Index>(p0.size()));
  const Eigen::VectorXd grad = 2.0 * (v.matrix * x);
  LinearCut cut;
  cut.coefficients.assign(grad.data(), grad.data() + grad.size());
  cut.offset = -0.5 * grad.dot(x);
  return cut;
}

}  // namespace mmgcoop

#endif  // MMGCOOP_UNCERTAINTY_HPP
