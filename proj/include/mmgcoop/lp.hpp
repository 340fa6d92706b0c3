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

// Bounded-variable simplex for
//
//     min c'x   s.t.  L <= A x <= U,   l <= x <= u.
//
// Every row r gets a logical variable s_r = a_r' x carrying the row bounds,
// so the working system is [A  -I] (x, s) = 0 with all variables boxed
// (possibly by infinities). The basis inverse is held explicitly and updated
// by rank-one eta steps; it is rebuilt from scratch every few dozen pivots.
//
// Cold starts run the primal simplex with a composite phase 1 (minimize the
// sum of bound violations of basic variables). Warm starts after bound
// changes or appended rows keep dual feasibility, so they run the dual
// simplex first and hand over to the primal for the final check.

#ifndef MMGCOOP_LP_HPP
#define MMGCOOP_LP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace mmgcoop::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  std::vector<int> index;
  std::vector<double> value;
  double lower = -kInf;
  double upper = kInf;
  std::string name;

  void add(int col, double coef) {
    index.push_back(col);
    value.push_back(coef);
  }

  double activity(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x[index[k]];
    return s;
  }
};

struct Problem {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> col_names;
  std::vector<Row> rows;

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_column(double c, double lo, double hi, std::string name = {}) {
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    col_names.push_back(std::move(name));
    return num_cols() - 1;
  }

  int add_row(Row r) {
    rows.push_back(std::move(r));
    return num_rows() - 1;
  }

  double objective(std::span<const double> x) const {
    double s = 0.0;
    for (int j = 0; j < num_cols(); ++j) s += cost[j] * x[j];
    return s;
  }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "?";
}

enum class VarState : std::uint8_t { basic, at_lower, at_upper, at_zero };

struct Basis {
  std::vector<VarState> cols;
  std::vector<VarState> rows;  // states of the row logicals
};

struct Options {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  long iteration_limit = 0;  // 0: automatic
  bool bland = false;        // smallest-index pricing from the start
};

class Simplex {
 public:
  explicit Simplex(const Problem& p, Options opts = {}) : opts_(opts) {
    n_ = p.num_cols();
    if (static_cast<int>(p.lower.size()) != n_ || static_cast<int>(p.upper.size()) != n_) {
      throw std::invalid_argument("lp: bound vectors do not match the column count");
    }
    cost_ = p.cost;
    lo_ = p.lower;
    up_ = p.upper;
    cols_.assign(static_cast<std::size_t>(n_), {});
    state_.resize(static_cast<std::size_t>(n_));
    x_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(cost_[j])) throw std::invalid_argument("lp: non-finite cost");
      if (lo_[j] > up_[j]) throw std::invalid_argument("lp: column lower bound above upper");
      state_[j] = default_state(j);
      x_[j] = nonbasic_value(j);
    }
    for (const Row& r : p.rows) append_row(r);
    head_.clear();
    for (int i = 0; i < m_; ++i) head_.push_back(n_ + i);
    refresh_positions();
    refactor();
  }

  int num_cols() const { return n_; }
  int num_rows() const { return m_; }
  long iterations() const { return iterations_; }

  // Changes the box of a structural column. Nonbasic columns move to the
  // corresponding bound; basic columns may become primal infeasible.
  void set_bounds(int col, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("lp: lower bound above upper");
    lo_[col] = lo;
    up_[col] = hi;
    if (state_[col] != VarState::basic) {
      VarState s = state_[col];
      if (s == VarState::at_lower && !std::isfinite(lo)) s = default_state(col);
      if (s == VarState::at_upper && !std::isfinite(hi)) s = default_state(col);
      if (s == VarState::at_zero) s = default_state(col);
      state_[col] = s;
      x_[col] = nonbasic_value(col);
      xb_dirty_ = true;
    }
  }

  double lower(int col) const { return lo_[col]; }
  double upper(int col) const { return up_[col]; }

  // Appends a row with its logical basic; the basis stays dual feasible.
  int add_row(const Row& r) {
    const int old_m = m_;
    append_row(r);
    const int logical = n_ + old_m;
    head_.push_back(logical);
    refresh_positions();
    // The bordered basis [B 0; w -1] keeps every existing basic value.
    refactor_keep_values();
    xb_dirty_ = true;
    return m_ - 1;
  }

  // Deletes rows; the basis is rebuilt (and repaired if needed).
  void remove_rows(std::vector<int> rows) {
    if (rows.empty()) return;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::vector<char> drop(static_cast<std::size_t>(m_), 0);
    for (int r : rows) drop[r] = 1;

    std::vector<int> new_index(static_cast<std::size_t>(m_), -1);
    int next = 0;
    for (int r = 0; r < m_; ++r) {
      if (!drop[r]) new_index[r] = next++;
    }
    for (auto& col : cols_) {
      std::erase_if(col, [&](const Entry& e) { return drop[e.row] != 0; });
      for (Entry& e : col) e.row = new_index[e.row];
    }
    std::vector<Row> kept_rows;
    std::vector<double> lo(lo_.begin(), lo_.begin() + n_), up(up_.begin(), up_.begin() + n_);
    std::vector<VarState> st(state_.begin(), state_.begin() + n_);
    std::vector<double> x(x_.begin(), x_.begin() + n_);
    for (int r = 0; r < m_; ++r) {
      if (drop[r]) continue;
      kept_rows.push_back(std::move(rows_[r]));
      lo.push_back(lo_[n_ + r]);
      up.push_back(up_[n_ + r]);
      st.push_back(state_[n_ + r]);
      x.push_back(x_[n_ + r]);
    }
    rows_ = std::move(kept_rows);
    lo_ = std::move(lo);
    up_ = std::move(up);
    state_ = std::move(st);
    x_ = std::move(x);
    m_ = next;
    rebuild_head_from_states();
    refactor();
  }

  Basis basis() const {
    Basis b;
    b.cols.assign(state_.begin(), state_.begin() + n_);
    b.rows.assign(state_.begin() + n_, state_.end());
    return b;
  }

  void set_basis(const Basis& b) {
    if (static_cast<int>(b.cols.size()) != n_ || static_cast<int>(b.rows.size()) != m_) {
      throw std::invalid_argument("lp: basis dimensions do not match the problem");
    }
    for (int j = 0; j < n_; ++j) state_[j] = b.cols[j];
    for (int r = 0; r < m_; ++r) state_[n_ + r] = b.rows[r];
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::basic) continue;
      if ((state_[j] == VarState::at_lower && !std::isfinite(lo_[j])) ||
          (state_[j] == VarState::at_upper && !std::isfinite(up_[j])) ||
          (state_[j] == VarState::at_zero && (std::isfinite(lo_[j]) || std::isfinite(up_[j])))) {
        state_[j] = default_state(j);
      }
      x_[j] = nonbasic_value(j);
    }
    rebuild_head_from_states();
    refactor();
  }

  Status solve() {
    const long limit = opts_.iteration_limit > 0 ? opts_.iteration_limit
                                                 : 50L * (n_ + m_) + 20000;
    iteration_cap_ = iterations_ + limit;
    if (xb_dirty_) compute_xb();

    Status st = Status::optimal;
    for (int attempt = 0; attempt < 4; ++attempt) {
      flip_boxed_to_dual_feasible();
      if (primal_infeasibility() > opts_.primal_tol && dual_feasible()) {
        st = dual_loop();
        if (st == Status::iteration_limit) return status_ = st;
      }
      st = primal_loop();
      if (st != Status::optimal) return status_ = st;
      // Re-derive the primal values from a fresh inverse and confirm.
      refactor();
      if (primal_infeasibility() <= 10.0 * opts_.primal_tol && dual_feasible()) {
        return status_ = Status::optimal;
      }
    }
    return status_ = Status::numerical_failure;
  }

  Status status() const { return status_; }

  double objective() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
    return s;
  }

  std::vector<double> primal() const { return {x_.begin(), x_.begin() + n_}; }
  double value(int col) const { return x_[col]; }

  double row_value(int r) const {
    return rows_[r].activity(std::span<const double>(x_.data(), static_cast<std::size_t>(n_)));
  }

  bool row_is_basic(int r) const { return state_[n_ + r] == VarState::basic; }
  const Row& row(int r) const { return rows_[r]; }

  // Row duals y with reduced costs d = c - A'y for the structural columns.
  std::vector<double> duals() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = var_cost(head_[i]);
    Eigen::VectorXd y = btran(std::move(cb));
    return {y.data(), y.data() + y.size()};
  }

 private:
  struct Entry {
    int row;
    double val;
  };

  void append_row(const Row& r) {
    if (r.index.size() != r.value.size()) throw std::invalid_argument("lp: malformed row");
    if (r.lower > r.upper) throw std::invalid_argument("lp: row lower bound above upper");
    const int idx = m_++;
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      const int j = r.index[k];
      if (j < 0 || j >= n_) throw std::invalid_argument("lp: row references unknown column");
      if (!std::isfinite(r.value[k])) throw std::invalid_argument("lp: non-finite coefficient");
      if (r.value[k] != 0.0) cols_[j].push_back({idx, r.value[k]});
    }
    rows_.push_back(r);
    lo_.push_back(r.lower);
    up_.push_back(r.upper);
    state_.push_back(VarState::basic);
    x_.push_back(0.0);
    pos_.push_back(-1);
  }

  VarState default_state(int j) const {
    if (std::isfinite(lo_[j])) return VarState::at_lower;
    if (std::isfinite(up_[j])) return VarState::at_upper;
    return VarState::at_zero;
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case VarState::at_lower: return lo_[j];
      case VarState::at_upper: return up_[j];
      default: return 0.0;
    }
  }

  double var_cost(int j) const { return j < n_ ? cost_[j] : 0.0; }

  double dot_column(const Eigen::VectorXd& y, int j) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (const Entry& e : cols_[j]) s += y[e.row] * e.val;
    return s;
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    if (j >= n_) {
      a[j - n_] = -1.0;
    } else {
      for (const Entry& e : cols_[j]) a[e.row] += e.val;
    }
    return solve_basis(std::move(a));
  }

  void refresh_positions() {
    pos_.assign(static_cast<std::size_t>(n_ + m_), -1);
    for (int i = 0; i < m_; ++i) pos_[head_[i]] = i;
  }

  void rebuild_head_from_states() {
    head_.clear();
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::basic) head_.push_back(j);
    }
    refresh_positions();
  }

  Eigen::MatrixXd basis_matrix(const std::vector<int>& vars) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, static_cast<Eigen::Index>(vars.size()));
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const int j = vars[i];
      if (j >= n_) {
        b(j - n_, static_cast<Eigen::Index>(i)) = -1.0;
      } else {
        for (const Entry& e : cols_[j]) b(e.row, static_cast<Eigen::Index>(i)) = e.val;
      }
    }
    return b;
  }

  // Keeps a maximal independent subset of the current basic set (in order)
  // and completes it with row logicals.
  void repair_basis() {
    Eigen::MatrixXd w = basis_matrix(head_);
    std::vector<char> row_used(static_cast<std::size_t>(m_), 0);
    std::vector<int> kept;
    for (std::size_t c = 0; c < head_.size(); ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      double best = 0.0;
      int best_row = -1;
      double scale = 0.0;
      for (int i = 0; i < m_; ++i) {
        scale = std::max(scale, std::abs(w(i, ci)));
        if (row_used[i]) continue;
        if (std::abs(w(i, ci)) > best) {
          best = std::abs(w(i, ci));
          best_row = i;
        }
      }
      if (best_row < 0 || best <= 1e-9 * std::max(1.0, scale) ||
          static_cast<int>(kept.size()) >= m_) {
        const int j = head_[c];
        state_[j] = default_state(j);
        if (state_[j] == VarState::at_lower && x_[j] > up_[j]) state_[j] = VarState::at_upper;
        x_[j] = nonbasic_value(j);
        continue;
      }
      row_used[best_row] = 1;
      kept.push_back(head_[c]);
      const double piv = w(best_row, ci);
      for (auto c2 = ci + 1; c2 < w.cols(); ++c2) {
        const double f = w(best_row, c2) / piv;
        if (f == 0.0) continue;
        for (int i = 0; i < m_; ++i) {
          if (!row_used[i]) w(i, c2) -= f * w(i, ci);
        }
      }
    }
    for (int i = 0; i < m_; ++i) {
      if (!row_used[i]) {
        const int logical = n_ + i;
        kept.push_back(logical);
        state_[logical] = VarState::basic;
      }
    }
    head_ = std::move(kept);
    std::sort(head_.begin(), head_.end());
    refresh_positions();
  }

  Eigen::SparseMatrix<double> sparse_basis() const {
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      if (j >= n_) {
        trip.emplace_back(j - n_, i, -1.0);
      } else {
        for (const Entry& e : cols_[j]) trip.emplace_back(e.row, i, e.val);
      }
    }
    Eigen::SparseMatrix<double> b(m_, m_);
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
  }

  // Factorizes the current basis. Accepted only if a test solve reproduces
  // a known vector, which screens out ill-conditioned bases.
  bool factor_basis() {
    const Eigen::SparseMatrix<double> b = sparse_basis();
    auto lu = std::make_unique<SparseLu>();
    lu->analyzePattern(b);
    lu->factorize(b);
    if (lu->info() != Eigen::Success) return false;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m_);
    const Eigen::VectorXd rhs = b * ones;
    const Eigen::VectorXd back = lu->solve(rhs);
    if (lu->info() != Eigen::Success || !back.allFinite()) return false;
    // Backward error must be at rounding level; the forward error may grow
    // with the condition number but not without bound.
    double norm_b = 0.0;
    for (int k = 0; k < b.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(b, k); it; ++it) {
        norm_b = std::max(norm_b, std::abs(it.value()));
      }
    }
    const double residual = (b * back - rhs).cwiseAbs().maxCoeff();
    if (residual > 1e-9 * (norm_b * back.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff())) {
      return false;
    }
    if ((back - ones).cwiseAbs().maxCoeff() > 1e-3) return false;
    lu_ = std::move(lu);
    etas_.clear();
    return true;
  }

  // Every row's logical basic: B = -I always factors.
  void slack_basis() {
    for (int j = 0; j < n_; ++j) {
      if (state_[j] != VarState::basic) continue;
      state_[j] = default_state(j);
      if (state_[j] == VarState::at_lower && x_[j] > up_[j]) state_[j] = VarState::at_upper;
      x_[j] = nonbasic_value(j);
    }
    for (int r = 0; r < m_; ++r) state_[n_ + r] = VarState::basic;
    rebuild_head_from_states();
  }

  void refactor_keep_values() {
    updates_ = 0;
    if (m_ == 0) {
      lu_.reset();
      etas_.clear();
      return;
    }
    if (static_cast<int>(head_.size()) == m_ && factor_basis()) return;
    repair_basis();
    if (factor_basis()) return;
    slack_basis();
    if (!factor_basis()) throw std::logic_error("lp: slack basis failed to factor");
  }

  void refactor() {
    refactor_keep_values();
    compute_xb();
  }

  // x = B^-1 v, with B = B0 E1 ... Ek.
  Eigen::VectorXd solve_basis(Eigen::VectorXd v) const {
    if (m_ == 0) return v;
    v = lu_->solve(v);
    for (const Eta& e : etas_) {
      const double xr = v[e.r] / e.pivot;
      if (xr != 0.0) {
        for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * xr;
      }
      v[e.r] = xr;
    }
    return v;
  }

  // y = B^-T v.
  Eigen::VectorXd btran(Eigen::VectorXd v) const {
    if (m_ == 0) return v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->r];
      for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
      v[it->r] = s / it->pivot;
    }
    return lu_->transpose().solve(v);
  }

  void compute_xb() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_; ++j) {
      if (state_[j] == VarState::basic || x_[j] == 0.0) continue;
      for (const Entry& e : cols_[j]) rhs[e.row] -= e.val * x_[j];
    }
    for (int r = 0; r < m_; ++r) {
      const int j = n_ + r;
      if (state_[j] != VarState::basic) rhs[r] += x_[j];
    }
    const Eigen::VectorXd xb = solve_basis(std::move(rhs));
    for (int i = 0; i < m_; ++i) x_[head_[i]] = xb[i];
    xb_dirty_ = false;
  }

  double violation(int j) const {
    if (x_[j] < lo_[j]) return lo_[j] - x_[j];
    if (x_[j] > up_[j]) return x_[j] - up_[j];
    return 0.0;
  }

  double primal_infeasibility() const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) worst = std::max(worst, violation(head_[i]));
    return worst;
  }

  Eigen::VectorXd phase2_duals() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = var_cost(head_[i]);
    return btran(std::move(cb));
  }

  bool dual_feasible() const {
    const Eigen::VectorXd y = phase2_duals();
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::basic || lo_[j] == up_[j]) continue;
      const double d = var_cost(j) - dot_column(y, j);
      if (state_[j] == VarState::at_lower && d < -opts_.dual_tol) return false;
      if (state_[j] == VarState::at_upper && d > opts_.dual_tol) return false;
      if (state_[j] == VarState::at_zero && std::abs(d) > opts_.dual_tol) return false;
    }
    return true;
  }

  // Boxed nonbasic columns whose reduced cost has the wrong sign move to
  // the opposite bound; this keeps the dual simplex usable after bound changes.
  void flip_boxed_to_dual_feasible() {
    const Eigen::VectorXd y = phase2_duals();
    bool moved = false;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::basic || lo_[j] == up_[j]) continue;
      if (!std::isfinite(lo_[j]) || !std::isfinite(up_[j])) continue;
      const double d = var_cost(j) - dot_column(y, j);
      if (state_[j] == VarState::at_lower && d < -opts_.dual_tol) {
        state_[j] = VarState::at_upper;
      } else if (state_[j] == VarState::at_upper && d > opts_.dual_tol) {
        state_[j] = VarState::at_lower;
      } else {
        continue;
      }
      x_[j] = nonbasic_value(j);
      moved = true;
    }
    if (moved) compute_xb();
  }

  // B^-1 <- E B^-1 for entering column `alpha` at basis position r.
  void pivot(int r, int entering, const Eigen::VectorXd& alpha) {
    const int leaving = head_[r];
    Eta eta;
    eta.r = r;
    eta.pivot = alpha[r];
    for (int i = 0; i < m_; ++i) {
      if (i != r && std::abs(alpha[i]) > 1e-13) {
        eta.index.push_back(i);
        eta.value.push_back(alpha[i]);
      }
    }
    etas_.push_back(std::move(eta));
    head_[r] = entering;
    pos_[leaving] = -1;
    pos_[entering] = r;
    state_[entering] = VarState::basic;
    ++updates_;
    ++iterations_;
    // A pivot that is tiny next to the rest of its column amplifies the
    // error already in the factors; start over from the new basis.
    if (std::abs(alpha[r]) < 1e-5 * alpha.cwiseAbs().maxCoeff()) refactor();
  }

  Status primal_loop() {
    const double ptol = opts_.primal_tol;
    const double dtol = opts_.dual_tol;
    const double pivtol = opts_.pivot_tol;
    bool bland = opts_.bland;
    int degenerate_run = 0;
    Eigen::VectorXd cb(m_);

    for (;;) {
      if (iterations_ >= iteration_cap_) return Status::iteration_limit;
      if (updates_ >= opts_.refactor_interval) refactor();

      bool phase1 = false;
      for (int i = 0; i < m_ && !phase1; ++i) phase1 = violation(head_[i]) > ptol;
      for (int i = 0; i < m_; ++i) {
        const int j = head_[i];
        if (phase1) {
          cb[i] = x_[j] < lo_[j] - ptol ? -1.0 : (x_[j] > up_[j] + ptol ? 1.0 : 0.0);
        } else {
          cb[i] = var_cost(j);
        }
      }
      const Eigen::VectorXd y = btran(cb);

      int q = -1;
      double dq = 0.0;
      double best = 0.0;
      for (int j = 0; j < n_ + m_; ++j) {
        const VarState s = state_[j];
        if (s == VarState::basic || lo_[j] == up_[j]) continue;
        const double d = (phase1 ? 0.0 : var_cost(j)) - dot_column(y, j);
        const bool up_ok = d < -dtol && (s == VarState::at_lower || s == VarState::at_zero);
        const bool down_ok = d > dtol && (s == VarState::at_upper || s == VarState::at_zero);
        if (!up_ok && !down_ok) continue;
        if (bland) {
          q = j;
          dq = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dq = d;
        }
      }
      if (q < 0) return phase1 ? Status::infeasible : Status::optimal;

      const double dir = dq < 0.0 ? 1.0 : -1.0;
      const Eigen::VectorXd alpha = ftran(q);

      // Harris two-pass ratio test over the basic variables.
      auto target_of = [&](int i, double rate, double& target) {
        const int j = head_[i];
        if (rate < 0.0) {
          if (phase1 && x_[j] > up_[j] + ptol) {
            target = up_[j];
            return true;
          }
          if (x_[j] >= lo_[j] - ptol && std::isfinite(lo_[j])) {
            target = lo_[j];
            return true;
          }
        } else {
          if (phase1 && x_[j] < lo_[j] - ptol) {
            target = lo_[j];
            return true;
          }
          if (x_[j] <= up_[j] + ptol && std::isfinite(up_[j])) {
            target = up_[j];
            return true;
          }
        }
        return false;
      };

      double theta_max = kInf;
      for (int i = 0; i < m_; ++i) {
        const double rate = -dir * alpha[i];
        if (std::abs(rate) <= pivtol) continue;
        double target = 0.0;
        if (!target_of(i, rate, target)) continue;
        const double relaxed = (std::abs(x_[head_[i]] - target) + ptol) / std::abs(rate);
        theta_max = std::min(theta_max, relaxed);
      }
      int r = -1;
      double theta = kInf;
      double r_target = 0.0;
      if (std::isfinite(theta_max)) {
        double best_rate = 0.0;
        for (int i = 0; i < m_; ++i) {
          const double rate = -dir * alpha[i];
          if (std::abs(rate) <= pivtol) continue;
          double target = 0.0;
          if (!target_of(i, rate, target)) continue;
          const double step = (target - x_[head_[i]]) / rate;
          if (step > theta_max) continue;
          if (bland ? (r < 0 || head_[i] < head_[r]) : std::abs(rate) > best_rate) {
            best_rate = std::abs(rate);
            r = i;
            theta = std::max(0.0, step);
            r_target = target;
          }
        }
      }

      const double range = up_[q] - lo_[q];
      if (std::isfinite(range) && range <= theta) {
        // Bound flip, no basis change.
        for (int i = 0; i < m_; ++i) x_[head_[i]] -= range * dir * alpha[i];
        state_[q] = dir > 0 ? VarState::at_upper : VarState::at_lower;
        x_[q] = nonbasic_value(q);
        ++iterations_;
        degenerate_run = 0;
        bland = opts_.bland;
        continue;
      }
      if (r < 0) {
        if (phase1) return Status::numerical_failure;
        return Status::unbounded;
      }

      if (theta <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = opts_.bland;
      }

      const int leaving = head_[r];
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= theta * dir * alpha[i];
      x_[q] += theta * dir;
      x_[leaving] = r_target;
      state_[leaving] = r_target == lo_[leaving] ? VarState::at_lower : VarState::at_upper;
      pivot(r, q, alpha);
    }
  }

  Status dual_loop() {
    const double ptol = opts_.primal_tol;
    const double dtol = opts_.dual_tol;
    const double pivtol = opts_.pivot_tol;
    bool bland = opts_.bland;
    int stall = 0;

    for (;;) {
      if (iterations_ >= iteration_cap_) return Status::iteration_limit;
      if (updates_ >= opts_.refactor_interval) refactor();

      int r = -1;
      double worst = ptol;
      for (int i = 0; i < m_; ++i) {
        const double v = violation(head_[i]);
        if (v <= ptol) continue;
        if (bland ? (r < 0 || head_[i] < head_[r]) : v > worst) {
          worst = v;
          r = i;
        }
      }
      if (r < 0) return Status::optimal;

      const int leaving = head_[r];
      const bool increase = x_[leaving] < lo_[leaving];
      const double target = increase ? lo_[leaving] : up_[leaving];

      const Eigen::VectorXd y = phase2_duals();
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(m_);
      unit[r] = 1.0;
      const Eigen::VectorXd rho = btran(std::move(unit));

      // Harris two-pass dual ratio test.
      struct Candidate {
        int j;
        double a;
        double d;
      };
      std::vector<Candidate> cands;
      double theta_max = kInf;
      for (int j = 0; j < n_ + m_; ++j) {
        const VarState s = state_[j];
        if (s == VarState::basic || lo_[j] == up_[j]) continue;
        const double a = dot_column(rho, j);
        if (std::abs(a) <= pivtol) continue;
        bool ok = false;
        if (s == VarState::at_zero) {
          ok = true;
        } else if (increase) {
          ok = (s == VarState::at_lower && a < 0.0) || (s == VarState::at_upper && a > 0.0);
        } else {
          ok = (s == VarState::at_lower && a > 0.0) || (s == VarState::at_upper && a < 0.0);
        }
        if (!ok) continue;
        const double d = var_cost(j) - dot_column(y, j);
        cands.push_back({j, a, d});
        theta_max = std::min(theta_max, (std::abs(d) + dtol) / std::abs(a));
      }
      if (cands.empty()) return Status::infeasible;

      int q = -1;
      double best_a = 0.0;
      for (const Candidate& c : cands) {
        if (std::abs(c.d) / std::abs(c.a) > theta_max) continue;
        if (bland ? (q < 0 || c.j < q) : std::abs(c.a) > best_a) {
          best_a = std::abs(c.a);
          q = c.j;
        }
      }
      if (q < 0) return Status::numerical_failure;

      const Eigen::VectorXd alpha = ftran(q);
      if (std::abs(alpha[r]) <= pivtol) {
        refactor();
        if (++stall > 20) return Status::numerical_failure;
        continue;
      }
      const double step = (x_[leaving] - target) / alpha[r];
      if (std::abs(step) <= 1e-12) {
        if (++stall > 50) bland = true;
      } else {
        stall = 0;
        bland = opts_.bland;
      }
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= alpha[i] * step;
      x_[q] += step;
      x_[leaving] = target;
      state_[leaving] = increase ? VarState::at_lower : VarState::at_upper;
      pivot(r, q, alpha);
    }
  }

  Options opts_;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<std::vector<Entry>> cols_;
  std::vector<Row> rows_;
  std::vector<VarState> state_;
  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<int> pos_;
  using SparseLu = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;
  struct Eta {
    int r = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };
  std::unique_ptr<SparseLu> lu_;
  std::vector<Eta> etas_;
  int updates_ = 0;
  long iterations_ = 0;
  long iteration_cap_ = 0;
  bool xb_dirty_ = true;
  Status status_ = Status::numerical_failure;
};

// One-shot convenience wrapper.
struct LpSolution {
  Status status = Status::numerical_failure;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

inline LpSolution solve_lp(const Problem& p, Options opts = {}) {
  Simplex s(p, opts);
  LpSolution out;
  out.status = s.solve();
  out.iterations = s.iterations();
  if (out.status == Status::optimal) {
    out.x = s.primal();
    out.objective = s.objective();
  }
  return out;
}

}  // namespace mmgcoop::lp

#endif  // MMGCOOP_LP_HPP
