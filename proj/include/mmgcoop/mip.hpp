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

// LP-based branch-and-bound for mixed-binary programs whose objective may
// carry convex quadratic terms through epigraph columns z >= p' V p.
//
// Quadratic terms are handled by outer approximation: tangent planes of
// p' V p are appended as rows whenever an LP solution underestimates one.
// Tangent planes are valid everywhere, so cuts are global and shared by all
// nodes. A node is only accepted as incumbent after its epigraph gap has
// been closed to `cut_tol`, and the incumbent objective is re-evaluated
// with the exact quadratic.

#ifndef MMGCOOP_MIP_HPP
#define MMGCOOP_MIP_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmgcoop/lp.hpp"
#include "mmgcoop/uncertainty.hpp"

namespace mmgcoop {

// z >= p' V p, with z = column `epigraph_col` and p = columns `cols`.
struct QuadraticEpigraph {
  int epigraph_col = -1;
  std::vector<int> cols;
  CovarianceEstimate covariance;
  std::string name;

  std::vector<double> gather(std::span<const double> x) const {
    std::vector<double> p(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) p[i] = x[cols[i]];
    return p;
  }

  double exact(std::span<const double> x) const { return risk_value(covariance, gather(x)); }
};

struct MipProblem {
  lp::Problem lp;
  std::vector<int> integer_cols;
  std::vector<QuadraticEpigraph> epigraphs;

  // Objective with every epigraph column replaced by its quadratic.
  double exact_objective(std::span<const double> x) const {
    double obj = lp.objective(x);
    for (const auto& e : epigraphs) {
      obj += lp.cost[e.epigraph_col] * (e.exact(x) - x[e.epigraph_col]);
    }
    return obj;
  }
};

enum class BranchingRule { most_fractional, pseudo_cost };

struct SolverConfig {
  double mip_gap_rel = 1e-6;
  double feas_tol = 1e-6;
  double cut_tol = 1e-6;
  long node_limit = 1'000'000;
  double time_limit_seconds = 0.0;  // 0: none
  BranchingRule branching = BranchingRule::most_fractional;
  int max_cuts_per_epigraph = 200;
  int cut_rounds_fractional = 10;
  int cut_rounds_max = 2000;
  std::ostream* node_log = nullptr;
};

enum class MipStatus { optimal, feasible, infeasible, unbounded, limit };

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::optimal: return "optimal";
    case MipStatus::feasible: return "feasible";
    case MipStatus::infeasible: return "infeasible";
    case MipStatus::unbounded: return "unbounded";
    case MipStatus::limit: return "limit";
  }
  return "?";
}

struct MipResult {
  MipStatus status = MipStatus::infeasible;
  std::vector<double> x;             // incumbent, integer columns rounded
  double objective = lp::kInf;       // exact (quadratic) objective of x
  double epigraph_objective = lp::kInf;  // LP objective of x with its z values
  double bound = -lp::kInf;
  double gap = lp::kInf;
  long nodes_explored = 0;
  int cuts_added = 0;
  long lp_iterations = 0;
  std::vector<double> bound_history;  // global lower bound after each node

  bool has_incumbent() const { return !x.empty(); }
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const MipProblem& problem, const SolverConfig& cfg)
      : problem_(problem), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    base_rows_ = problem.lp.num_rows();
    root_lower_ = problem.lp.lower;
    root_upper_ = problem.lp.upper;
    is_integer_.assign(static_cast<std::size_t>(problem.lp.num_cols()), 0);
    for (int j : problem.integer_cols) is_integer_[j] = 1;
    pc_down_sum_.assign(problem.integer_cols.size(), 0.0);
    pc_up_sum_.assign(problem.integer_cols.size(), 0.0);
    pc_down_n_.assign(problem.integer_cols.size(), 0);
    pc_up_n_.assign(problem.integer_cols.size(), 0);
    lp_ = std::make_unique<lp::Simplex>(problem.lp);
  }

  MipResult run() {
    Node root;
    root.bound = -lp::kInf;
    root.id = next_id_++;
    open_.push_back(std::move(root));
    bool limit_hit = false;

    while (!open_.empty()) {
      if (cfg_.node_limit > 0 && result_.nodes_explored >= cfg_.node_limit) {
        limit_hit = true;
        break;
      }
      if (cfg_.time_limit_seconds > 0.0 && elapsed() > cfg_.time_limit_seconds) {
        limit_hit = true;
        break;
      }
      Node node = pop_node();
      if (has_incumbent() && node.bound >= prune_threshold()) {
        closed_by_gap_ = std::min(closed_by_gap_, node.bound);
        record_bound(node.bound);
        continue;
      }
      if (!process(node)) {
        limit_hit = true;
        break;
      }
      ++result_.nodes_explored;
      record_bound(node.bound);
      if (result_.status == MipStatus::unbounded) return finish(false);
    }
    return finish(limit_hit);
  }

 private:
  struct Change {
    int col;
    double lower;
    double upper;
  };

  struct Node {
    std::vector<Change> changes;
    double bound = -lp::kInf;
    int depth = 0;
    long id = 0;
    // Branching record for pseudo-costs.
    int branch_index = -1;  // index into integer_cols
    bool branch_up = false;
    double branch_frac = 0.0;
    double parent_obj = 0.0;
  };

  struct CutRecord {
    int epigraph;
  };

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool has_incumbent() const { return !result_.x.empty(); }

  double abs_gap(double ref) const { return cfg_.mip_gap_rel * std::max(1.0, std::abs(ref)); }

  double prune_threshold() const { return result_.objective - abs_gap(result_.objective); }

  Node pop_node() {
    if (!has_incumbent()) {
      Node n = std::move(open_.back());
      open_.pop_back();
      return n;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < open_.size(); ++i) {
      const Node& a = open_[i];
      const Node& b = open_[best];
      if (a.bound < b.bound || (a.bound == b.bound && a.id < b.id)) best = i;
    }
    Node n = std::move(open_[best]);
    open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(best));
    return n;
  }

  double open_min_bound() const {
    double lb = lp::kInf;
    for (const Node& n : open_) lb = std::min(lb, n.bound);
    return lb;
  }

  void record_bound(double current) {
    double lb = std::min(open_min_bound(), closed_by_gap_);
    if (has_incumbent()) lb = std::min(lb, result_.objective);
    if (!std::isfinite(lb) && !has_incumbent()) lb = current;
    if (!result_.bound_history.empty()) lb = std::max(lb, result_.bound_history.back());
    result_.bound_history.push_back(lb);
  }

  void apply_bounds(const Node& node) {
    for (int j : touched_) lp_->set_bounds(j, root_lower_[j], root_upper_[j]);
    touched_.clear();
    for (const Change& c : node.changes) {
      lp_->set_bounds(c.col, c.lower, c.upper);
      touched_.push_back(c.col);
    }
  }

  // Solves the node LP, separating tangent cuts. Returns the LP status and
  // sets `converged` when every epigraph gap is within tolerance.
  lp::Status solve_with_cuts(int max_rounds, bool& converged) {
    converged = problem_.epigraphs.empty();
    for (int round = 0;; ++round) {
      lp::Status st = lp_->solve();
      if (st == lp::Status::numerical_failure || st == lp::Status::iteration_limit) {
        st = cold_restart();
      }
      if (st != lp::Status::optimal || problem_.epigraphs.empty()) return st;

      const std::vector<double> x = lp_->primal();
      const double obj = lp_->objective();
      double total_gap = 0.0;
      std::vector<double> gaps(problem_.epigraphs.size(), 0.0);
      for (std::size_t e = 0; e < problem_.epigraphs.size(); ++e) {
        const auto& epi = problem_.epigraphs[e];
        gaps[e] = epi.exact(x) - x[epi.epigraph_col];
        total_gap += problem_.lp.cost[epi.epigraph_col] * std::max(0.0, gaps[e]);
      }
      // Gaps below rounding level of the quadratic itself cannot be cut off.
      double noise = 0.0;
      for (std::size_t e = 0; e < problem_.epigraphs.size(); ++e) {
        const auto& epi = problem_.epigraphs[e];
        noise += problem_.lp.cost[epi.epigraph_col] * 1e-13 * (1.0 + std::abs(x[epi.epigraph_col]));
      }
      const double tol = std::max(0.5 * cfg_.cut_tol * (1.0 + std::abs(obj)), noise);
      if (total_gap <= tol) {
        converged = true;
        return st;
      }
      if (round >= max_rounds) return st;

      for (std::size_t e = 0; e < problem_.epigraphs.size(); ++e) {
        const auto& epi = problem_.epigraphs[e];
        if (problem_.lp.cost[epi.epigraph_col] * gaps[e] <= 0.01 * tol) continue;
        add_cut(static_cast<int>(e), x);
      }
    }
  }

  void add_cut(int e, const std::vector<double>& x) {
    const auto& epi = problem_.epigraphs[static_cast<std::size_t>(e)];
    const LinearCut cut = risk_cut(epi.covariance, epi.gather(x));
    lp::Row row;
    row.add(epi.epigraph_col, 1.0);
    for (std::size_t i = 0; i < epi.cols.size(); ++i) {
      if (cut.coefficients[i] != 0.0) row.add(epi.cols[i], -cut.coefficients[i]);
    }
    row.lower = cut.offset;
    row.name = epi.name + "_cut";
    evict_cuts(e);
    lp_->add_row(row);
    cut_rows_.push_back(std::move(row));
    cuts_.push_back({e});
    ++result_.cuts_added;
  }

  // Drops the oldest inactive cuts once an epigraph reaches its cap.
  void evict_cuts(int e) {
    const int cap = std::max(1, cfg_.max_cuts_per_epigraph);
    int count = 0;
    for (const CutRecord& c : cuts_) count += c.epigraph == e;
    if (count < cap) return;
    std::vector<int> drop;
    for (std::size_t i = 0; i < cuts_.size() && count >= cap; ++i) {
      if (cuts_[i].epigraph != e) continue;
      const int row = base_rows_ + static_cast<int>(i);
      if (lp_->row_is_basic(row)) {
        drop.push_back(row);
        --count;
      }
    }
    if (drop.empty()) return;
    lp_->remove_rows(drop);
    std::vector<CutRecord> kept;
    std::vector<lp::Row> kept_rows;
    std::size_t d = 0;
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
      if (d < drop.size() && base_rows_ + static_cast<int>(i) == drop[d]) {
        ++d;
        continue;
      }
      kept.push_back(cuts_[i]);
      kept_rows.push_back(std::move(cut_rows_[i]));
    }
    cuts_ = std::move(kept);
    cut_rows_ = std::move(kept_rows);
  }

  // Rebuilds the simplex from scratch with the current bounds and cuts.
  lp::Status cold_restart() {
    result_.lp_iterations += lp_->iterations();
    lp::Problem p = problem_.lp;
    for (int j = 0; j < p.num_cols(); ++j) {
      p.lower[j] = lp_->lower(j);
      p.upper[j] = lp_->upper(j);
    }
    for (const lp::Row& r : cut_rows_) p.rows.push_back(r);
    lp::Options opts;
    opts.bland = true;
    lp_ = std::make_unique<lp::Simplex>(p, opts);
    return lp_->solve();
  }

  // Returns false when the search must stop (unrecoverable LP failure).
  bool process(Node& node) {
    apply_bounds(node);
    bool converged = false;
    const bool root = node.depth == 0;
    const int rounds = root ? cfg_.cut_rounds_max : cfg_.cut_rounds_fractional;
    lp::Status st = solve_with_cuts(rounds, converged);
    if (st == lp::Status::infeasible) {
      log_node(node, "infeasible");
      return true;
    }
    if (st == lp::Status::unbounded) {
      if (problem_.integer_cols.empty() || root) result_.status = MipStatus::unbounded;
      log_node(node, "unbounded");
      return true;
    }
    if (st != lp::Status::optimal) return false;

    double obj = lp_->objective();
    std::vector<double> x = lp_->primal();
    update_pseudo_cost(node, obj);
    node.bound = std::max(node.bound, obj);
    if (has_incumbent() && node.bound >= prune_threshold()) {
      closed_by_gap_ = std::min(closed_by_gap_, node.bound);
      log_node(node, "pruned");
      return true;
    }

    int branch = select_branch(x);
    if (branch < 0 && !converged) {
      // Integral: close the epigraph gap before accepting.
      st = solve_with_cuts(cfg_.cut_rounds_max, converged);
      if (st != lp::Status::optimal) {
        if (st == lp::Status::infeasible) return true;
        return false;
      }
      obj = lp_->objective();
      x = lp_->primal();
      node.bound = std::max(node.bound, obj);
      branch = select_branch(x);
      if (has_incumbent() && node.bound >= prune_threshold()) {
        closed_by_gap_ = std::min(closed_by_gap_, node.bound);
        log_node(node, "pruned");
        return true;
      }
    }

    if (branch < 0) {
      for (int j : problem_.integer_cols) x[j] = std::round(x[j]);
      const double exact = problem_.exact_objective(x);
      if (!has_incumbent() || exact < result_.objective) {
        const bool first = !has_incumbent();
        result_.x = x;
        result_.objective = exact;
        result_.epigraph_objective = problem_.lp.objective(x);
        if (first) {
          // Switch from diving to best-bound; open nodes keep their bounds.
        }
      }
      log_node(node, "integral");
      return true;
    }

    const int col = problem_.integer_cols[static_cast<std::size_t>(branch)];
    const double v = x[col];
    const double frac = v - std::floor(v);
    Node down;
    down.changes = node.changes;
    down.changes.push_back({col, lp_->lower(col), std::floor(v)});
    Node up;
    up.changes = node.changes;
    up.changes.push_back({col, std::ceil(v), lp_->upper(col)});
    for (Node* child : {&down, &up}) {
      child->bound = node.bound;
      child->depth = node.depth + 1;
      child->branch_index = branch;
      child->parent_obj = obj;
    }
    down.branch_up = false;
    down.branch_frac = frac;
    up.branch_up = true;
    up.branch_frac = 1.0 - frac;
    down.id = next_id_++;
    up.id = next_id_++;
    // The last pushed child is dived into first.
    if (frac >= 0.5) {
      open_.push_back(std::move(down));
      open_.push_back(std::move(up));
    } else {
      open_.push_back(std::move(up));
      open_.push_back(std::move(down));
    }
    log_node(node, "branched");
    return true;
  }

  int select_branch(const std::vector<double>& x) const {
    int best = -1;
    double best_score = -1.0;
    double avg_down = 1.0;
    double avg_up = 1.0;
    if (cfg_.branching == BranchingRule::pseudo_cost) {
      double sd = 0.0;
      double su = 0.0;
      int nd = 0;
      int nu = 0;
      for (std::size_t i = 0; i < pc_down_n_.size(); ++i) {
        if (pc_down_n_[i]) {
          sd += pc_down_sum_[i] / pc_down_n_[i];
          ++nd;
        }
        if (pc_up_n_[i]) {
          su += pc_up_sum_[i] / pc_up_n_[i];
          ++nu;
        }
      }
      if (nd) avg_down = sd / nd;
      if (nu) avg_up = su / nu;
    }
    for (std::size_t i = 0; i < problem_.integer_cols.size(); ++i) {
      const double v = x[problem_.integer_cols[i]];
      const double frac = v - std::floor(v);
      if (frac <= cfg_.feas_tol || frac >= 1.0 - cfg_.feas_tol) continue;
      double score = 0.0;
      if (cfg_.branching == BranchingRule::most_fractional) {
        score = std::min(frac, 1.0 - frac);
      } else {
        const double pd = pc_down_n_[i] ? pc_down_sum_[i] / pc_down_n_[i] : avg_down;
        const double pu = pc_up_n_[i] ? pc_up_sum_[i] / pc_up_n_[i] : avg_up;
        score = std::max(pd * frac, 1e-6) * std::max(pu * (1.0 - frac), 1e-6);
      }
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  void update_pseudo_cost(const Node& node, double obj) {
    if (node.branch_index < 0 || node.branch_frac <= 0.0) return;
    const double gain = std::max(0.0, obj - node.parent_obj) / node.branch_frac;
    const auto i = static_cast<std::size_t>(node.branch_index);
    if (node.branch_up) {
      pc_up_sum_[i] += gain;
      ++pc_up_n_[i];
    } else {
      pc_down_sum_[i] += gain;
      ++pc_down_n_[i];
    }
  }

  void log_node(const Node& node, const char* what) const {
    if (!cfg_.node_log) return;
    *cfg_.node_log << "node " << node.id << " depth " << node.depth << " bound " << node.bound
                   << " incumbent " << (has_incumbent() ? result_.objective : lp::kInf) << " "
                   << what << '\n';
  }

  MipResult finish(bool limit_hit) {
    result_.lp_iterations += lp_->iterations();
    if (result_.status == MipStatus::unbounded) return std::move(result_);
    double lb = std::min(open_min_bound(), closed_by_gap_);
    if (has_incumbent()) {
      lb = std::min(lb, result_.objective);
      result_.bound = lb;
      result_.gap = (result_.objective - lb) / std::max(1.0, std::abs(lb));
      if (!limit_hit || result_.gap <= cfg_.mip_gap_rel) {
        result_.status = MipStatus::optimal;
        result_.gap = std::max(0.0, result_.gap);
      } else {
        result_.status = MipStatus::feasible;
      }
    } else {
      result_.bound = limit_hit ? lb : lp::kInf;
      result_.status = limit_hit ? MipStatus::limit : MipStatus::infeasible;
    }
    return std::move(result_);
  }

  const MipProblem& problem_;
  SolverConfig cfg_;
  std::chrono::steady_clock::time_point start_;
  int base_rows_ = 0;
  std::vector<double> root_lower_;
  std::vector<double> root_upper_;
  std::vector<char> is_integer_;
  std::unique_ptr<lp::Simplex> lp_;
  std::vector<Node> open_;
  std::vector<int> touched_;
  std::vector<CutRecord> cuts_;
  std::vector<lp::Row> cut_rows_;
  std::vector<double> pc_down_sum_;
  std::vector<double> pc_up_sum_;
  std::vector<int> pc_down_n_;
  std::vector<int> pc_up_n_;
  double closed_by_gap_ = lp::kInf;
  long next_id_ = 0;
  MipResult result_;
};

}  // namespace detail

inline MipResult solve_mip(const MipProblem& problem, const SolverConfig& cfg = {}) {
  for (int j : problem.integer_cols) {
    if (j < 0 || j >= problem.lp.num_cols()) {
      throw std::invalid_argument("mip: integer column out of range");
    }
  }
  for (const auto& e : problem.epigraphs) {
    if (static_cast<int>(e.cols.size()) != e.covariance.dimension()) {
      throw DimensionError("mip: epigraph '" + e.name + "' dimension mismatch");
    }
    if (problem.lp.cost[e.epigraph_col] < 0.0) {
      throw std::invalid_argument("mip: epigraph columns must carry a nonnegative cost");
    }
  }
  detail::BranchAndBound bnb(problem, cfg);
  return bnb.run();
}

}  // namespace mmgcoop

#endif  // MMGCOOP_MIP_HPP
