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

// Solving a scheduling model and packaging the result as a schedule.

#ifndef MMGCOOP_SOLVER_HPP
#define MMGCOOP_SOLVER_HPP

#include <optional>

#include "mmgcoop/mip.hpp"
#include "mmgcoop/model.hpp"

namespace mmgcoop {

struct SolveResult {
  MipStatus status = MipStatus::infeasible;
  std::optional<ScheduleSolution> incumbent;
  double bound = -lp::kInf;
  double gap = lp::kInf;
  long nodes_explored = 0;
  int cuts_added = 0;
  long lp_iterations = 0;
  std::vector<double> bound_history;
  double epigraph_objective = lp::kInf;

  double objective() const { return incumbent ? incumbent->objective_total : lp::kInf; }
};

inline void check_config(const SolverConfig& cfg) {
  if (!(cfg.mip_gap_rel > 0.0) || !(cfg.feas_tol > 0.0) || !(cfg.cut_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
}

inline SolveResult solve_model(const OptimizationModel& m, const SolverConfig& cfg = {}) {
  check_config(cfg);
  MipResult r = solve_mip(m.mip, cfg);
  SolveResult out;
  out.status = r.status;
  out.bound = r.bound;
  out.gap = r.gap;
  out.nodes_explored = r.nodes_explored;
  out.cuts_added = r.cuts_added;
  out.lp_iterations = r.lp_iterations;
  out.bound_history = std::move(r.bound_history);
  out.epigraph_objective = r.epigraph_objective;
  if (r.has_incumbent()) {
    ScheduleSolution sol = extract_solution(m, r.x);
    sol.status = r.status;
    sol.gap = r.gap;
    sol.bound = r.bound;
    out.incumbent = std::move(sol);
  }
  return out;
}

inline SolveResult solve_coalition(const Scenario& s, const Coalition& c,
                                   const SolverConfig& cfg = {}) {
  return solve_model(build_model(s, c), cfg);
}

}  // namespace mmgcoop

#endif  // MMGCOOP_SOLVER_HPP
