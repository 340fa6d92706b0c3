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

// Cost-sharing game over microgrid coalitions: the characteristic function
// V(S) is the optimal operating cost of coalition S, and the grand-coalition
// cost is split with the Shapley value.

#ifndef MMGCOOP_GAME_HPP
#define MMGCOOP_GAME_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mmgcoop/model.hpp"
#include "mmgcoop/solver.hpp"

namespace mmgcoop {

inline constexpr int kMaxPlayers = 20;

// V(S) indexed by bitmask; values[0] = V(empty) = 0.
struct CoalitionValueTable {
  int n = 0;
  std::vector<double> values;
  std::vector<std::string> names;      // optional player labels
  std::vector<MipStatus> status;       // per mask, when produced by solves
  std::vector<double> gaps;            // per mask, relative MIP gap

  static CoalitionValueTable with_players(int n) {
    if (n < 1 || n > kMaxPlayers) {
      throw std::invalid_argument("number of players must be in [1, 20]");
    }
    CoalitionValueTable t;
    t.n = n;
    t.values.assign(std::size_t{1} << n, 0.0);
    return t;
  }

  std::uint32_t grand() const { return (std::uint32_t{1} << n) - 1; }
  double value(std::uint32_t mask) const { return values.at(mask); }
  double& value(std::uint32_t mask) { return values.at(mask); }

  std::string player(int k) const {
    return k < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(k)]
                                               : std::to_string(k + 1);
  }

  std::string label(std::uint32_t mask) const {
    std::string out = "{";
    bool first = true;
    for (int k = 0; k < n; ++k) {
      if (!((mask >> k) & 1u)) continue;
      if (!first) out += ",";
      out += player(k);
      first = false;
    }
    return out + "}";
  }
};

inline void check_complete(const CoalitionValueTable& t) {
  if (t.n < 1 || t.n > kMaxPlayers) throw std::invalid_argument("value table: bad player count");
  if (t.values.size() != (std::size_t{1} << t.n)) {
    throw std::invalid_argument("value table: expected " +
                                std::to_string((std::size_t{1} << t.n) - 1) +
                                " nonempty coalitions, got " +
                                std::to_string(t.values.empty() ? 0 : t.values.size() - 1));
  }
  for (std::size_t m = 1; m < t.values.size(); ++m) {
    if (!std::isfinite(t.values[m])) {
      throw std::invalid_argument("value table: V" + t.label(static_cast<std::uint32_t>(m)) +
                                  " is missing or not finite");
    }
  }
  if (t.values[0] != 0.0) throw std::invalid_argument("value table: V(empty) must be 0");
}

// (s-1)! (n-s)! / n! for coalition size s, from exact integer factorials.
inline std::vector<double> shapley_weights(int n) {
  if (n < 1 || n > kMaxPlayers) throw std::invalid_argument("shapley: n must be in [1, 20]");
  std::vector<std::uint64_t> fact(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) fact[static_cast<std::size_t>(i)] = fact[i - 1] * i;
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  for (int s = 1; s <= n; ++s) {
    const std::uint64_t num = fact[static_cast<std::size_t>(s - 1)] * fact[static_cast<std::size_t>(n - s)];
    w[static_cast<std::size_t>(s)] = static_cast<double>(num) / static_cast<double>(fact[static_cast<std::size_t>(n)]);
  }
  return w;
}

// Cost_k = sum over S containing k of w(|S|) [V(S) - V(S \ {k})].
// Sums with the integer numerators (|S|-1)!(n-|S|)! and divides by n! once,
// so integer tables give exact shares.
inline std::vector<double> shapley_values(const CoalitionValueTable& t) {
  check_complete(t);
  if (t.n < 1 || t.n > kMaxPlayers) throw std::invalid_argument("shapley: n must be in [1, 20]");
  std::vector<double> fact(static_cast<std::size_t>(t.n) + 1, 1.0);
  for (int i = 1; i <= t.n; ++i) fact[static_cast<std::size_t>(i)] = fact[i - 1] * i;
  std::vector<double> phi(static_cast<std::size_t>(t.n), 0.0);
  for (std::uint32_t mask = 1; mask <= t.grand(); ++mask) {
    const int s = std::popcount(mask);
    const double num = fact[static_cast<std::size_t>(s - 1)] * fact[static_cast<std::size_t>(t.n - s)];
    for (int k = 0; k < t.n; ++k) {
      const std::uint32_t bit = std::uint32_t{1} << k;
      if (mask & bit) phi[static_cast<std::size_t>(k)] += num * (t.values[mask] - t.values[mask ^ bit]);
    }
  }
  for (double& p : phi) p /= fact[static_cast<std::size_t>(t.n)];
  return phi;
}

struct SubadditivityViolation {
  std::uint32_t s = 0;
  std::uint32_t t = 0;
  double excess = 0.0;  // V(S u T) - V(S) - V(T)
};

// All disjoint nonempty pairs (S, T), S < T, with V(S u T) > V(S) + V(T) + tol
// where tol scales with the magnitudes involved.
inline std::vector<SubadditivityViolation> check_subadditivity(const CoalitionValueTable& t,
                                                                double rel_tol = 1e-6) {
  check_complete(t);
  std::vector<SubadditivityViolation> out;
  for (std::uint32_t s = 1; s <= t.grand(); ++s) {
    // Enumerate submasks of the complement that are larger than s.
    const std::uint32_t rest = t.grand() & ~s;
    for (std::uint32_t u = rest; u; u = (u - 1) & rest) {
      if (u < s) continue;
      const double vs = t.values[s];
      const double vu = t.values[u];
      const double vj = t.values[s | u];
      const double tol = rel_tol * (std::abs(vs) + std::abs(vu) + std::abs(vj)) + 1e-6;
      if (vj - vs - vu > tol) out.push_back({s, u, vj - vs - vu});
    }
  }
  return out;
}

// Coalitions S with sum_{k in S} x_k > V(S) + tol.
inline std::vector<std::uint32_t> core_violations(const CoalitionValueTable& t,
                                                  const std::vector<double>& x,
                                                  double rel_tol = 1e-6) {
  check_complete(t);
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 1; mask <= t.grand(); ++mask) {
    double sum = 0.0;
    for (int k = 0; k < t.n; ++k) {
      if ((mask >> k) & 1u) sum += x[static_cast<std::size_t>(k)];
    }
    if (sum > t.values[mask] + rel_tol * std::max(1.0, std::abs(t.values[mask]))) {
      out.push_back(mask);
    }
  }
  return out;
}

struct AllocationReport {
  CoalitionValueTable table;
  std::vector<double> shapley;
  std::vector<double> isolated;
  std::vector<std::optional<double>> savings_pct;  // defined when isolated > 0
  std::vector<bool> individually_rational;         // shapley <= isolated (+tol)
  double grand_cost = 0.0;
  std::optional<double> grand_savings_pct;
  double efficiency_residual = 0.0;
  std::vector<SubadditivityViolation> subadditivity_violations;
  bool in_core = false;
};

inline AllocationReport shapley(const CoalitionValueTable& t, double rel_tol = 1e-6) {
  AllocationReport r;
  r.table = t;
  r.shapley = shapley_values(t);
  r.grand_cost = t.values[t.grand()];
  double sum_phi = 0.0;
  double sum_iso = 0.0;
  for (int k = 0; k < t.n; ++k) {
    const double iso = t.values[std::uint32_t{1} << k];
    const double phi = r.shapley[static_cast<std::size_t>(k)];
    r.isolated.push_back(iso);
    r.savings_pct.push_back(iso > 0.0 ? std::optional<double>((iso - phi) / iso * 100.0)
                                      : std::nullopt);
    r.individually_rational.push_back(phi <= iso + rel_tol * std::max(1.0, std::abs(iso)));
    sum_phi += phi;
    sum_iso += iso;
  }
  r.efficiency_residual = std::abs(sum_phi - r.grand_cost);
  if (sum_iso > 0.0) r.grand_savings_pct = (sum_iso - r.grand_cost) / sum_iso * 100.0;
  r.subadditivity_violations = check_subadditivity(t, rel_tol);
  r.in_core = core_violations(t, r.shapley, rel_tol).empty();
  return r;
}

class CoalitionSolveError : public std::runtime_error {
 public:
  CoalitionSolveError(std::uint32_t mask, MipStatus status, const std::string& what)
      : std::runtime_error(what), mask_(mask), status_(status) {}
  std::uint32_t mask() const noexcept { return mask_; }
  MipStatus status() const noexcept { return status_; }

 private:
  std::uint32_t mask_;
  MipStatus status_;
};

struct EvaluateOptions {
  int threads = 0;  // 0: hardware concurrency
  std::ostream* warnings = nullptr;
};

// Solves every nonempty coalition. Work is spread over threads but each
// value lands in its mask slot, so the table does not depend on scheduling.
inline CoalitionValueTable evaluate_coalitions(const Scenario& s, const SolverConfig& cfg = {},
                                               const EvaluateOptions& opt = {}) {
  const int n = static_cast<int>(s.num_players());
  CoalitionValueTable table = CoalitionValueTable::with_players(n);
  for (const Microgrid& mg : s.microgrids) table.names.push_back(mg.name);
  if (n > 12 && opt.warnings) {
    *opt.warnings << "warning: " << n << " players means " << table.grand()
                  << " coalition solves\n";
  }
  const std::size_t count = table.values.size();
  table.status.assign(count, MipStatus::optimal);
  table.gaps.assign(count, 0.0);
  std::vector<std::exception_ptr> errors(count);
  // The node log is not shared between threads.
  SolverConfig local = cfg;
  local.node_log = nullptr;

  std::atomic<std::uint32_t> next{1};
  auto worker = [&]() {
    for (;;) {
      const std::uint32_t mask = next.fetch_add(1);
      if (mask >= count) return;
      try {
        const SolveResult r = solve_coalition(s, Coalition::from_mask(mask), local);
        table.status[mask] = r.status;
        if (!r.incumbent || r.status == MipStatus::infeasible ||
            r.status == MipStatus::unbounded) {
          throw CoalitionSolveError(mask, r.status,
                                    "coalition " + table.label(mask) + " is " +
                                        to_string(r.status));
        }
        table.values[mask] = r.incumbent->objective_total;
        table.gaps[mask] = r.gap;
      } catch (...) {
        errors[mask] = std::current_exception();
      }
    }
  };
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(count - 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t mask = 1; mask < count; ++mask) {
    if (errors[mask]) std::rethrow_exception(errors[mask]);
  }
  return table;
}

inline AllocationReport compare_modes(const Scenario& s, const SolverConfig& cfg = {},
                                      const EvaluateOptions& opt = {}) {
  const CoalitionValueTable table = evaluate_coalitions(s, cfg, opt);
  double worst_gap = cfg.mip_gap_rel;
  for (double g : table.gaps) worst_gap = std::max(worst_gap, g);
  return shapley(table, worst_gap);
}

}  // namespace mmgcoop

#endif  // MMGCOOP_GAME_HPP
