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

// Free-format MPS export of a scheduling model. Integer columns sit between
// INTORG/INTEND markers. The risk term is written as a QUADOBJ section
// (objective contains 0.5 x'Qx, so Q = 2 r V) and the epigraph columns are
// left out, which gives the exact convex MIQP.

#ifndef MMGCOOP_MPS_HPP
#define MMGCOOP_MPS_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "mmgcoop/model.hpp"

namespace mmgcoop {

namespace detail {

inline std::string mps_name(std::string s) {
  std::replace(s.begin(), s.end(), ' ', '_');
  return s.empty() ? std::string("_") : s;
}

inline std::string mps_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_mps(std::ostream& out, const OptimizationModel& m,
                      const std::string& name = "mmgcoop") {
  using detail::mps_name;
  using detail::mps_number;
  const lp::Problem& p = m.mip.lp;
  const int n = p.num_cols();
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  skip[static_cast<std::size_t>(m.layout.z_buy)] = 1;
  skip[static_cast<std::size_t>(m.layout.z_sell)] = 1;
  std::vector<char> is_int(static_cast<std::size_t>(n), 0);
  for (int j : m.mip.integer_cols) is_int[static_cast<std::size_t>(j)] = 1;

  std::vector<std::string> row_names;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    row_names.push_back(p.rows[i].name.empty() ? "r" + std::to_string(i + 1)
                                               : mps_name(p.rows[i].name));
  }
  auto col_name = [&](int j) {
    const auto& nm = p.col_names[static_cast<std::size_t>(j)];
    return nm.empty() ? "c" + std::to_string(j + 1) : mps_name(nm);
  };

  out << "NAME " << mps_name(name) << "\n";
  out << "ROWS\n N obj\n";
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const lp::Row& r = p.rows[i];
    const char* sense = "E";
    if (r.lower != r.upper) {
      sense = std::isfinite(r.lower) ? "G" : (std::isfinite(r.upper) ? "L" : "N");
    }
    out << " " << sense << " " << row_names[i] << "\n";
  }

  // Column-major coefficient listing.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_col(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const lp::Row& r = p.rows[i];
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      if (r.value[k] != 0.0) by_col[static_cast<std::size_t>(r.index[k])].emplace_back(i, r.value[k]);
    }
  }
  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    if (skip[static_cast<std::size_t>(j)]) continue;
    const bool want_int = is_int[static_cast<std::size_t>(j)] != 0;
    if (want_int != in_int) {
      out << " MARKER" << marker++ << " 'MARKER' " << (want_int ? "'INTORG'" : "'INTEND'")
          << "\n";
      in_int = want_int;
    }
    const std::string cn = col_name(j);
    if (p.cost[static_cast<std::size_t>(j)] != 0.0) {
      out << " " << cn << " obj " << mps_number(p.cost[static_cast<std::size_t>(j)]) << "\n";
    }
    for (const auto& [i, v] : by_col[static_cast<std::size_t>(j)]) {
      out << " " << cn << " " << row_names[i] << " " << mps_number(v) << "\n";
    }
    if (p.cost[static_cast<std::size_t>(j)] == 0.0 && by_col[static_cast<std::size_t>(j)].empty()) {
      out << " " << cn << " obj 0\n";
    }
  }
  if (in_int) out << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const lp::Row& r = p.rows[i];
    const double rhs = std::isfinite(r.lower) ? r.lower : r.upper;
    if (std::isfinite(rhs) && rhs != 0.0) out << " rhs " << row_names[i] << " " << mps_number(rhs) << "\n";
  }
  bool ranges_header = false;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const lp::Row& r = p.rows[i];
    if (r.lower != r.upper && std::isfinite(r.lower) && std::isfinite(r.upper)) {
      if (!ranges_header) {
        out << "RANGES\n";
        ranges_header = true;
      }
      out << " rng " << row_names[i] << " " << mps_number(r.upper - r.lower) << "\n";
    }
  }

  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    if (skip[static_cast<std::size_t>(j)]) continue;
    const double lo = p.lower[static_cast<std::size_t>(j)];
    const double up = p.upper[static_cast<std::size_t>(j)];
    const std::string cn = col_name(j);
    if (lo == up) {
      out << " FX bnd " << cn << " " << mps_number(lo) << "\n";
      continue;
    }
    if (!std::isfinite(lo) && !std::isfinite(up)) {
      out << " FR bnd " << cn << "\n";
      continue;
    }
    if (!std::isfinite(lo)) {
      out << " MI bnd " << cn << "\n";
    } else if (lo != 0.0) {
      out << " LO bnd " << cn << " " << mps_number(lo) << "\n";
    }
    if (std::isfinite(up)) {
      out << " UP bnd " << cn << " " << mps_number(up) << "\n";
    } else if (is_int[static_cast<std::size_t>(j)]) {
      out << " PL bnd " << cn << "\n";
    }
  }

  if (m.risk_weight > 0.0) {
    out << "QUADOBJ\n";
    for (const auto& e : m.mip.epigraphs) {
      const auto& v = e.covariance.matrix;
      for (std::size_t a = 0; a < e.cols.size(); ++a) {
        for (std::size_t b = a; b < e.cols.size(); ++b) {
          const double q = 2.0 * m.risk_weight *
                           v(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          if (q == 0.0) continue;
          out << " " << col_name(e.cols[a]) << " " << col_name(e.cols[b]) << " "
              << mps_number(q) << "\n";
        }
      }
    }
  }
  out << "ENDATA\n";
}

inline void write_mps_file(const std::filesystem::path& path, const OptimizationModel& m,
                           const std::string& name = "mmgcoop") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_mps(out, m, name);
}

}  // namespace mmgcoop

#endif  // MMGCOOP_MPS_HPP
