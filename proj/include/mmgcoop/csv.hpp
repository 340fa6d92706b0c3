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

// Minimal comma-separated tables. One header row, no quoting; cells may not
// contain commas or newlines.

#ifndef MMGCOOP_CSV_HPP
#define MMGCOOP_CSV_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmgcoop/errors.hpp"
#include "mmgcoop/scenario.hpp"

namespace mmgcoop {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return j;
    }
    throw ParseError("csv: no column named '" + std::string(name) + "'");
  }

  bool has_column(std::string_view name) const {
    for (const auto& h : header) {
      if (h == name) return true;
    }
    return false;
  }

  Series numeric(std::size_t j) const {
    Series out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string& cell = rows[i][j];
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) {
        throw ParseError("csv: row " + std::to_string(i + 2) + ", column '" + header[j] +
                         "': not a number: '" + cell + "'");
      }
      out.push_back(v);
    }
    return out;
  }

  Series numeric(std::string_view name) const { return numeric(column(name)); }

  bool operator==(const CsvTable&) const = default;
};

// Fixed-width significant-digit rendering; identical bits give identical text
// and a parsed value re-renders to the same text.
inline std::string format_number(double v) {
  if (std::abs(v) < 1e-9) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError("csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw ParseError("csv: empty document");
  return table;
}

inline CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out << ',';
      out << cells[j];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
}

inline void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_csv(out, table);
}

// Time series, one row per period, one column per named series.
using NamedSeries = std::vector<std::pair<std::string, Series>>;

inline CsvTable series_table(const NamedSeries& series, bool with_period = true) {
  CsvTable table;
  std::size_t n = 0;
  if (with_period) table.header.push_back("period");
  for (const auto& [name, values] : series) {
    if (name.find(',') != std::string::npos) {
      throw std::invalid_argument("series name contains a comma: " + name);
    }
    table.header.push_back(name);
    if (&values == &series.front().second) {
      n = values.size();
    } else if (values.size() != n) {
      throw DimensionError("series '" + name + "' has a different length");
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::string> row;
    if (with_period) row.push_back(std::to_string(t + 1));
    for (const auto& entry : series) row.push_back(format_number(entry.second[t]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void write_series_csv(const std::filesystem::path& path, const NamedSeries& series) {
  write_csv_file(path, series_table(series));
}

// Reads every column except a leading "period" index.
inline NamedSeries read_series_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv_file(path);
  NamedSeries out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] == "period") continue;
    out.emplace_back(table.header[j], table.numeric(j));
  }
  return out;
}

// Price history layout: period, actual_1, forecast_1, ..., actual_D,
// forecast_D with day 1 the oldest.
inline PriceHistory history_from_table(const CsvTable& table, double alpha) {
  PriceHistory h;
  h.alpha = alpha;
  for (int d = 1;; ++d) {
    const std::string a = "actual_" + std::to_string(d);
    const std::string f = "forecast_" + std::to_string(d);
    if (!table.has_column(a) && !table.has_column(f)) break;
    if (!table.has_column(a) || !table.has_column(f)) {
      throw DimensionError("history csv: day " + std::to_string(d) +
                           " needs both actual and forecast columns");
    }
    h.days.push_back({table.numeric(a), table.numeric(f)});
  }
  if (h.days.empty()) throw ParseError("history csv: no actual_1/forecast_1 columns");
  return h;
}

inline CsvTable history_table(const PriceHistory& h) {
  NamedSeries cols;
  for (std::size_t d = 0; d < h.days.size(); ++d) {
    cols.emplace_back("actual_" + std::to_string(d + 1), h.days[d].actual);
    cols.emplace_back("forecast_" + std::to_string(d + 1), h.days[d].forecast);
  }
  return series_table(cols);
}

}  // namespace mmgcoop

#endif  // MMGCOOP_CSV_HPP
