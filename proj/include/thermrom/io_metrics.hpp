#pragma once

// CSV datasets, error metrics and lag analysis.
//
// CSV layout: UTF-8, comma separated, header "hour,<label>,...", first column
// decimal hours, one series per remaining column. Numbers are written in the
// shortest form that round-trips exactly (never more than 17 significant
// digits), so writer output is stable for a given input.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "thermrom/error.hpp"
#include "thermrom/time_series.hpp"

namespace thermrom {

/// Columns of one CSV file in file order, all sharing the "hour" timestamps.
struct Dataset {
  std::vector<TimeSeries> columns;

  bool contains(std::string_view label) const {
    return std::any_of(columns.begin(), columns.end(),
                       [&](const TimeSeries& s) { return s.label == label; });
  }
  const TimeSeries& at(std::string_view label) const {
    for (const auto& s : columns) {
      if (s.label == label) return s;
    }
    throw DataError("dataset has no column '" + std::string(label) + "'");
  }
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw DataError("cannot format number");
  return std::string(buf, ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw DataError("CSV row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                    ": non-numeric cell '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses a dataset. Row numbers in messages are 1-based file lines (the
/// header is row 1).
inline Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!detail::trim(line).empty()) break;
  }
  if (detail::trim(line).empty()) throw DataError("CSV: missing header row");
  std::string_view header_line = line;
  if (header_line.size() >= 3 && header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
  const auto header = detail::split_commas(header_line);
  if (header.front() != "hour") {
    throw DataError("CSV row " + std::to_string(row) + ": first header cell must be 'hour'");
  }
  Dataset ds;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw DataError("CSV header: empty column name at column " + std::to_string(c + 1));
    for (std::size_t p = 1; p < c; ++p) {
      if (header[p] == header[c]) throw DataError("CSV header: duplicate column '" + std::string(header[c]) + "'");
    }
    ds.columns.emplace_back();
    ds.columns.back().label = std::string(header[c]);
  }
  std::vector<double> hours;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError("CSV row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    const double h = detail::parse_cell(cells[0], row, 0);
    if (!hours.empty() && !(h > hours.back())) {
      throw DataError("CSV row " + std::to_string(row) + ": timestamp " + std::string(cells[0]) +
                      " is not greater than the previous one");
    }
    hours.push_back(h);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      ds.columns[c - 1].v.push_back(detail::parse_cell(cells[c], row, c));
    }
  }
  for (auto& s : ds.columns) s.t = hours;
  return ds;
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV file: " + path);
  return read_csv(in);
}

/// Writes aligned series as one CSV; timestamps come from the first column.
inline void write_csv(std::ostream& out, const std::vector<TimeSeries>& columns) {
  if (columns.empty()) throw DataError("write_csv: no columns");
  for (const auto& s : columns) {
    require_aligned(columns.front(), s);
    if (s.label.empty() || s.label.find_first_of(",\n\r") != std::string::npos) {
      throw DataError("write_csv: invalid column label '" + s.label + "'");
    }
  }
  out << "hour";
  for (const auto& s : columns) out << ',' << s.label;
  out << '\n';
  const auto& t = columns.front().t;
  for (std::size_t k = 0; k < t.size(); ++k) {
    out << format_double(t[k]);
    for (const auto& s : columns) out << ',' << format_double(s.v[k]);
    out << '\n';
  }
}

inline std::string to_csv_string(const std::vector<TimeSeries>& columns) {
  std::ostringstream os;
  write_csv(os, columns);
  return os.str();
}

inline void write_csv(const std::string& path, const std::vector<TimeSeries>& columns) {
  const std::string text = to_csv_string(columns);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open CSV file for writing: " + path);
  out << text;
  if (!out) throw DataError("failed writing CSV file: " + path);
}

// ---------------------------------------------------------------------------
// Metrics

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unnormalized root-mean-square difference.
inline double rmse(const TimeSeries& actual, const TimeSeries& model) {
  if (actual.size() != model.size()) {
    throw DataError("rmse: series lengths differ (" + std::to_string(actual.size()) + " vs " +
                    std::to_string(model.size()) + ")");
  }
  if (actual.empty()) throw DataError("rmse: empty series");
  double ss = 0.0;
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const double e = actual.v[k] - model.v[k];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(actual.size()));
}

/// 100 * RMSE / |mean(actual)|. Not symmetric in its arguments.
inline double rmse_percent(const TimeSeries& actual, const TimeSeries& model) {
  const double e = rmse(actual, model);
  const double m = mean(actual.v);
  if (m == 0.0) {
    throw DomainError("rmse_percent: mean of the actual series is zero; use rmse_percent_range");
  }
  return 100.0 * e / std::abs(m);
}

/// 100 * RMSE / (max(actual) - min(actual)). Shift invariant.
inline double rmse_percent_range(const TimeSeries& actual, const TimeSeries& model) {
  const double e = rmse(actual, model);
  const auto [lo, hi] = std::minmax_element(actual.v.begin(), actual.v.end());
  if (!(*hi > *lo)) throw DomainError("rmse_percent_range: actual series is constant");
  return 100.0 * e / (*hi - *lo);
}

enum class ErrorNormalization { mean, range };

inline double rmse_percent(const TimeSeries& actual, const TimeSeries& model, ErrorNormalization n) {
  return n == ErrorNormalization::mean ? rmse_percent(actual, model)
                                       : rmse_percent_range(actual, model);
}

/// Lag k in [-max_lag, max_lag] (samples) maximizing the normalized cross
/// correlation
///
///   r(k) = sum_t a'(t) b'(t + k) / sqrt(sum a'^2 sum b'^2),
///
/// with a', b' the mean-removed series. Positive k means b lags a: a peak in
/// a shows up k samples later in b. Ties go to the smallest |k|, then to the
/// negative lag.
inline int peak_lag(const TimeSeries& a, const TimeSeries& b, int max_lag) {
  require_aligned(a, b);
  if (max_lag < 0) throw DataError("peak_lag: max_lag must be >= 0");
  const auto n = a.size();
  if (n <= 2 * static_cast<std::size_t>(max_lag)) {
    throw DataError("peak_lag: series length " + std::to_string(n) + " must exceed 2*max_lag");
  }
  if (n >= 3) uniform_spacing(a);
  const double ma = mean(a.v);
  const double mb = mean(b.v);
  std::vector<double> da(n), db(n);
  double saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    da[k] = a.v[k] - ma;
    db[k] = b.v[k] - mb;
    saa += da[k] * da[k];
    sbb += db[k] * db[k];
  }
  if (saa == 0.0 || sbb == 0.0) throw DomainError("peak_lag: constant series has no correlation peak");
  const double norm = std::sqrt(saa * sbb);

  auto corr = [&](int lag) {
    double s = 0.0;
    const long nn = static_cast<long>(n);
    const long t0 = std::max(0L, -static_cast<long>(lag));
    const long t1 = std::min(nn, nn - lag);
    for (long t = t0; t < t1; ++t) s += da[static_cast<std::size_t>(t)] * db[static_cast<std::size_t>(t + lag)];
    return s / norm;
  };

  int best = 0;
  double best_r = corr(0);
  for (int m = 1; m <= max_lag; ++m) {
    for (int lag : {-m, m}) {
      const double r = corr(lag);
      if (r > best_r) {
        best_r = r;
        best = lag;
      }
    }
  }
  return best;
}

}  // namespace thermrom
