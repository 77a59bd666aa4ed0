#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "thermrom/error.hpp"

namespace thermrom {

inline constexpr double kUniformSpacingTol = 1e-9;  // hours

/// Sampled signal. t in hours (strictly increasing), v in C.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;
  std::string label;

  TimeSeries() = default;
  TimeSeries(std::vector<double> times, std::vector<double> values, std::string name = {})
      : t(std::move(times)), v(std::move(values)), label(std::move(name)) {
    if (t.size() != v.size()) {
      throw DataError("series '" + label + "': " + std::to_string(t.size()) +
                      " timestamps vs " + std::to_string(v.size()) + " values");
    }
  }

  /// Hourly samples k * dt, k = 0..n-1.
  static TimeSeries uniform(std::vector<double> values, double dt = 1.0, double t0 = 0.0,
                            std::string name = {}) {
    std::vector<double> times(values.size());
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = t0 + dt * static_cast<double>(k);
    return TimeSeries(std::move(times), std::move(values), std::move(name));
  }

  std::size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }
  double operator[](std::size_t k) const { return v[k]; }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

inline void require_finite(const TimeSeries& s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s.v[k])) {
      throw DataError("series '" + s.label + "': non-finite value at sample " + std::to_string(k));
    }
  }
}

/// Returns the common sample spacing; throws when spacing varies by more than
/// kUniformSpacingTol or timestamps do not increase.
inline double uniform_spacing(const TimeSeries& s) {
  if (s.size() < 2) throw DataError("series '" + s.label + "': need >= 2 samples for a spacing");
  const double dt = s.t[1] - s.t[0];
  if (!(dt > 0.0)) throw DataError("series '" + s.label + "': timestamps not increasing");
  for (std::size_t k = 2; k < s.size(); ++k) {
    if (std::abs((s.t[k] - s.t[k - 1]) - dt) > kUniformSpacingTol) {
      throw DataError("series '" + s.label + "': non-uniform timestamps at sample " +
                      std::to_string(k));
    }
  }
  return dt;
}

/// Same length and identical timestamps.
inline void require_aligned(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size()) {
    throw DataError("series '" + a.label + "' and '" + b.label + "' differ in length (" +
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.t[k] - b.t[k]) > kUniformSpacingTol) {
      throw DataError("series '" + a.label + "' and '" + b.label +
                      "' have different timestamps at sample " + std::to_string(k));
    }
  }
}

/// First n samples (or all, when n >= size()).
inline TimeSeries head(const TimeSeries& s, std::size_t n) {
  if (n >= s.size()) return s;
  return TimeSeries(std::vector<double>(s.t.begin(), s.t.begin() + static_cast<long>(n)),
                    std::vector<double>(s.v.begin(), s.v.begin() + static_cast<long>(n)), s.label);
}

}  // namespace thermrom
