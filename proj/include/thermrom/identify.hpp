#pragma once

// Fitting the second-order model to indoor/outdoor series.
//
// The objective simulates the model with u = outdoor, starting from the first
// indoor sample and its finite-difference rate, and scores the run with the
// RMSE-percent metric. fit() minimizes it with multi-start bounded
// Nelder-Mead. c1..c3 are searched in log coordinates, c4 linearly; start
// points are uniform in those coordinates, i.e. log-uniform for c1..c3.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "thermrom/dynamics.hpp"
#include "thermrom/error.hpp"
#include "thermrom/io_metrics.hpp"
#include "thermrom/nelder_mead.hpp"
#include "thermrom/rom_core.hpp"
#include "thermrom/time_series.hpp"

namespace thermrom {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

inline constexpr std::size_t kDefaultWindowHours = 288;

struct FitOptions {
  std::array<Interval, 4> bounds{{{1e-3, 10.0}, {1e-3, 100.0}, {1e-3, 100.0}, {-50.0, 50.0}}};
  std::optional<double> pinned_c4;
  std::size_t n_starts = 16;
  std::uint64_t seed = 0;
  std::size_t max_evals = 2000;  ///< per start
  double tol = 1e-8;
  ErrorNormalization metric = ErrorNormalization::mean;
  /// Worker threads for the multi-start loop; results do not depend on it.
  std::size_t threads = 1;

  // Test hooks.
  double objective_scale = 1.0;
  /// Called with every evaluated coefficient vector. Must be thread safe when
  /// threads > 1.
  std::function<void(const RomCoefficients&)> trace;
};

struct FitResult {
  RomCoefficients coefficients;
  double rmse_percent = 0.0;
  std::size_t n_evals = 0;
  std::size_t start_index = 0;
  bool converged = false;
  std::vector<double> per_start_objectives;
  std::vector<std::string> warnings;
};

inline void validate(const FitOptions& opts) {
  static const char* names[] = {"c1", "c2", "c3", "c4"};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& b = opts.bounds[i];
    if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw DataError(std::string("fit bounds for ") + names[i] + " are empty or non-finite");
    }
    if (i < 3 && !(b.lo > 0.0)) {
      throw DataError(std::string("fit bounds for ") + names[i] + " must be strictly positive");
    }
  }
  if (opts.n_starts < 1) throw DataError("fit needs n_starts >= 1");
  if (opts.max_evals < 1) throw DataError("fit needs max_evals >= 1");
  if (!(opts.tol >= 0.0)) throw DataError("fit tolerance must be >= 0");
  if (opts.pinned_c4 && !std::isfinite(*opts.pinned_c4)) throw DataError("pinned c4 must be finite");
  if (!(opts.objective_scale > 0.0)) throw DataError("objective scale must be > 0");
}

inline void check_fit_data(const TimeSeries& indoor, const TimeSeries& outdoor) {
  require_aligned(indoor, outdoor);
  if (indoor.size() < 3) {
    throw DataError("fit data needs >= 3 samples, got " + std::to_string(indoor.size()));
  }
  require_finite(indoor);
  require_finite(outdoor);
  uniform_spacing(indoor);
}

/// Objective without input validation, for the optimizer's inner loop.
inline double objective_unchecked(const RomCoefficients& c, const TimeSeries& indoor, const TimeSeries& outdoor,
                                  const SimConfig& cfg, ErrorNormalization metric) {
  SimConfig run = cfg;
  run.x0 = indoor.v[0];
  run.v0 = default_initial_rate(indoor);
  const TimeSeries model = simulate(to_state_space(c), outdoor, run);
  return rmse_percent(indoor, model, metric);
}

inline double objective(const RomCoefficients& c, const TimeSeries& indoor, const TimeSeries& outdoor,
                        const SimConfig& cfg, ErrorNormalization metric = ErrorNormalization::mean) {
  check_fit_data(indoor, outdoor);
  return objective_unchecked(c, indoor, outdoor, cfg, metric);
}

/// Damped frequency times sample spacing, over pi. Values >= 1 mean the
/// model rings at or above the Nyquist frequency of the data; such models
/// alias onto slower discrete-time dynamics and are not identifiable from
/// the samples. Zero for non-oscillating models.
inline double nyquist_ratio(const RomCoefficients& c, double spacing) {
  const double disc = c.c2 * c.c2 - 4.0 * c.c1 * c.c3;
  if (disc >= 0.0) return 0.0;
  const double omega = std::sqrt(-disc) / (2.0 * c.c1);
  return omega * spacing / 3.141592653589793;
}

inline bool above_nyquist(const RomCoefficients& c, double spacing) { return nyquist_ratio(c, spacing) >= 1.0; }

/// Objective value (percent) assigned to aliased models: far above any
/// feasible error and rising with the ratio so the simplex walks back.
inline constexpr double kAliasPenalty = 1e6;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream seed for one multi-start index; independent of n_starts.
inline std::uint64_t start_seed(std::uint64_t seed, std::size_t start_index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(start_index) + 1));
}

struct SearchSpace {
  std::vector<std::size_t> free;  // coefficient indices searched
  std::vector<double> lower, upper;
  std::array<Interval, 4> bounds;
  std::optional<double> pinned_c4;

  explicit SearchSpace(const FitOptions& o) : bounds(o.bounds), pinned_c4(o.pinned_c4) {
    const std::size_t dims = o.pinned_c4 ? 3 : 4;
    for (std::size_t i = 0; i < dims; ++i) {
      free.push_back(i);
      lower.push_back(i < 3 ? std::log(bounds[i].lo) : bounds[i].lo);
      upper.push_back(i < 3 ? std::log(bounds[i].hi) : bounds[i].hi);
    }
  }

  RomCoefficients decode(const std::vector<double>& x) const {
    std::array<double, 4> c{0.0, 0.0, 0.0, pinned_c4.value_or(0.0)};
    for (std::size_t k = 0; k < free.size(); ++k) {
      const std::size_t i = free[k];
      const double v = i < 3 ? std::exp(x[k]) : x[k];
      c[i] = std::clamp(v, bounds[i].lo, bounds[i].hi);
    }
    return {c[0], c[1], c[2], c[3]};
  }
};

}  // namespace detail

inline FitResult fit(const TimeSeries& indoor, const TimeSeries& outdoor, const FitOptions& opts, const SimConfig& cfg) {
  validate(opts);
  check_fit_data(indoor, outdoor);
  // Surface configuration errors (dt mismatch etc.) before the search.
  (void)simulate(to_state_space(RomCoefficients{}), outdoor,
                 SimConfig{cfg.dt, cfg.method, indoor.v[0], default_initial_rate(indoor)});

  const double spacing = uniform_spacing(indoor);
  const detail::SearchSpace space(opts);
  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.tol = opts.tol;

  std::vector<NelderMeadResult> runs(opts.n_starts);
  auto run_start = [&](std::size_t s) {
    std::mt19937_64 rng(detail::start_seed(opts.seed, s));
    std::vector<double> x0(space.free.size());
    for (std::size_t k = 0; k < x0.size(); ++k) {
      std::uniform_real_distribution<double> dist(space.lower[k], space.upper[k]);
      x0[k] = dist(rng);
    }
    auto f = [&](const std::vector<double>& x) {
      const RomCoefficients c = space.decode(x);
      if (opts.trace) opts.trace(c);
      const double ratio = nyquist_ratio(c, spacing);
      if (ratio >= 1.0) return opts.objective_scale * kAliasPenalty * ratio;
      return opts.objective_scale * objective_unchecked(c, indoor, outdoor, cfg, opts.metric);
    };
    runs[s] = nelder_mead_bounded(f, std::move(x0), space.lower, space.upper, nm);
  };

  const std::size_t workers = std::clamp<std::size_t>(opts.threads, 1, opts.n_starts);
  if (workers == 1) {
    for (std::size_t s = 0; s < opts.n_starts; ++s) run_start(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t s = next++; s < opts.n_starts; s = next++) run_start(s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  FitResult result;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const double f = runs[s].f / opts.objective_scale;
    result.per_start_objectives.push_back(f);
    result.n_evals += runs[s].n_evals;
    result.converged = result.converged || runs[s].converged;
    if (runs[s].f < best) {
      best = runs[s].f;
      result.start_index = s;
    }
  }
  const auto& winner = runs[result.start_index];
  result.coefficients = space.decode(winner.x);
  result.rmse_percent = winner.f / opts.objective_scale;

  const auto [lo, hi] = std::minmax_element(indoor.v.begin(), indoor.v.end());
  if (*hi - *lo == 0.0) {
    result.warnings.push_back(
        "indoor series is constant: coefficients are not identifiable (stiffness/offset trade-off)");
  }
  if (!result.converged) {
    result.warnings.push_back("every start exhausted max_evals without stalling");
  }
  return result;
}

}  // namespace thermrom
