#pragma once

// Bounded Nelder-Mead simplex minimizer. Trial points are clamped onto the
// box [lower, upper]; after each stall the search restarts from the best
// vertex with a fresh simplex until a restart no longer improves the
// objective or the evaluation budget runs out.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace thermrom {

struct NelderMeadOptions {
  std::size_t max_evals = 2000;
  /// Stall when (f_worst - f_best) <= tol * max(|f_best|, 1e-12 |f_start|).
  /// Scale free: multiplying the objective by a power of two leaves the
  /// search path unchanged.
  double tol = 1e-8;
  /// Initial edge length as a fraction of each box width.
  double initial_step = 0.1;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t n_evals = 0;
  std::size_t n_restarts = 0;
  bool converged = false;  ///< stalled within the budget
};

template <class Objective>
NelderMeadResult nelder_mead_bounded(Objective&& objective, std::vector<double> start,
                                     const std::vector<double>& lower, const std::vector<double>& upper,
                                     const NelderMeadOptions& opts = {}) {
  const std::size_t n = start.size();
  NelderMeadResult res;

  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  auto eval = [&](const std::vector<double>& x) {
    ++res.n_evals;
    const double f = objective(x);
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };

  clamp(start);
  const double f_start = eval(start);
  const double f_scale = (std::isfinite(f_start) && f_start != 0.0) ? std::abs(f_start) : 1.0;
  const double floor = 1e-12 * f_scale;
  auto stall = [&](double f_best) { return opts.tol * std::max(std::abs(f_best), floor); };
  res.x = start;
  res.f = f_start;

  std::vector<std::vector<double>> simplex(n + 1);
  std::vector<double> fv(n + 1);
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  double step_fraction = opts.initial_step;
  bool first_round = true;
  while (res.n_evals < opts.max_evals) {
    // Fresh simplex around the incumbent.
    simplex[0] = res.x;
    fv[0] = res.f;
    for (std::size_t i = 0; i < n; ++i) {
      auto v = res.x;
      const double width = upper[i] - lower[i];
      double h = step_fraction * (width > 0.0 ? width : std::max(1.0, std::abs(v[i])));
      if (v[i] + h > upper[i]) h = -h;
      v[i] += h;
      clamp(v);
      simplex[i + 1] = std::move(v);
      fv[i + 1] = eval(simplex[i + 1]);
    }
    const double f_round_start = res.f;

    bool stalled = false;
    while (res.n_evals < opts.max_evals) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      {
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
          s2[k] = std::move(simplex[order[k]]);
          f2[k] = fv[order[k]];
        }
        simplex.swap(s2);
        fv.swap(f2);
      }
      if (fv[n] - fv[0] <= stall(fv[0])) {
        stalled = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
      for (double& c : centroid) c /= static_cast<double>(n);

      const auto& worst = simplex[n];
      for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + opts.reflection * (centroid[i] - worst[i]);
      clamp(xr);
      const double fr = eval(xr);

      if (fr < fv[0]) {
        for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + opts.expansion * (xr[i] - centroid[i]);
        clamp(xe);
        const double fe = res.n_evals < opts.max_evals ? eval(xe) : std::numeric_limits<double>::infinity();
        if (fe < fr) {
          simplex[n] = xe;
          fv[n] = fe;
        } else {
          simplex[n] = xr;
          fv[n] = fr;
        }
        continue;
      }
      if (fr < fv[n - 1]) {
        simplex[n] = xr;
        fv[n] = fr;
        continue;
      }
      const bool outside = fr < fv[n];
      for (std::size_t i = 0; i < n; ++i) {
        xc[i] = outside ? centroid[i] + opts.contraction * (xr[i] - centroid[i])
                        : centroid[i] + opts.contraction * (worst[i] - centroid[i]);
      }
      clamp(xc);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
        continue;
      }
      for (std::size_t k = 1; k <= n && res.n_evals < opts.max_evals; ++k) {
        for (std::size_t i = 0; i < n; ++i)
          simplex[k][i] = simplex[0][i] + opts.shrink * (simplex[k][i] - simplex[0][i]);
        clamp(simplex[k]);
        fv[k] = eval(simplex[k]);
      }
    }

    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    if (fv[best] < res.f) {
      res.f = fv[best];
      res.x = simplex[best];
    }
    if (!stalled) break;
    if (!first_round && f_round_start - res.f <= stall(res.f)) {
      res.converged = true;
      break;
    }
    first_round = false;
    ++res.n_restarts;
    step_fraction = std::max(step_fraction * 0.5, 1e-6);
  }
  return res;
}

}  // namespace thermrom
