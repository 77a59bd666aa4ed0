#pragma once

// Forward simulation of the companion-form model under a sampled input held
// constant between samples (zero-order hold).

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>

#include "thermrom/error.hpp"
#include "thermrom/rom_core.hpp"
#include "thermrom/time_series.hpp"

namespace thermrom {

enum class IntegrationMethod { exact_zoh, rk4 };

inline std::string_view to_string(IntegrationMethod m) {
  return m == IntegrationMethod::exact_zoh ? "exact_zoh" : "rk4";
}

inline IntegrationMethod parse_integration_method(std::string_view s) {
  if (s == "exact_zoh") return IntegrationMethod::exact_zoh;
  if (s == "rk4") return IntegrationMethod::rk4;
  throw DataError("unknown integration method '" + std::string(s) + "' (exact_zoh|rk4)");
}

struct SimConfig {
  double dt = 1.0;  ///< hours; sample spacing (exact_zoh) or RK4 substep
  IntegrationMethod method = IntegrationMethod::exact_zoh;
  double x0 = 0.0;  ///< initial temperature [C]
  double v0 = 0.0;  ///< initial rate [C/h]
};

/// Discrete update state_{k+1} = ad * state_k + bd * u_k + dd.
struct DiscreteStep {
  Mat2 ad{};
  Vec2 bd{};
  Vec2 dd{};
};

inline Vec2 mul(const Mat2& m, const Vec2& x) {
  return {m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]};
}

inline Mat2 mul(const Mat2& p, const Mat2& q) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
  return r;
}

namespace detail {

// Relative eigenvalue gap below which the confluent (series) form is used.
inline constexpr double kRepeatedEigenTol = 1e-7;

// alpha I + beta A
inline Mat2 affine_of(const Mat2& a, double alpha, double beta) {
  return {Vec2{alpha + beta * a[0][0], beta * a[0][1]},
          Vec2{beta * a[1][0], alpha + beta * a[1][1]}};
}

// (e^z - 1) / z
inline std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 1e-3) {
    std::complex<double> term = 1.0, sum = 1.0;
    for (int j = 1; j <= 6; ++j) {
      term *= z / static_cast<double>(j + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

// I_k = int_0^t tau^k e^{mu tau} dtau for k = 0..3.
inline std::array<double, 4> moment_integrals(double mu, double t) {
  std::array<double, 4> out{};
  const double z = mu * t;
  if (std::abs(z) < 1.0) {
    // t^{k+1} sum_j z^j / (j! (j + k + 1))
    for (int k = 0; k < 4; ++k) {
      double term = 1.0, sum = 1.0 / (k + 1);
      for (int j = 1; j < 40; ++j) {
        term *= z / j;
        const double add = term / (j + k + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      }
      out[static_cast<std::size_t>(k)] = std::pow(t, k + 1) * sum;
    }
    return out;
  }
  const double e = std::exp(z);
  out[0] = std::expm1(z) / mu;
  for (int k = 1; k < 4; ++k) {
    out[static_cast<std::size_t>(k)] =
        (std::pow(t, k) * e - k * out[static_cast<std::size_t>(k - 1)]) / mu;
  }
  return out;
}

}  // namespace detail

/// Exact ZOH discretization over dt hours. Closed form from the eigenvalues
/// of the 2x2 system matrix; f(A) = alpha I + beta A with f = exp(.dt) for ad
/// and f = int_0^dt exp(.tau) dtau for the input/offset gains.
inline DiscreteStep step_matrix(const StateSpaceModel& m, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step_matrix: dt must be > 0");
  const Mat2& a = m.a;
  const double mu = 0.5 * (a[0][0] + a[1][1]);
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double q = mu * mu - det;  // ((lambda1 - lambda2) / 2)^2
  const std::complex<double> half_gap = std::sqrt(std::complex<double>(q, 0.0));
  const std::complex<double> l1 = mu + half_gap;
  const std::complex<double> l2 = mu - half_gap;

  double exp_alpha, exp_beta, int_alpha, int_beta;
  const double gap = 2.0 * std::abs(half_gap);
  if (gap < detail::kRepeatedEigenTol * std::max(1.0, std::abs(l1))) {
    // Taylor expansion about mu in powers of q:
    //   beta  = f'(mu) + f'''(mu) q / 6,   (f(l1) + f(l2)) / 2 = f(mu) + f''(mu) q / 2
    const double e = std::exp(mu * dt);
    const double f0 = e, f1 = dt * e, f2 = dt * dt * e, f3 = dt * dt * dt * e;
    exp_beta = f1 + f3 * q / 6.0;
    exp_alpha = f0 + f2 * q / 2.0 - exp_beta * mu;
    const auto I = detail::moment_integrals(mu, dt);
    int_beta = I[1] + I[3] * q / 6.0;
    int_alpha = I[0] + I[2] * q / 2.0 - int_beta * mu;
  } else if (q < 0.0) {
    // Complex pair mu +- i w.
    const double w = std::sqrt(-q);
    const double e = std::exp(mu * dt);
    const double c = std::cos(w * dt), s = std::sin(w * dt);
    exp_beta = e * s / w;
    exp_alpha = e * c - exp_beta * mu;
    const std::complex<double> h1 = dt * detail::phi1(l1 * dt);
    int_beta = h1.imag() / w;
    int_alpha = h1.real() - int_beta * mu;
  } else {
    const double r1 = l1.real(), r2 = l2.real();
    const double e1 = std::exp(r1 * dt), e2 = std::exp(r2 * dt);
    exp_beta = (e1 - e2) / (r1 - r2);
    exp_alpha = e1 - exp_beta * r1;
    const double h1 = (dt * detail::phi1(r1 * dt)).real();
    const double h2 = (dt * detail::phi1(r2 * dt)).real();
    int_beta = (h1 - h2) / (r1 - r2);
    int_alpha = h1 - int_beta * r1;
  }

  DiscreteStep s;
  s.ad = detail::affine_of(a, exp_alpha, exp_beta);
  const Mat2 gamma = detail::affine_of(a, int_alpha, int_beta);
  s.bd = mul(gamma, m.b);
  s.dd = mul(gamma, m.d);
  return s;
}

namespace detail {

inline Vec2 rhs(const StateSpaceModel& m, const Vec2& s, double u) {
  const Vec2 as = mul(m.a, s);
  return {as[0] + m.b[0] * u + m.d[0], as[1] + m.b[1] * u + m.d[1]};
}

inline Vec2 axpy(const Vec2& x, double h, const Vec2& k) { return {x[0] + h * k[0], x[1] + h * k[1]}; }

inline Vec2 rk4_step(const StateSpaceModel& m, const Vec2& s, double u, double h) {
  const Vec2 k1 = rhs(m, s, u);
  const Vec2 k2 = rhs(m, axpy(s, 0.5 * h, k1), u);
  const Vec2 k3 = rhs(m, axpy(s, 0.5 * h, k2), u);
  const Vec2 k4 = rhs(m, axpy(s, h, k3), u);
  return {s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

}  // namespace detail

/// Finite-difference estimate of x'(0) from the first two samples.
inline double default_initial_rate(const TimeSeries& indoor) {
  if (indoor.size() < 2) throw DataError("initial rate needs >= 2 indoor samples");
  return (indoor.v[1] - indoor.v[0]) / (indoor.t[1] - indoor.t[0]);
}

/// Temperature response to input u. Output has u's timestamps; sample 0 is
/// cfg.x0 and u[k] is held over [t_k, t_{k+1}).
inline TimeSeries simulate(const StateSpaceModel& m, const TimeSeries& u, const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw DomainError("simulate: dt must be > 0");
  if (!std::isfinite(cfg.x0) || !std::isfinite(cfg.v0)) throw DataError("simulate: non-finite initial state");
  require_finite(u);
  const std::size_t n = u.size();
  TimeSeries out(u.t, std::vector<double>(n, 0.0), "t_model");
  if (n == 0) return out;

  std::size_t substeps = 1;
  if (n >= 2) {
    const double spacing = uniform_spacing(u);
    if (cfg.method == IntegrationMethod::exact_zoh) {
      if (std::abs(spacing - cfg.dt) > kUniformSpacingTol) {
        throw DataError("simulate: input spacing " + std::to_string(spacing) +
                        " h differs from dt " + std::to_string(cfg.dt) + " h");
      }
    } else {
      const double ratio = spacing / cfg.dt;
      const double rounded = std::round(ratio);
      if (rounded < 1.0 || std::abs(rounded * cfg.dt - spacing) > kUniformSpacingTol * std::max(1.0, spacing)) {
        throw DataError("simulate: input spacing is not an integer multiple of the RK4 step");
      }
      substeps = static_cast<std::size_t>(rounded);
    }
  }

  Vec2 s{cfg.x0, cfg.v0};
  out.v[0] = s[0];
  if (cfg.method == IntegrationMethod::exact_zoh) {
    const DiscreteStep step = step_matrix(m, cfg.dt);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const Vec2 as = mul(step.ad, s);
      s = {as[0] + step.bd[0] * u.v[k] + step.dd[0], as[1] + step.bd[1] * u.v[k] + step.dd[1]};
      out.v[k + 1] = s[0];
    }
  } else {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      for (std::size_t j = 0; j < substeps; ++j) s = detail::rk4_step(m, s, u.v[k], cfg.dt);
      out.v[k + 1] = s[0];
    }
  }
  return out;
}

}  // namespace thermrom
