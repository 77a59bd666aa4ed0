#pragma once

// Second-order zone temperature model
//
//   c1 x'' + c2 x' + c3 x = u + c4
//
// with x the zone air temperature [C], u the outdoor temperature [C] and t in
// hours. c1 plays the role of a thermal mass, c2 a damping (insulation) term,
// c3 a global conduction stiffness and c4 a constant radiative offset.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "thermrom/error.hpp"

namespace thermrom {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

struct RomCoefficients {
  double c1 = 1.0;
  double c2 = 0.0;
  double c3 = 1.0;
  double c4 = 0.0;

  friend bool operator==(const RomCoefficients&, const RomCoefficients&) = default;
};

/// Companion-form realization with state (x, x'):
///
///   d/dt [x, x'] = a [x, x'] + b u + d
///
/// a = [[0, 1], [-c3/c1, -c2/c1]], b = [0, 1/c1], d = [0, c4/c1].
struct StateSpaceModel {
  Mat2 a{};
  Vec2 b{};
  Vec2 d{};

  friend bool operator==(const StateSpaceModel&, const StateSpaceModel&) = default;
};

enum class DampingRegime { underdamped, critically_damped, overdamped };

inline std::string_view to_string(DampingRegime r) {
  switch (r) {
    case DampingRegime::underdamped: return "underdamped";
    case DampingRegime::critically_damped: return "critically_damped";
    case DampingRegime::overdamped: return "overdamped";
  }
  return "unknown";
}

struct ModalParameters {
  double omega_n = 0.0;  ///< undamped natural frequency [1/h]
  double xi = 0.0;       ///< damping ratio
  double sigma = 0.0;    ///< real part of the dominant eigenvalue pair [1/h]
  double omega = 0.0;    ///< damped frequency [1/h], 0 unless underdamped
  DampingRegime regime = DampingRegime::underdamped;
  /// Underdamped: sigma + i omega, sigma - i omega. Real cases: slow root
  /// first (smallest magnitude).
  std::array<std::complex<double>, 2> eigenvalues{};
};

inline constexpr double kCriticalDampingTol = 1e-9;

inline void require_positive_c1(const RomCoefficients& c) {
  if (!(c.c1 > 0.0) || !std::isfinite(c.c1)) {
    throw DomainError("coefficient c1 must be finite and > 0, got " + std::to_string(c.c1));
  }
}

/// c1 > 0, c2 >= 0, c3 > 0 and all finite.
inline bool is_admissible(const RomCoefficients& c) {
  return std::isfinite(c.c1) && std::isfinite(c.c2) && std::isfinite(c.c3) &&
         std::isfinite(c.c4) && c.c1 > 0.0 && c.c2 >= 0.0 && c.c3 > 0.0;
}

inline StateSpaceModel to_state_space(const RomCoefficients& c) {
  require_positive_c1(c);
  StateSpaceModel m;
  m.a = {Vec2{0.0, 1.0}, Vec2{-c.c3 / c.c1, -c.c2 / c.c1}};
  m.b = {0.0, 1.0 / c.c1};
  m.d = {0.0, c.c4 / c.c1};
  return m;
}

inline RomCoefficients from_state_space(const StateSpaceModel& m) {
  if (m.a[0][0] != 0.0 || m.a[0][1] != 1.0 || m.b[0] != 0.0 || m.d[0] != 0.0) {
    throw DomainError("state-space model is not in companion form");
  }
  if (!(m.b[1] > 0.0) || !std::isfinite(m.b[1])) {
    throw DomainError("input gain b[1] must be finite and > 0");
  }
  RomCoefficients c;
  c.c1 = 1.0 / m.b[1];
  c.c2 = -m.a[1][1] * c.c1;
  c.c3 = -m.a[1][0] * c.c1;
  c.c4 = m.d[1] * c.c1;
  return c;
}

/// Coefficients divided through by c1. Same dynamics, different input scale.
inline RomCoefficients normalized(const RomCoefficients& c) {
  require_positive_c1(c);
  return {1.0, c.c2 / c.c1, c.c3 / c.c1, c.c4 / c.c1};
}

inline ModalParameters modal_analysis(const RomCoefficients& c) {
  require_positive_c1(c);
  if (!(c.c3 > 0.0)) throw DomainError("coefficient c3 must be > 0 for modal analysis");

  ModalParameters p;
  p.omega_n = std::sqrt(c.c3 / c.c1);
  p.xi = c.c2 / (2.0 * std::sqrt(c.c1 * c.c3));
  p.sigma = -c.c2 / (2.0 * c.c1);

  if (std::abs(p.xi - 1.0) <= kCriticalDampingTol) {
    p.regime = DampingRegime::critically_damped;
    p.eigenvalues = {std::complex<double>{p.sigma, 0.0}, std::complex<double>{p.sigma, 0.0}};
    return p;
  }
  const double disc = c.c2 * c.c2 - 4.0 * c.c1 * c.c3;
  if (p.xi < 1.0) {
    p.regime = DampingRegime::underdamped;
    p.omega = p.omega_n * std::sqrt((1.0 - p.xi) * (1.0 + p.xi));
    p.eigenvalues = {std::complex<double>{p.sigma, p.omega},
                     std::complex<double>{p.sigma, -p.omega}};
    return p;
  }
  // Cancellation-free real roots; c2 > 0 here since xi > 1.
  p.regime = DampingRegime::overdamped;
  const double q = -0.5 * (c.c2 + std::sqrt(std::max(disc, 0.0)));
  const double fast = q / c.c1;
  const double slow = c.c3 / q;
  p.eigenvalues = {std::complex<double>{slow, 0.0}, std::complex<double>{fast, 0.0}};
  return p;
}

/// Equilibrium temperature for constant input: (u + c4) / c3.
inline double steady_state(const RomCoefficients& c, double u_const) {
  if (!(c.c3 > 0.0) || !std::isfinite(c.c3)) {
    throw DomainError("steady state needs c3 > 0, got " + std::to_string(c.c3));
  }
  return (u_const + c.c4) / c.c3;
}

}  // namespace thermrom
