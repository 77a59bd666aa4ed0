#pragma once

// Nonlinear lumped RC building simulator used as ground truth for fits.
//
// Each node i carries a heat capacitance C_i [J/K] and evolves as
//
//   C_i dT_i/dt = sum_j K_ij (T_j - T_i)
//               + eps_i sigma_B A_i ((T_amb + 273.15)^4 - (T_i + 273.15)^4)
//               + G_i I(t - phase_i)
//
// with conductances K [W/K], t in seconds inside the integrator and hours at
// the interface. Outdoor temperature and irradiance are interpolated linearly
// between the hourly weather samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "thermrom/error.hpp"
#include "thermrom/time_series.hpp"

namespace thermrom {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W m^-2 K^-4
inline constexpr double kKelvinOffset = 273.15;
inline constexpr std::size_t kAmbient = std::numeric_limits<std::size_t>::max();
inline constexpr double kInstabilityLimit = 200.0;  // C

struct ThermalNode {
  std::string name;
  double capacitance = 0.0;   ///< J/K
  double initial_temp = 0.0;  ///< C
  double volume = 0.0;        ///< m^3, used for zone aggregation
  bool is_zone_air = false;
};

/// Conductive link; `to == kAmbient` couples the node to outdoor air.
struct ThermalEdge {
  std::size_t from = 0;
  std::size_t to = kAmbient;
  double conductance = 0.0;  ///< W/K
};

/// Long-wave exchange with the sky, taken at outdoor air temperature.
struct RadiativeSurface {
  std::size_t node = 0;
  double emissivity = 0.0;
  double area = 0.0;  ///< m^2
};

/// Solar gain G * I(t - phase): G in W per W/m^2, phase in hours.
struct SolarAperture {
  std::size_t node = 0;
  double gain = 0.0;
  double phase_hours = 0.0;
};

struct ZoneNetwork {
  std::vector<ThermalNode> nodes;
  std::vector<ThermalEdge> edges;
  std::vector<RadiativeSurface> radiation;
  std::vector<SolarAperture> solar;

  std::vector<std::size_t> zone_nodes() const {
    std::vector<std::size_t> z;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].is_zone_air) z.push_back(i);
    return z;
  }
};

enum class AmbientCoupling { required, optional };

inline void validate(const ZoneNetwork& net, AmbientCoupling coupling = AmbientCoupling::required) {
  const std::size_t n = net.nodes.size();
  if (n == 0) throw DataError("network has no nodes");
  for (const auto& node : net.nodes) {
    if (!(node.capacitance > 0.0) || !std::isfinite(node.capacitance)) {
      throw DataError("node '" + node.name + "': capacitance must be > 0");
    }
    if (!std::isfinite(node.initial_temp)) throw DataError("node '" + node.name + "': non-finite initial temperature");
    if (node.is_zone_air && !(node.volume > 0.0)) throw DataError("zone node '" + node.name + "': volume must be > 0");
  }
  if (net.zone_nodes().empty()) throw DataError("network has no zone-air node");
  for (const auto& e : net.edges) {
    if (e.from >= n || (e.to != kAmbient && e.to >= n) || e.from == e.to) {
      throw DataError("network edge references an invalid node");
    }
    if (!(e.conductance >= 0.0) || !std::isfinite(e.conductance)) throw DataError("network edge conductance must be >= 0");
  }
  for (const auto& r : net.radiation) {
    if (r.node >= n) throw DataError("radiative surface references an invalid node");
    if (!(r.emissivity >= 0.0 && r.emissivity <= 1.0)) throw DataError("emissivity must lie in [0, 1]");
    if (!(r.area >= 0.0)) throw DataError("radiating area must be >= 0");
  }
  for (const auto& s : net.solar) {
    if (s.node >= n) throw DataError("solar aperture references an invalid node");
    if (!std::isfinite(s.gain) || !std::isfinite(s.phase_hours)) throw DataError("solar aperture values must be finite");
  }
  if (coupling == AmbientCoupling::optional) return;

  // Every node must reach AMBIENT through links that can carry heat.
  std::vector<char> reached(n, 0);
  std::vector<std::size_t> stack;
  for (const auto& e : net.edges) {
    if (e.to == kAmbient && e.conductance > 0.0 && !reached[e.from]) {
      reached[e.from] = 1;
      stack.push_back(e.from);
    }
  }
  for (const auto& r : net.radiation) {
    if (r.emissivity > 0.0 && r.area > 0.0 && !reached[r.node]) {
      reached[r.node] = 1;
      stack.push_back(r.node);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (const auto& e : net.edges) {
      if (e.to == kAmbient || !(e.conductance > 0.0)) continue;
      const std::size_t other = e.from == i ? e.to : (e.to == i ? e.from : kAmbient);
      if (other != kAmbient && !reached[other]) {
        reached[other] = 1;
        stack.push_back(other);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i]) throw DataError("node '" + net.nodes[i].name + "' is not connected to AMBIENT");
  }
}

// ---------------------------------------------------------------------------
// Weather

struct WeatherSeries {
  std::vector<double> t;                 ///< hours
  std::vector<double> outdoor_temp;      ///< C
  std::vector<double> solar_irradiance;  ///< W/m^2

  std::size_t size() const { return t.size(); }
  TimeSeries outdoor(std::string label = "t_out") const { return TimeSeries(t, outdoor_temp, std::move(label)); }

  friend bool operator==(const WeatherSeries&, const WeatherSeries&) = default;
};

inline void validate(const WeatherSeries& w) {
  if (w.outdoor_temp.size() != w.t.size() || w.solar_irradiance.size() != w.t.size()) {
    throw DataError("weather series columns differ in length");
  }
  if (w.t.size() < 2) throw DataError("weather series needs >= 2 samples");
  uniform_spacing(TimeSeries(w.t, w.outdoor_temp, "t_out"));
  for (std::size_t k = 0; k < w.t.size(); ++k) {
    if (!std::isfinite(w.outdoor_temp[k])) throw DataError("weather: non-finite outdoor temperature at sample " + std::to_string(k));
    if (!(w.solar_irradiance[k] >= 0.0)) throw DataError("weather: negative irradiance at sample " + std::to_string(k));
  }
}

enum class WeatherProfile { mild_coastal, hot_inland };

inline WeatherProfile parse_weather_profile(std::string_view s) {
  if (s == "mild_coastal") return WeatherProfile::mild_coastal;
  if (s == "hot_inland") return WeatherProfile::hot_inland;
  throw DataError("unknown weather profile '" + std::string(s) + "' (mild_coastal|hot_inland)");
}

inline std::string_view to_string(WeatherProfile p) {
  return p == WeatherProfile::mild_coastal ? "mild_coastal" : "hot_inland";
}

struct WeatherParams {
  double mean = 14.0;            ///< C
  double amplitude = 5.0;        ///< C, daily half swing
  double peak_hour = 15.0;       ///< hour of day of the daily maximum
  double drift_per_day = 0.05;   ///< C/day seasonal trend
  double noise_sigma = 0.8;      ///< C, stationary std of the AR(1) term
  double noise_ar = 0.8;         ///< AR(1) coefficient per hour
  double solar_peak = 650.0;     ///< W/m^2 on a clear day
  double sunrise = 6.5;          ///< hour of day
  double sunset = 18.0;          ///< hour of day
  double min_clearness = 0.55;   ///< daily clearness index drawn in [min, 1]
};

inline WeatherParams weather_params(WeatherProfile p) {
  WeatherParams w;
  if (p == WeatherProfile::hot_inland) {
    w.mean = 24.0;
    w.amplitude = 9.0;
    w.peak_hour = 16.0;
    w.drift_per_day = 0.1;
    w.noise_sigma = 1.0;
    w.solar_peak = 900.0;
    w.sunrise = 5.5;
    w.sunset = 19.5;
    w.min_clearness = 0.8;
  }
  return w;
}

/// Hourly synthetic weather, days * 24 samples at t = 0, 1, ... (t = 0 is
/// midnight). Deterministic for a given seed.
inline WeatherSeries synth_weather(std::size_t days, std::uint64_t seed, const WeatherParams& p) {
  if (days < 1) throw DataError("synth_weather: days must be >= 1");
  constexpr double kTwoPi = 6.283185307179586;
  constexpr double kPi = 3.141592653589793;
  const std::size_t n = days * 24;
  WeatherSeries w;
  w.t.resize(n);
  w.outdoor_temp.resize(n);
  w.solar_irradiance.resize(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> clear(p.min_clearness, 1.0);
  const double innovation = p.noise_sigma * std::sqrt(1.0 - p.noise_ar * p.noise_ar);

  double noise = 0.0;
  double clearness = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k);
    const double hour_of_day = static_cast<double>(k % 24);
    if (k % 24 == 0) clearness = clear(rng);
    const double xi = gauss(rng);
    noise = k == 0 ? p.noise_sigma * xi : p.noise_ar * noise + innovation * xi;

    w.t[k] = t;
    w.outdoor_temp[k] = p.mean + p.amplitude * std::cos(kTwoPi * (t - p.peak_hour) / 24.0) +
                        p.drift_per_day * t / 24.0 + noise;
    double irr = 0.0;
    if (hour_of_day > p.sunrise && hour_of_day < p.sunset) {
      irr = p.solar_peak * clearness * std::sin(kPi * (hour_of_day - p.sunrise) / (p.sunset - p.sunrise));
    }
    w.solar_irradiance[k] = std::max(0.0, irr);
  }
  return w;
}

inline WeatherSeries synth_weather(std::size_t days, std::uint64_t seed, WeatherProfile profile) {
  return synth_weather(days, seed, weather_params(profile));
}

// ---------------------------------------------------------------------------
// Integration

namespace detail {

// Linear interpolation on a uniform grid, clamped at both ends.
inline double interpolate(const std::vector<double>& v, double t0, double dt, double t) {
  const double x = (t - t0) / dt;
  if (x <= 0.0) return v.front();
  const double last = static_cast<double>(v.size() - 1);
  if (x >= last) return v.back();
  const auto k = static_cast<std::size_t>(x);
  const double f = x - static_cast<double>(k);
  return v[k] + f * (v[k + 1] - v[k]);
}

struct NetworkRhs {
  const ZoneNetwork& net;
  const WeatherSeries& w;
  double t0, dt_hours;
  std::vector<double> inv_c;

  NetworkRhs(const ZoneNetwork& n, const WeatherSeries& weather)
      : net(n), w(weather), t0(weather.t.front()), dt_hours(weather.t[1] - weather.t[0]) {
    for (const auto& node : net.nodes) inv_c.push_back(1.0 / node.capacitance);
  }

  // t in hours; dT/dt in K/s.
  void operator()(double t, const std::vector<double>& temp, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const double t_amb = interpolate(w.outdoor_temp, t0, dt_hours, t);
    for (const auto& e : net.edges) {
      const double other = e.to == kAmbient ? t_amb : temp[e.to];
      const double q = e.conductance * (other - temp[e.from]);
      out[e.from] += q;
      if (e.to != kAmbient) out[e.to] -= q;
    }
    if (!net.radiation.empty()) {
      const double ta = t_amb + kKelvinOffset;
      const double ta4 = (ta * ta) * (ta * ta);
      for (const auto& r : net.radiation) {
        const double ti = temp[r.node] + kKelvinOffset;
        out[r.node] += r.emissivity * kStefanBoltzmann * r.area * (ta4 - (ti * ti) * (ti * ti));
      }
    }
    for (const auto& s : net.solar) {
      out[s.node] += s.gain * interpolate(w.solar_irradiance, t0, dt_hours, t - s.phase_hours);
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv_c[i];
  }
};

}  // namespace detail

inline constexpr std::size_t kDefaultSubsteps = 60;

/// Temperatures of every node at the weather timestamps, RK4 with `substeps`
/// steps per weather sample.
inline std::vector<TimeSeries> simulate_network_states(const ZoneNetwork& net, const WeatherSeries& w,
                                                       std::size_t substeps = kDefaultSubsteps,
                                                       AmbientCoupling coupling = AmbientCoupling::required) {
  validate(net, coupling);
  validate(w);
  if (substeps < 1) throw DataError("simulate_network: substeps must be >= 1");

  const std::size_t n_nodes = net.nodes.size();
  const std::size_t n = w.size();
  const detail::NetworkRhs rhs(net, w);
  const double h_hours = rhs.dt_hours / static_cast<double>(substeps);
  const double h_sec = h_hours * 3600.0;

  std::vector<TimeSeries> out;
  for (const auto& node : net.nodes) out.emplace_back(w.t, std::vector<double>(n, 0.0), node.name);

  std::vector<double> temp(n_nodes), k1(n_nodes), k2(n_nodes), k3(n_nodes), k4(n_nodes), tmp(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    temp[i] = net.nodes[i].initial_temp;
    out[i].v[0] = temp[i];
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = 0; j < substeps; ++j) {
      const double t = w.t[k] + static_cast<double>(j) * h_hours;
      rhs(t, temp, k1);
      for (std::size_t i = 0; i < n_nodes; ++i) tmp[i] = temp[i] + 0.5 * h_sec * k1[i];
      rhs(t + 0.5 * h_hours, tmp, k2);
      for (std::size_t i = 0; i < n_nodes; ++i) tmp[i] = temp[i] + 0.5 * h_sec * k2[i];
      rhs(t + 0.5 * h_hours, tmp, k3);
      for (std::size_t i = 0; i < n_nodes; ++i) tmp[i] = temp[i] + h_sec * k3[i];
      rhs(t + h_hours, tmp, k4);
      for (std::size_t i = 0; i < n_nodes; ++i) {
        temp[i] += h_sec / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!(std::abs(temp[i]) <= kInstabilityLimit)) {
          throw SimulationError("simulate_network: node '" + net.nodes[i].name + "' left +-200 C at hour " +
                                std::to_string(k) + ", substep " + std::to_string(j + 1) +
                                " (reduce the step or check the network)");
        }
      }
    }
    for (std::size_t i = 0; i < n_nodes; ++i) out[i].v[k + 1] = temp[i];
  }
  return out;
}

/// Zone-air temperatures only, in node order.
inline std::vector<TimeSeries> simulate_network(const ZoneNetwork& net, const WeatherSeries& w,
                                                std::size_t substeps = kDefaultSubsteps) {
  auto all = simulate_network_states(net, w, substeps);
  std::vector<TimeSeries> zones;
  for (std::size_t i : net.zone_nodes()) zones.push_back(std::move(all[i]));
  return zones;
}

/// Pointwise volume-weighted mean of zone series.
inline TimeSeries aggregate_zones(const std::vector<TimeSeries>& zones, const std::vector<double>& volumes) {
  if (zones.empty()) throw DataError("aggregate_zones: no zones");
  if (zones.size() != volumes.size()) {
    throw DataError("aggregate_zones: " + std::to_string(zones.size()) + " zones but " +
                    std::to_string(volumes.size()) + " volumes");
  }
  double total = 0.0;
  for (double v : volumes) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError("aggregate_zones: volumes must be > 0");
    total += v;
  }
  for (const auto& z : zones) require_aligned(zones.front(), z);
  TimeSeries agg(zones.front().t, std::vector<double>(zones.front().size(), 0.0), "t_in_agg");
  for (std::size_t k = 0; k < agg.size(); ++k) {
    double s = 0.0;
    for (std::size_t z = 0; z < zones.size(); ++z) s += volumes[z] * zones[z].v[k];
    agg.v[k] = s / total;
  }
  return agg;
}

}  // namespace thermrom
