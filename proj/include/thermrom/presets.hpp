#pragma once

// Building presets for the reference simulator and dataset generation.
//
// All constants below are invented, non-calibrated values. They only honour
// qualitative orderings between constructions: heavier walls carry more
// capacitance and added insulation lowers the conductances through the wall.
// Capacitances are effective values (air plus coupled furnishing/wall mass).

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "thermrom/error.hpp"
#include "thermrom/io_metrics.hpp"
#include "thermrom/refsim.hpp"
#include "thermrom/time_series.hpp"

namespace thermrom {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"standard", "brick", "brick_insulation",
                                              "brick_insulation_concrete", "multizone4"};
  return names;
}

inline const std::vector<std::string>& single_zone_preset_names() {
  static const std::vector<std::string> names{"standard", "brick", "brick_insulation",
                                              "brick_insulation_concrete"};
  return names;
}

namespace detail {

struct SingleZoneLayout {
  double c_air;        // zone air + furnishings, J/K
  double c_inner;      // interior finish / inner wall layer, J/K
  double c_outer;      // structural wall layer, J/K
  double k_window;     // windows, door and infiltration, W/K
  double k_air_inner;  // zone air <-> inner layer
  double k_wall;       // inner <-> outer layer, through the insulation
  double k_film;       // outer layer <-> outdoor air, convective film
  double emissivity;
  double wall_area;    // m^2, radiating envelope
  double solar_gain;   // W per W/m^2 through the glazing
  double volume;       // m^3
};

inline ZoneNetwork single_zone(const SingleZoneLayout& p) {
  ZoneNetwork net;
  net.nodes = {{"zone_air", p.c_air, 15.0, p.volume, true},
               {"wall_inner", p.c_inner, 15.0, 0.0, false},
               {"wall_outer", p.c_outer, 14.0, 0.0, false}};
  net.edges = {{0, kAmbient, p.k_window}, {0, 1, p.k_air_inner}, {1, 2, p.k_wall}, {2, kAmbient, p.k_film}};
  net.radiation = {{2, p.emissivity, p.wall_area}};
  net.solar = {{0, p.solar_gain, 0.0}};
  return net;
}

// 11.86 m x 13.99 m x 4.57 m test building.
inline constexpr double kTestBuildingVolume = 11.86 * 13.99 * 4.57;
inline constexpr double kTestBuildingWallArea = 2.0 * (11.86 + 13.99) * 4.57;

}  // namespace detail

/// Network for a named construction. Throws DataError for unknown names.
inline ZoneNetwork preset(std::string_view name) {
  using detail::SingleZoneLayout;
  const double vol = detail::kTestBuildingVolume;
  const double area = detail::kTestBuildingWallArea;

  // Steel frame: gypsum, batt insulation, sheathing.
  if (name == "standard") {
    return detail::single_zone(SingleZoneLayout{1.5e6, 2.5e6, 2.0e6, 20.0, 350.0, 600.0, 2500.0, 0.9, area, 0.3, vol});
  }
  // Stucco + 8in concrete + gypsum + one insulation layer.
  if (name == "brick") {
    return detail::single_zone(SingleZoneLayout{1.5e6, 5.0e6, 8.0e6, 20.0, 350.0, 600.0, 2500.0, 0.9, area, 0.3, vol});
  }
  // Brick with a second insulation layer.
  if (name == "brick_insulation") {
    return detail::single_zone(SingleZoneLayout{1.5e6, 5.0e6, 8.0e6, 20.0, 350.0, 300.0, 2500.0, 0.9, area, 0.3, vol});
  }
  // Brick with a second insulation layer and an extra 8in concrete layer.
  if (name == "brick_insulation_concrete") {
    return detail::single_zone(SingleZoneLayout{2.0e6, 1.0e7, 1.6e7, 20.0, 350.0, 300.0, 2500.0, 0.9, area, 0.3, vol});
  }
  // Four rooms inside one shared two-layer envelope. Rooms face east,
  // south, west and north (solar phase -3, 0, +3 h; north sees diffuse light
  // only).
  if (name == "multizone4") {
    ZoneNetwork net;
    const double v[4] = {220.0, 160.0, 180.0, 120.0};
    const char* names[4] = {"zone1", "zone2", "zone3", "zone4"};
    for (int i = 0; i < 4; ++i) {
      net.nodes.push_back({names[i], 1.5e6 * v[i] / 680.0, 15.0, v[i], true});
    }
    net.nodes.push_back({"wall_inner", 4.0e6, 15.0, 0.0, false});
    net.nodes.push_back({"wall_outer", 4.0e6, 14.0, 0.0, false});
    const double k_window[4] = {6.0, 5.0, 5.0, 4.0};
    const double k_wall[4] = {110.0, 80.0, 90.0, 70.0};
    for (std::size_t i = 0; i < 4; ++i) {
      net.edges.push_back({i, kAmbient, k_window[i]});
      net.edges.push_back({i, 4, k_wall[i]});
    }
    net.edges.push_back({0, 1, 90.0});
    net.edges.push_back({1, 2, 80.0});
    net.edges.push_back({2, 3, 70.0});
    net.edges.push_back({3, 0, 60.0});
    net.edges.push_back({4, 5, 600.0});
    net.edges.push_back({5, kAmbient, 2500.0});
    net.radiation = {{5, 0.9, 330.0}};
    net.solar = {{0, 0.1, -3.0}, {1, 0.12, 0.0}, {2, 0.1, 3.0}, {3, 0.03, 0.0}};
    return net;
  }
  throw DataError("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Preset JSON, for reproducibility records.

inline nlohmann::ordered_json network_to_json(const ZoneNetwork& net) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    j["nodes"].push_back({{"name", n.name},
                          {"capacitance", n.capacitance},
                          {"initial_temp", n.initial_temp},
                          {"volume", n.volume},
                          {"is_zone_air", n.is_zone_air}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : net.edges) {
    nlohmann::ordered_json to = e.to == kAmbient ? nlohmann::ordered_json("AMBIENT") : nlohmann::ordered_json(e.to);
    j["edges"].push_back({{"from", e.from}, {"to", to}, {"conductance", e.conductance}});
  }
  j["radiation"] = nlohmann::ordered_json::array();
  for (const auto& r : net.radiation) {
    j["radiation"].push_back({{"node", r.node}, {"emissivity", r.emissivity}, {"area", r.area}});
  }
  j["solar"] = nlohmann::ordered_json::array();
  for (const auto& s : net.solar) {
    j["solar"].push_back({{"node", s.node}, {"gain", s.gain}, {"phase_hours", s.phase_hours}});
  }
  return j;
}

inline ZoneNetwork network_from_json(const nlohmann::json& j) {
  ZoneNetwork net;
  try {
    for (const auto& n : j.at("nodes")) {
      net.nodes.push_back({n.at("name").get<std::string>(), n.at("capacitance").get<double>(),
                           n.at("initial_temp").get<double>(), n.at("volume").get<double>(),
                           n.at("is_zone_air").get<bool>()});
    }
    for (const auto& e : j.at("edges")) {
      const auto& to = e.at("to");
      const std::size_t target = to.is_string() && to.get<std::string>() == "AMBIENT" ? kAmbient : to.get<std::size_t>();
      net.edges.push_back({e.at("from").get<std::size_t>(), target, e.at("conductance").get<double>()});
    }
    for (const auto& r : j.at("radiation")) {
      net.radiation.push_back({r.at("node").get<std::size_t>(), r.at("emissivity").get<double>(), r.at("area").get<double>()});
    }
    for (const auto& s : j.at("solar")) {
      net.solar.push_back({s.at("node").get<std::size_t>(), s.at("gain").get<double>(), s.at("phase_hours").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("network JSON: ") + e.what());
  }
  validate(net);
  return net;
}

// ---------------------------------------------------------------------------
// Datasets

inline constexpr std::size_t kDefaultWarmupDays = 5;

struct DatasetOptions {
  std::size_t days = 12;
  std::uint64_t seed = 0;
  WeatherProfile profile = WeatherProfile::mild_coastal;
  std::size_t warmup_days = kDefaultWarmupDays;  ///< simulated, then discarded
  std::size_t substeps = kDefaultSubsteps;
};

/// Columns t_out, then t_in for single-zone presets or zone1..zoneN and
/// t_in_agg for multi-zone ones. Timestamps restart at 0 after warm-up.
inline std::vector<TimeSeries> generate_dataset(const ZoneNetwork& net, const DatasetOptions& o) {
  if (o.days < 1) throw DataError("generate: days must be >= 1");
  const WeatherSeries full = synth_weather(o.days + o.warmup_days, o.seed, o.profile);
  const auto zones = simulate_network(net, full, o.substeps);
  const std::size_t skip = o.warmup_days * 24;
  const std::size_t n = o.days * 24;

  auto tail = [&](const std::vector<double>& v, std::string label) {
    return TimeSeries::uniform(std::vector<double>(v.begin() + static_cast<long>(skip),
                                                   v.begin() + static_cast<long>(skip + n)),
                               1.0, 0.0, std::move(label));
  };
  std::vector<TimeSeries> cols;
  cols.push_back(tail(full.outdoor_temp, "t_out"));
  if (zones.size() == 1) {
    cols.push_back(tail(zones.front().v, "t_in"));
    return cols;
  }
  std::vector<TimeSeries> zone_cols;
  std::vector<double> volumes;
  const auto idx = net.zone_nodes();
  for (std::size_t z = 0; z < zones.size(); ++z) {
    zone_cols.push_back(tail(zones[z].v, "zone" + std::to_string(z + 1)));
    volumes.push_back(net.nodes[idx[z]].volume);
  }
  cols.insert(cols.end(), zone_cols.begin(), zone_cols.end());
  cols.push_back(aggregate_zones(zone_cols, volumes));
  return cols;
}

inline std::vector<TimeSeries> generate_dataset(std::string_view preset_name, const DatasetOptions& o) {
  return generate_dataset(preset(preset_name), o);
}

/// Indoor column a fit should target: t_in, or t_in_agg for multi-zone data.
inline std::string indoor_column(const std::vector<TimeSeries>& cols) {
  for (const auto& c : cols)
    if (c.label == "t_in") return "t_in";
  return "t_in_agg";
}

}  // namespace thermrom
