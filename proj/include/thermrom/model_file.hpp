#pragma once

// JSON model file:
//   {"c1":..,"c2":..,"c3":..,"c4":..,"time_unit":"hour","temp_unit":"C",
//    "convention":"eq2-appendix"}

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "thermrom/error.hpp"
#include "thermrom/rom_core.hpp"

namespace thermrom {

inline constexpr const char* kModelConvention = "eq2-appendix";

inline nlohmann::ordered_json model_to_json(const RomCoefficients& c) {
  nlohmann::ordered_json j;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["c3"] = c.c3;
  j["c4"] = c.c4;
  j["time_unit"] = "hour";
  j["temp_unit"] = "C";
  j["convention"] = kModelConvention;
  return j;
}

inline RomCoefficients model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("model JSON must be an object");
  auto number = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      throw DataError(std::string("model JSON: missing numeric field '") + key + "'");
    }
    return it->get<double>();
  };
  auto expect = [&](const char* key, const char* value) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>() != value) {
      throw DataError(std::string("model JSON: field '") + key + "' must be \"" + value + "\"");
    }
  };
  expect("time_unit", "hour");
  expect("temp_unit", "C");
  expect("convention", kModelConvention);
  RomCoefficients c{number("c1"), number("c2"), number("c3"), number("c4")};
  require_positive_c1(c);
  return c;
}

inline std::string serialize_model(const RomCoefficients& c) {
  return model_to_json(c).dump(2) + "\n";
}

inline void write_model_file(const std::string& path, const RomCoefficients& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  out << serialize_model(c);
  if (!out) throw DataError("failed writing model file: " + path);
}

inline RomCoefficients read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace thermrom
