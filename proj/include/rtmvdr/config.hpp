#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rtmvdr/errors.hpp"
#include "rtmvdr/scenario.hpp"

namespace rtmvdr {

struct ScenarioConfig {
  Scenario scenario;
  std::uint64_t seed = 1;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Scenario from JSON with keys: n_sensors, noise_floor_db,
/// interferer_angles_deg, interferer_inr_db, look_angle_deg,
/// texture.kind, texture.shape, seed.
inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;
  s.n_sensors = j.at("n_sensors").get<int>();
  s.noise_floor = db_to_linear(j.value("noise_floor_db", 0.0));
  s.look_spatial_freq =
      physical_angle_to_spatial_freq(j.value("look_angle_deg", 0.0));

  auto angles = j.value("interferer_angles_deg", std::vector<double>{});
  std::vector<double> inrs;
  if (j.contains("interferer_inr_db")) {
    if (j["interferer_inr_db"].is_number()) {
      inrs.assign(angles.size(), j["interferer_inr_db"].get<double>());
    } else {
      inrs = j["interferer_inr_db"].get<std::vector<double>>();
    }
  }
  if (inrs.size() != angles.size())
    throw InvalidScenario("interferer_inr_db must match interferer_angles_deg");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    s.interferers.push_back({physical_angle_to_spatial_freq(angles[i]),
                             s.noise_floor * db_to_linear(inrs[i])});
  }

  if (j.contains("texture")) {
    const auto& t = j["texture"];
    std::string kind = t.value("kind", "inverse-gamma");
    if (kind == "constant") {
      s.texture = TextureLaw::constant();
    } else if (kind == "inverse-gamma") {
      s.texture = TextureLaw::inverse_gamma(t.value("shape", 2.0));
    } else if (kind == "exponential") {
      s.texture = TextureLaw::exponential();
    } else {
      throw InvalidScenario("unknown texture kind: " + kind);
    }
  } else {
    s.texture = TextureLaw::inverse_gamma(2.0);
  }

  cfg.seed = j.value("seed", std::uint64_t{1});
  s.validate();
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad scenario config " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace rtmvdr
