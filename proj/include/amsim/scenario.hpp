#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "amsim/mission.hpp"
#include "amsim/mppi.hpp"
#include "amsim/perception.hpp"
#include "amsim/types.hpp"

namespace amsim {

struct SimConfig {
  double dt_phys_s = 0.002;
  double camera_rate_hz = 30.0;
  double duration_s = 60.0;

  void validate() const;
};

// Complete, validated description of one simulation setup. All physical
// quantities are SI; JSON field names carry unit suffixes.
struct Scenario {
  std::string name = "unnamed";
  ModelParams model;
  FullState initial;
  std::vector<Vec3> targets_world_m;
  CameraModel camera;
  NoiseParams noise;
  MppiConfig mppi;
  MissionConfig mission;
  SimConfig sim;
  double fusion_alpha = 0.3;

  // Physics steps per control step; control dt must be an integer multiple
  // of the physics dt.
  int steps_per_control() const;

  void validate() const;
};

// Parse and validate a scenario file. Throws ParseError for unreadable or
// malformed JSON and ValidationError (naming the field) for bad values.
Scenario load_scenario(const std::filesystem::path& path);

Scenario scenario_from_json_text(const std::string& text);

std::string scenario_to_json_text(const Scenario& sc);

void save_scenario(const Scenario& sc, const std::filesystem::path& path);

}  // namespace amsim
