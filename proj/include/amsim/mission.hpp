#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amsim/manipulator.hpp"
#include "amsim/perception.hpp"
#include "amsim/types.hpp"

namespace amsim {

enum class MissionState { Search, Detect, Approach, Align, Done, Failed };

const char* to_string(MissionState s);

struct MissionConfig {
  Vec3 d_offset_m{-0.20, 0.0, -0.20};  // UAV standoff relative to the target
  double approach_tol_m = 0.10;
  double approach_speed_mps = 0.2;
  double align_threshold_m = 0.05;
  int dwell_count = 25;                // consecutive aligned steps before Done
  int detect_count = 5;                // observations confirming a detection
  double fresh_window_s = 0.5;
  double stale_reset_s = 1.0;          // staleness that sends the FSM to Search
  double timeout_s = 60.0;
  std::vector<Setpoint> search_waypoints;
  double waypoint_tol_m = 0.15;
  ArmCommand stow{1.5707963267948966, 0.0};  // straight down

  void validate() const;  // warns (stderr) when |d_offset| leaves [0.10, 0.30]
};

struct MissionStatus {
  MissionState state = MissionState::Search;
  Setpoint setpoint;
  ArmCommand arm_command;
  int aligned_streak = 0;
  double elapsed_s = 0.0;
  // internal progress bookkeeping
  int detect_obs_baseline = 0;
  std::size_t waypoint_index = 0;
  const char* last_trigger = "";  // non-empty only on the step a transition fired
};

// Everything the executive can see at one control tick.
struct WorldSnapshot {
  FullState uav;
  EndEffectorPose ee;
  std::optional<TargetEstimate> target;
  double time_s = 0.0;
};

// Standoff pose: p_des = target + d_offset, heading facing the target
// horizontally. Throws StaleTargetError when the estimate is not fresh.
Setpoint desired_standoff(const TargetEstimate& target, const MissionConfig& cfg);

struct ArmAlignment {
  ArmCommand command;
  bool saturated = false;          // target clamped to the workspace boundary
  double lateral_residual_m = 0.0; // body-y component the arm cannot remove
};

// Joint command placing the end effector on the target projected into the
// arm plane; out-of-workspace targets are clamped to the nearest reachable
// point along the bearing and flagged.
ArmAlignment arm_alignment_command(const TargetEstimate& target, const FullState& uav,
                                   const ModelParams& params, const MissionConfig& cfg);

// True iff the end effector is within `threshold` of the estimated target
// (inclusive).
bool alignment_check(const EndEffectorPose& ee, const TargetEstimate& target,
                     double threshold_m);

// One FSM tick. Emits the UAV setpoint (search waypoint or standoff pose)
// and the arm command (stowed outside Align). Done and Failed are absorbing.
MissionStatus mission_step(const MissionStatus& status, const WorldSnapshot& world,
                           const MissionConfig& cfg, const ModelParams& params);

}  // namespace amsim
