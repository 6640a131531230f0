#include "amsim/mission.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "amsim/errors.hpp"
#include "amsim/rotation.hpp"

namespace amsim {

const char* to_string(MissionState s) {
  switch (s) {
    case MissionState::Search: return "Search";
    case MissionState::Detect: return "Detect";
    case MissionState::Approach: return "Approach";
    case MissionState::Align: return "Align";
    case MissionState::Done: return "Done";
    case MissionState::Failed: return "Failed";
  }
  return "?";
}

void MissionConfig::validate() const {
  if (!(approach_tol_m > 0.0)) throw ValidationError("mission.approach_tol_m must be > 0");
  if (!(approach_speed_mps > 0.0))
    throw ValidationError("mission.approach_speed_mps must be > 0");
  if (!(align_threshold_m > 0.0))
    throw ValidationError("mission.align_threshold_m must be > 0");
  if (dwell_count < 1) throw ValidationError("mission.dwell_count must be >= 1");
  if (detect_count < 1) throw ValidationError("mission.detect_count must be >= 1");
  if (!(fresh_window_s > 0.0)) throw ValidationError("mission.fresh_window_s must be > 0");
  if (!(stale_reset_s >= fresh_window_s))
    throw ValidationError("mission.stale_reset_s must be >= fresh_window_s");
  if (!(timeout_s > 0.0)) throw ValidationError("mission.timeout_s must be > 0");
  if (search_waypoints.empty())
    throw ValidationError("mission.search_waypoints must not be empty");
  if (!(waypoint_tol_m > 0.0)) throw ValidationError("mission.waypoint_tol_m must be > 0");

  const double n = d_offset_m.norm();
  if (n < 0.10 || n > 0.30) {
    std::cerr << "warning: mission.d_offset_m norm " << n
              << " is outside the recommended [0.10, 0.30] standoff band\n";
  }
}

Setpoint desired_standoff(const TargetEstimate& target, const MissionConfig& cfg) {
  if (!target.fresh) {
    throw StaleTargetError("desired_standoff: target estimate is stale");
  }
  Setpoint sp;
  sp.p_des = target.position_world + cfg.d_offset_m;
  sp.v_des = Vec3::Zero();
  const Vec3 bearing = target.position_world - sp.p_des;
  if (std::hypot(bearing.x(), bearing.y()) > 1e-9) {
    sp.yaw_des = std::atan2(bearing.y(), bearing.x());
  } else {
    sp.yaw_des = 0.0;  // degenerate vertical offset: keep a fixed heading
  }
  return sp;
}

ArmAlignment arm_alignment_command(const TargetEstimate& target, const FullState& uav,
                                   const ModelParams& params, const MissionConfig& cfg) {
  (void)cfg;
  const Vec3 body = uav.q.conjugate() * (target.position_world - uav.p);
  ArmAlignment out;
  out.lateral_residual_m = body.y();

  // planar coordinates from the mount: x forward, w downward
  const double u = body.x() - params.mount_body_m.x();
  const double w = -(body.z() - params.mount_body_m.z());
  double d = std::hypot(u, w);

  const double r_max = params.link1_m + params.link2_m;
  // tightest radius the elbow-down branch can reach with the joint limits
  const double r_min_limits = std::sqrt(std::max(
      0.0, params.link1_m * params.link1_m + params.link2_m * params.link2_m +
               2.0 * params.link1_m * params.link2_m * std::cos(params.joint_min_rad)));
  const double r_min = std::max(std::abs(params.link1_m - params.link2_m), r_min_limits);

  Vec3 planar_target(body.x(), 0.0, body.z());
  if (d < 1e-12) {
    // target on the mount itself: point straight down at the inner boundary
    planar_target = params.mount_body_m + Vec3(0.0, 0.0, -r_min);
    out.saturated = true;
  } else if (d > r_max || d < r_min) {
    const double scale = std::clamp(d, r_min, r_max) / d;
    planar_target = params.mount_body_m + Vec3(u * scale, 0.0, -w * scale);
    out.saturated = true;
  }

  try {
    const ArmCommand cmd = arm_ik(planar_target, params);
    out.command = cmd;
  } catch (const UnreachableError&) {
    // bearing outside the joint-limit cone: fall back to the clamped angles
    const double gamma = std::atan2(w, u);
    const double theta1 = std::clamp(gamma, params.joint_min_rad, params.joint_max_rad);
    out.command = {theta1, 0.0};
    out.saturated = true;
  }
  return out;
}

bool alignment_check(const EndEffectorPose& ee, const TargetEstimate& target,
                     double threshold_m) {
  return (ee.position - target.position_world).norm() <= threshold_m;
}

namespace {

Setpoint search_setpoint(MissionStatus& s, const WorldSnapshot& w,
                         const MissionConfig& cfg) {
  const Setpoint& wp = cfg.search_waypoints[s.waypoint_index];
  if ((w.uav.p - wp.p_des).norm() <= cfg.waypoint_tol_m) {
    s.waypoint_index = (s.waypoint_index + 1) % cfg.search_waypoints.size();
  }
  return cfg.search_waypoints[s.waypoint_index];
}

}  // namespace

MissionStatus mission_step(const MissionStatus& status, const WorldSnapshot& world,
                           const MissionConfig& cfg, const ModelParams& params) {
  MissionStatus s = status;
  s.elapsed_s = world.time_s;
  s.last_trigger = "";

  if (s.state == MissionState::Done || s.state == MissionState::Failed) {
    return s;  // absorbing
  }

  if (world.time_s > cfg.timeout_s) {
    s.state = MissionState::Failed;
    s.last_trigger = "timeout";
    return s;
  }

  const bool have_target = world.target.has_value();
  const bool fresh = have_target && world.target->fresh;
  const double staleness =
      have_target ? world.time_s - world.target->last_obs_time_s
                  : std::numeric_limits<double>::infinity();

  if (s.state != MissionState::Search && staleness > cfg.stale_reset_s) {
    s.state = MissionState::Search;
    s.aligned_streak = 0;
    s.last_trigger = "target_stale";
  }

  switch (s.state) {
    case MissionState::Search:
      if (fresh) {
        s.state = MissionState::Detect;
        s.detect_obs_baseline = world.target->observation_count;
        s.last_trigger = "fresh_target";
        s.setpoint = desired_standoff(*world.target, cfg);
      } else {
        s.setpoint = search_setpoint(s, world, cfg);
      }
      s.aligned_streak = 0;
      s.arm_command = cfg.stow;
      break;

    case MissionState::Detect:
      if (fresh) {
        s.setpoint = desired_standoff(*world.target, cfg);
        if (world.target->observation_count - s.detect_obs_baseline >=
            cfg.detect_count) {
          s.state = MissionState::Approach;
          s.last_trigger = "detect_confirmed";
        }
      }
      s.arm_command = cfg.stow;
      break;

    case MissionState::Approach:
      if (fresh) {
        s.setpoint = desired_standoff(*world.target, cfg);
      }
      if ((world.uav.p - s.setpoint.p_des).norm() <= cfg.approach_tol_m &&
          world.uav.v.norm() <= cfg.approach_speed_mps) {
        s.state = MissionState::Align;
        s.aligned_streak = 0;
        s.last_trigger = "reached_standoff";
      }
      s.arm_command = cfg.stow;
      break;

    case MissionState::Align:
      if (fresh) {
        s.setpoint = desired_standoff(*world.target, cfg);
        // The arm re-aims only while the base is on station. Chasing the
        // target from a displaced base couples the swinging arm's gravity
        // torque back into the position loop and can ring up an oscillation;
        // holding the command lets the position controller recover first.
        if ((world.uav.p - s.setpoint.p_des).norm() <= cfg.approach_tol_m) {
          s.arm_command =
              arm_alignment_command(*world.target, world.uav, params, cfg).command;
        }
        if (alignment_check(world.ee, *world.target, cfg.align_threshold_m)) {
          s.aligned_streak += 1;
        } else {
          s.aligned_streak = 0;
        }
        if (s.aligned_streak >= cfg.dwell_count) {
          s.state = MissionState::Done;
          s.last_trigger = "aligned_dwell";
        }
      }
      // not fresh but not yet stale: hold the previous setpoint, command and
      // streak until the next observation or the stale reset
      break;

    case MissionState::Done:
    case MissionState::Failed:
      break;
  }
  return s;
}

}  // namespace amsim
