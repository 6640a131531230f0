#include "amsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amsim/errors.hpp"

namespace amsim {

using nlohmann::json;

void ModelParams::validate() const {
  if (!(mass_kg > 0.0)) throw ValidationError("model.mass_kg must be > 0");
  if (!(inertia_kgm2.x() > 0.0 && inertia_kgm2.y() > 0.0 && inertia_kgm2.z() > 0.0))
    throw ValidationError("model.inertia_kgm2 components must be > 0");
  if (!(gravity_mps2 > 0.0)) throw ValidationError("model.gravity_mps2 must be > 0");
  if (!(arm_mass_kg >= 0.0)) throw ValidationError("model.arm_mass_kg must be >= 0");
  if (!(link1_m > 0.0)) throw ValidationError("model.link1_m must be > 0");
  if (!(link2_m > 0.0)) throw ValidationError("model.link2_m must be > 0");
  if (!(joint_min_rad < joint_max_rad))
    throw ValidationError("model.joint_min_rad must be < model.joint_max_rad");
  if (!(joint_rate_rad_s > 0.0))
    throw ValidationError("model.joint_rate_rad_s must be > 0");
  if (!(thrust_max_n > 0.0)) throw ValidationError("model.thrust_max_n must be > 0");
  if (!(tau_max_nm > 0.0)) throw ValidationError("model.tau_max_nm must be > 0");
}

void SimConfig::validate() const {
  if (!(dt_phys_s > 0.0)) throw ValidationError("sim.dt_phys_s must be > 0");
  if (!(camera_rate_hz > 0.0)) throw ValidationError("sim.camera_rate_hz must be > 0");
  if (!(duration_s > 0.0)) throw ValidationError("sim.duration_s must be > 0");
}

int Scenario::steps_per_control() const {
  const double ratio = mppi.dt_ctrl_s / sim.dt_phys_s;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9) {
    throw ValidationError(
        "sim.dt_phys_s must divide mppi.dt_ctrl_s an integer number of times");
  }
  return n;
}

void Scenario::validate() const {
  model.validate();
  camera.validate();
  mppi.validate();
  mission.validate();
  sim.validate();
  (void)steps_per_control();
  if (!(mppi.dt_ctrl_s <= 0.05))
    throw ValidationError("mppi.dt_ctrl_s must be <= 0.05 for stable stepping");
  if (targets_world_m.empty())
    throw ValidationError("targets_world_m must contain at least one target");
  if (!(fusion_alpha > 0.0 && fusion_alpha <= 1.0))
    throw ValidationError("fusion_alpha must be in (0, 1]");
  if (!(noise.pixel_std_px >= 0.0))
    throw ValidationError("noise.pixel_std_px must be >= 0");
  if (!(noise.depth_rel_std >= 0.0))
    throw ValidationError("noise.depth_rel_std must be >= 0");
  if (noise.miss_prob < 0.0 || noise.miss_prob > 1.0)
    throw ValidationError("noise.miss_prob must be in [0, 1]");
  if (initial.arm.theta1 < model.joint_min_rad || initial.arm.theta1 > model.joint_max_rad ||
      initial.arm.theta2 < model.joint_min_rad || initial.arm.theta2 > model.joint_max_rad)
    throw ValidationError("initial.arm_rad must respect the joint limits");
  if (std::abs(initial.q.norm() - 1.0) > 1e-6)
    throw ValidationError("initial.quaternion_wxyz must be unit norm");
}

namespace {

Vec3 vec3_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError(field + " must be an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Quat quat_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 4)
    throw ValidationError(field + " must be an array [w, x, y, z]");
  Quat q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  return q;
}

json to_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec3_if(const json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = vec3_from(j.at(key), key);
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }

  Scenario sc;
  try {
    read_if(j, "name", sc.name);

    if (j.contains("model")) {
      const json& m = j.at("model");
      read_if(m, "mass_kg", sc.model.mass_kg);
      read_vec3_if(m, "inertia_kgm2", sc.model.inertia_kgm2);
      read_if(m, "gravity_mps2", sc.model.gravity_mps2);
      read_if(m, "arm_mass_kg", sc.model.arm_mass_kg);
      read_if(m, "link1_m", sc.model.link1_m);
      read_if(m, "link2_m", sc.model.link2_m);
      read_vec3_if(m, "mount_body_m", sc.model.mount_body_m);
      read_if(m, "joint_min_rad", sc.model.joint_min_rad);
      read_if(m, "joint_max_rad", sc.model.joint_max_rad);
      read_if(m, "joint_rate_rad_s", sc.model.joint_rate_rad_s);
      read_if(m, "thrust_max_n", sc.model.thrust_max_n);
      read_if(m, "tau_max_nm", sc.model.tau_max_nm);
    }

    if (j.contains("initial")) {
      const json& i = j.at("initial");
      read_vec3_if(i, "position_m", sc.initial.p);
      read_vec3_if(i, "velocity_mps", sc.initial.v);
      if (i.contains("quaternion_wxyz"))
        sc.initial.q = quat_from(i.at("quaternion_wxyz"), "initial.quaternion_wxyz");
      read_vec3_if(i, "omega_rad_s", sc.initial.omega);
      if (i.contains("arm_rad")) {
        const json& a = i.at("arm_rad");
        if (!a.is_array() || a.size() != 2)
          throw ValidationError("initial.arm_rad must be [theta1, theta2]");
        sc.initial.arm.theta1 = a[0].get<double>();
        sc.initial.arm.theta2 = a[1].get<double>();
      }
    }

    if (j.contains("targets_world_m")) {
      sc.targets_world_m.clear();
      for (const auto& t : j.at("targets_world_m"))
        sc.targets_world_m.push_back(vec3_from(t, "targets_world_m[]"));
    }

    if (j.contains("camera")) {
      const json& c = j.at("camera");
      read_if(c, "fx_px", sc.camera.fx_px);
      read_if(c, "fy_px", sc.camera.fy_px);
      read_if(c, "cx_px", sc.camera.cx_px);
      read_if(c, "cy_px", sc.camera.cy_px);
      read_if(c, "width_px", sc.camera.width_px);
      read_if(c, "height_px", sc.camera.height_px);
      read_vec3_if(c, "mount_body_m", sc.camera.t_body_m);
      // forward axis-permutation extrinsic with an optional pitch; an
      // explicit quaternion overrides it
      double pitch_deg = 0.0;
      read_if(c, "pitch_deg", pitch_deg);
      sc.camera.q_body_cam = CameraModel::forward_extrinsic(pitch_deg * M_PI / 180.0);
      if (c.contains("quaternion_body_cam_wxyz")) {
        sc.camera.q_body_cam =
            quat_from(c.at("quaternion_body_cam_wxyz"), "camera.quaternion_body_cam_wxyz")
                .normalized();
      }
    }

    if (j.contains("noise")) {
      const json& n = j.at("noise");
      read_if(n, "pixel_std_px", sc.noise.pixel_std_px);
      read_if(n, "depth_rel_std", sc.noise.depth_rel_std);
      read_if(n, "miss_prob", sc.noise.miss_prob);
    }

    if (j.contains("mppi")) {
      const json& m = j.at("mppi");
      read_if(m, "rollouts", sc.mppi.rollouts);
      read_if(m, "horizon", sc.mppi.horizon);
      read_if(m, "dt_ctrl_s", sc.mppi.dt_ctrl_s);
      read_if(m, "lambda", sc.mppi.lambda);
      read_if(m, "sigma_thrust_n", sc.mppi.sigma_thrust_n);
      read_if(m, "sigma_tau_nm", sc.mppi.sigma_tau_nm);
      read_if(m, "w_p", sc.mppi.w_p);
      read_if(m, "w_v", sc.mppi.w_v);
      read_if(m, "w_u", sc.mppi.w_u);
      read_if(m, "w_terminal", sc.mppi.w_terminal);
      read_if(m, "w_yaw", sc.mppi.w_yaw);
      read_if(m, "w_omega", sc.mppi.w_omega);
      read_if(m, "threads", sc.mppi.threads);
    }

    if (j.contains("mission")) {
      const json& m = j.at("mission");
      read_vec3_if(m, "d_offset_m", sc.mission.d_offset_m);
      read_if(m, "approach_tol_m", sc.mission.approach_tol_m);
      read_if(m, "approach_speed_mps", sc.mission.approach_speed_mps);
      read_if(m, "align_threshold_m", sc.mission.align_threshold_m);
      read_if(m, "dwell_count", sc.mission.dwell_count);
      read_if(m, "detect_count", sc.mission.detect_count);
      read_if(m, "fresh_window_s", sc.mission.fresh_window_s);
      read_if(m, "stale_reset_s", sc.mission.stale_reset_s);
      read_if(m, "timeout_s", sc.mission.timeout_s);
      read_if(m, "waypoint_tol_m", sc.mission.waypoint_tol_m);
      if (m.contains("stow_rad")) {
        const json& a = m.at("stow_rad");
        if (!a.is_array() || a.size() != 2)
          throw ValidationError("mission.stow_rad must be [theta1, theta2]");
        sc.mission.stow.theta1_des = a[0].get<double>();
        sc.mission.stow.theta2_des = a[1].get<double>();
      }
      if (m.contains("search_waypoints")) {
        sc.mission.search_waypoints.clear();
        for (const auto& w : m.at("search_waypoints")) {
          Setpoint sp;
          sp.p_des = vec3_from(w.at("position_m"), "search_waypoints[].position_m");
          if (w.contains("yaw_rad")) sp.yaw_des = w.at("yaw_rad").get<double>();
          sc.mission.search_waypoints.push_back(sp);
        }
      }
    }

    if (j.contains("sim")) {
      const json& s = j.at("sim");
      read_if(s, "dt_phys_s", sc.sim.dt_phys_s);
      read_if(s, "camera_rate_hz", sc.sim.camera_rate_hz);
      read_if(s, "duration_s", sc.sim.duration_s);
    }

    read_if(j, "fusion_alpha", sc.fusion_alpha);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario field error: ") + e.what());
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open scenario file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const Scenario& sc) {
  json j;
  j["name"] = sc.name;

  json& m = j["model"];
  m["mass_kg"] = sc.model.mass_kg;
  m["inertia_kgm2"] = to_json(sc.model.inertia_kgm2);
  m["gravity_mps2"] = sc.model.gravity_mps2;
  m["arm_mass_kg"] = sc.model.arm_mass_kg;
  m["link1_m"] = sc.model.link1_m;
  m["link2_m"] = sc.model.link2_m;
  m["mount_body_m"] = to_json(sc.model.mount_body_m);
  m["joint_min_rad"] = sc.model.joint_min_rad;
  m["joint_max_rad"] = sc.model.joint_max_rad;
  m["joint_rate_rad_s"] = sc.model.joint_rate_rad_s;
  m["thrust_max_n"] = sc.model.thrust_max_n;
  m["tau_max_nm"] = sc.model.tau_max_nm;

  json& i = j["initial"];
  i["position_m"] = to_json(sc.initial.p);
  i["velocity_mps"] = to_json(sc.initial.v);
  i["quaternion_wxyz"] = to_json(sc.initial.q);
  i["omega_rad_s"] = to_json(sc.initial.omega);
  i["arm_rad"] = json::array({sc.initial.arm.theta1, sc.initial.arm.theta2});

  j["targets_world_m"] = json::array();
  for (const auto& t : sc.targets_world_m) j["targets_world_m"].push_back(to_json(t));

  json& c = j["camera"];
  c["fx_px"] = sc.camera.fx_px;
  c["fy_px"] = sc.camera.fy_px;
  c["cx_px"] = sc.camera.cx_px;
  c["cy_px"] = sc.camera.cy_px;
  c["width_px"] = sc.camera.width_px;
  c["height_px"] = sc.camera.height_px;
  c["mount_body_m"] = to_json(sc.camera.t_body_m);
  c["quaternion_body_cam_wxyz"] = to_json(sc.camera.q_body_cam);

  json& n = j["noise"];
  n["pixel_std_px"] = sc.noise.pixel_std_px;
  n["depth_rel_std"] = sc.noise.depth_rel_std;
  n["miss_prob"] = sc.noise.miss_prob;

  json& mp = j["mppi"];
  mp["rollouts"] = sc.mppi.rollouts;
  mp["horizon"] = sc.mppi.horizon;
  mp["dt_ctrl_s"] = sc.mppi.dt_ctrl_s;
  mp["lambda"] = sc.mppi.lambda;
  mp["sigma_thrust_n"] = sc.mppi.sigma_thrust_n;
  mp["sigma_tau_nm"] = sc.mppi.sigma_tau_nm;
  mp["w_p"] = sc.mppi.w_p;
  mp["w_v"] = sc.mppi.w_v;
  mp["w_u"] = sc.mppi.w_u;
  mp["w_terminal"] = sc.mppi.w_terminal;
  mp["w_yaw"] = sc.mppi.w_yaw;
  mp["w_omega"] = sc.mppi.w_omega;
  mp["threads"] = sc.mppi.threads;

  json& ms = j["mission"];
  ms["d_offset_m"] = to_json(sc.mission.d_offset_m);
  ms["approach_tol_m"] = sc.mission.approach_tol_m;
  ms["approach_speed_mps"] = sc.mission.approach_speed_mps;
  ms["align_threshold_m"] = sc.mission.align_threshold_m;
  ms["dwell_count"] = sc.mission.dwell_count;
  ms["detect_count"] = sc.mission.detect_count;
  ms["fresh_window_s"] = sc.mission.fresh_window_s;
  ms["stale_reset_s"] = sc.mission.stale_reset_s;
  ms["timeout_s"] = sc.mission.timeout_s;
  ms["waypoint_tol_m"] = sc.mission.waypoint_tol_m;
  ms["stow_rad"] = json::array({sc.mission.stow.theta1_des, sc.mission.stow.theta2_des});
  ms["search_waypoints"] = json::array();
  for (const auto& w : sc.mission.search_waypoints) {
    json wp;
    wp["position_m"] = to_json(w.p_des);
    wp["yaw_rad"] = w.yaw_des;
    ms["search_waypoints"].push_back(wp);
  }

  json& s = j["sim"];
  s["dt_phys_s"] = sc.sim.dt_phys_s;
  s["camera_rate_hz"] = sc.sim.camera_rate_hz;
  s["duration_s"] = sc.sim.duration_s;

  j["fusion_alpha"] = sc.fusion_alpha;
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write scenario file: " + path.string());
  }
  out << scenario_to_json_text(sc);
}

}  // namespace amsim
