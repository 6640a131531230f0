#include "amsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "amsim/errors.hpp"
#include "amsim/mppi.hpp"
#include "amsim/rng.hpp"
#include "amsim/rotation.hpp"

namespace amsim {

using nlohmann::json;

const char* to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::Done: return "Done";
    case TrialOutcome::Failed: return "Failed";
    case TrialOutcome::Diverged: return "Diverged";
  }
  return "?";
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Fixed 9-significant-digit formatting keeps logs diffable across runs.
void append_num(std::string& row, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  row += buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) {
    out_.open(path, std::ios::binary);
    if (!out_) throw ParseError("cannot open log for writing: " + path.string());
    out_ << header << '\n';
  }

  void row(const std::vector<double>& nums, const std::string& tail = "") {
    std::string line;
    for (std::size_t i = 0; i < nums.size(); ++i) {
      if (i) line += ',';
      append_num(line, nums[i]);
    }
    if (!tail.empty()) {
      line += ',';
      line += tail;
    }
    out_ << line << '\n';
  }

  void raw(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ofstream out_;
};

double nearest_target_distance(const Vec3& point, const std::vector<Vec3>& targets) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& t : targets) best = std::min(best, (point - t).norm());
  return best;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return -1.0;
  std::sort(values.begin(), values.end());
  const double idx = q * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

TrialResult run_trial(const Scenario& sc, std::uint64_t seed,
                      const std::filesystem::path& out_dir, const RunOptions& opts) {
  sc.validate();
  std::filesystem::create_directories(out_dir);

  MppiConfig mppi_cfg = sc.mppi;
  if (opts.threads_override >= 0) mppi_cfg.threads = opts.threads_override;

  const int substeps = sc.steps_per_control();
  const double dt_ctrl = sc.mppi.dt_ctrl_s;
  const double dt_phys = sc.sim.dt_phys_s;

  const std::string tag = "seed" + std::to_string(seed);
  TrialResult result;
  result.seed = seed;
  result.trajectory_path = (out_dir / ("trajectory_" + tag + ".csv")).string();

  CsvWriter traj(result.trajectory_path,
                 "time_s,px_m,py_m,pz_m,qw,qx,qy,qz,vx_mps,vy_mps,vz_mps,"
                 "wx_rad_s,wy_rad_s,wz_rad_s,theta1_rad,theta2_rad,"
                 "ee_x_m,ee_y_m,ee_z_m,est_x_m,est_y_m,est_z_m,est_fresh,"
                 "ee_err_true_m,thrust_n,tau_x_nm,tau_y_nm,tau_z_nm,"
                 "sp_x_m,sp_y_m,sp_z_m,state");
  CsvWriter trans(out_dir / ("transitions_" + tag + ".csv"), "time_s,from,to,trigger");

  std::optional<CsvWriter> det_trace;
  if (opts.write_detection_trace) {
    det_trace.emplace(out_dir / ("detections_" + tag + ".csv"),
                      "time_s,u_px,v_px,depth_m,valid");
  }
  std::optional<CsvWriter> mppi_diag;
  if (opts.write_mppi_diag) {
    mppi_diag.emplace(out_dir / ("mppi_" + tag + ".csv"),
                      "step,min_cost,mean_cost,ess");
  }

  FullState state = sc.initial;
  TargetTracker tracker(sc.fusion_alpha, sc.mission.fresh_window_s);
  RngStream perception_rng(substream_seed(seed, kStreamPerception));

  MissionStatus status;
  status.setpoint = sc.mission.search_waypoints.front();
  status.arm_command = sc.mission.stow;

  ControlSequence nominal = make_constant_sequence(
      hover_trim(sc.model, arm_coupling_wrench(state.arm, state.q, sc.model)),
      mppi_cfg.horizon);

  std::uint64_t cam_index = 0;
  auto camera_tick = [&](double now) {
    const auto ideal = select_detection(sc.targets_world_m, state, sc.camera);
    std::optional<Detection> noisy;
    if (ideal) noisy = corrupt_detection(*ideal, sc.noise, perception_rng);
    if (noisy) {
      tracker.observe(localize_target(*noisy, sc.camera, state), state, now);
    }
    if (det_trace) {
      if (noisy) {
        det_trace->row({now, noisy->u_px, noisy->v_px, noisy->depth_m, 1.0});
      } else {
        det_trace->row({now, kNan, kNan, kNan, 0.0});
      }
    }
    ++cam_index;
  };

  // camera events due at or before the current sim time; the first fires at t=0
  auto pump_camera = [&](double now) {
    while (static_cast<double>(cam_index) / sc.sim.camera_rate_hz <= now + 1e-12) {
      camera_tick(static_cast<double>(cam_index) / sc.sim.camera_rate_hz);
    }
  };

  result.min_ee_error_m = std::numeric_limits<double>::infinity();
  double align_sq_sum = 0.0;
  std::size_t align_samples = 0;
  bool diverged = false;

  pump_camera(0.0);

  for (std::uint64_t step = 0;; ++step) {
    const double t = static_cast<double>(step) * dt_ctrl;

    const EndEffectorPose ee = end_effector_world(state, sc.model);
    const double true_err = nearest_target_distance(ee.position, sc.targets_world_m);
    result.min_ee_error_m = std::min(result.min_ee_error_m, true_err);

    WorldSnapshot snap{state, ee, tracker.current(t), t};
    const MissionState before = status.state;
    status = mission_step(status, snap, sc.mission, sc.model);
    if (status.state != before) {
      std::string line;
      append_num(line, t);
      line += ',';
      line += to_string(before);
      line += ',';
      line += to_string(status.state);
      line += ',';
      line += status.last_trigger;
      trans.raw(line);
    }

    if (status.state == MissionState::Done) {
      result.outcome = TrialOutcome::Done;
      result.time_to_done_s = t;
      result.final_ee_error_m = true_err;
      break;
    }
    if (status.state == MissionState::Failed || t >= sc.sim.duration_s) {
      result.outcome = TrialOutcome::Failed;
      result.final_ee_error_m = true_err;
      break;
    }

    MppiStepResult ctrl;
    try {
      ctrl = mppi_step(state, status.setpoint, nominal, mppi_cfg, sc.model,
                       /*arm_coupling=*/true, seed, step);
    } catch (const ControllerError&) {
      result.outcome = TrialOutcome::Diverged;
      result.final_ee_error_m = true_err;
      break;
    }
    nominal = std::move(ctrl.next_nominal);
    const ControlInput u = ctrl.command;
    if (mppi_diag) {
      mppi_diag->row({static_cast<double>(step), ctrl.diag.min_cost,
                      ctrl.diag.mean_cost, ctrl.diag.ess});
    }

    const auto est = snap.target;
    traj.row({t, state.p.x(), state.p.y(), state.p.z(), state.q.w(), state.q.x(),
              state.q.y(), state.q.z(), state.v.x(), state.v.y(), state.v.z(),
              state.omega.x(), state.omega.y(), state.omega.z(), state.arm.theta1,
              state.arm.theta2, ee.position.x(), ee.position.y(), ee.position.z(),
              est ? est->position_world.x() : kNan,
              est ? est->position_world.y() : kNan,
              est ? est->position_world.z() : kNan,
              est && est->fresh ? 1.0 : 0.0, true_err, u.thrust, u.tau.x(),
              u.tau.y(), u.tau.z(), status.setpoint.p_des.x(),
              status.setpoint.p_des.y(), status.setpoint.p_des.z()},
             to_string(status.state));

    if (status.state == MissionState::Align) {
      align_sq_sum += (state.p - status.setpoint.p_des).squaredNorm();
      ++align_samples;
    }

    try {
      for (int i = 0; i < substeps; ++i) {
        state.arm = servo_step(state.arm, status.arm_command, sc.model.joint_rate_rad_s,
                               dt_phys, sc.model.joint_min_rad, sc.model.joint_max_rad);
        const Wrench w = arm_coupling_wrench(state.arm, state.q, sc.model);
        state = step_rk4(state, u, sc.model, w, dt_phys);
        pump_camera(t + static_cast<double>(i + 1) * dt_phys);
      }
    } catch (const DivergedError&) {
      diverged = true;
    }
    if (diverged) {
      result.outcome = TrialOutcome::Diverged;
      result.final_ee_error_m = true_err;
      break;
    }
  }

  if (align_samples > 0) {
    result.align_rms_error_m =
        std::sqrt(align_sq_sum / static_cast<double>(align_samples));
  }
  if (!std::isfinite(result.min_ee_error_m)) result.min_ee_error_m = 0.0;
  return result;
}

namespace {

json trial_to_json(const TrialResult& r) {
  json j;
  j["seed"] = r.seed;
  j["outcome"] = to_string(r.outcome);
  j["time_to_done_s"] = r.time_to_done_s;
  j["final_ee_error_m"] = r.final_ee_error_m;
  j["min_ee_error_m"] = r.min_ee_error_m;
  j["align_rms_error_m"] = r.align_rms_error_m;
  j["trajectory"] = r.trajectory_path;
  return j;
}

TrialResult trial_from_json(const json& j) {
  TrialResult r;
  r.seed = j.at("seed").get<std::uint64_t>();
  const std::string o = j.at("outcome").get<std::string>();
  r.outcome = o == "Done" ? TrialOutcome::Done
              : o == "Diverged" ? TrialOutcome::Diverged
                                : TrialOutcome::Failed;
  r.time_to_done_s = j.at("time_to_done_s").get<double>();
  r.final_ee_error_m = j.at("final_ee_error_m").get<double>();
  r.min_ee_error_m = j.at("min_ee_error_m").get<double>();
  r.align_rms_error_m = j.at("align_rms_error_m").get<double>();
  r.trajectory_path = j.at("trajectory").get<std::string>();
  return r;
}

}  // namespace

BatchReport run_batch(const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir, const RunOptions& opts) {
  if (seeds.empty()) {
    throw ValidationError("run_batch: seed list must not be empty");
  }
  BatchReport report;
  for (std::uint64_t seed : seeds) {
    report.trials.push_back(run_trial(sc, seed, out_dir, opts));
  }

  std::vector<double> done_times;
  std::vector<double> final_errors;
  int done = 0;
  for (const TrialResult& r : report.trials) {
    if (r.outcome == TrialOutcome::Done) {
      ++done;
      done_times.push_back(r.time_to_done_s);
    }
    final_errors.push_back(r.final_ee_error_m);
  }
  report.success_rate = static_cast<double>(done) / static_cast<double>(seeds.size());
  report.median_time_to_done_s = percentile(done_times, 0.5);
  report.final_error_p50_m = percentile(final_errors, 0.5);
  report.final_error_p90_m = percentile(final_errors, 0.9);

  json j;
  j["scenario_name"] = sc.name;
  j["trials"] = json::array();
  for (const TrialResult& r : report.trials) j["trials"].push_back(trial_to_json(r));
  j["success_rate"] = report.success_rate;
  j["median_time_to_done_s"] = report.median_time_to_done_s;
  j["final_error_p50_m"] = report.final_error_p50_m;
  j["final_error_p90_m"] = report.final_error_p90_m;

  std::ofstream out(out_dir / "report.json");
  if (!out) throw ParseError("cannot write report.json under " + out_dir.string());
  out << j.dump(2) << '\n';
  return report;
}

BatchReport read_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) throw ParseError("cannot open " + (dir / "report.json").string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report.json parse error: ") + e.what());
  }
  BatchReport r;
  for (const auto& t : j.at("trials")) r.trials.push_back(trial_from_json(t));
  r.success_rate = j.at("success_rate").get<double>();
  r.median_time_to_done_s = j.at("median_time_to_done_s").get<double>();
  r.final_error_p50_m = j.at("final_error_p50_m").get<double>();
  r.final_error_p90_m = j.at("final_error_p90_m").get<double>();
  return r;
}

int report_batch(const std::filesystem::path& dir, std::ostream& out) {
  const BatchReport r = read_report(dir);

  out << "seed      outcome    t_done_s   final_err_m  min_err_m   align_rms_m\n";
  char buf[160];
  for (const TrialResult& t : r.trials) {
    std::snprintf(buf, sizeof(buf), "%-9llu %-10s %-10.3f %-12.4f %-11.4f %-10.4f\n",
                  static_cast<unsigned long long>(t.seed), to_string(t.outcome),
                  t.time_to_done_s, t.final_ee_error_m, t.min_ee_error_m,
                  t.align_rms_error_m);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "success_rate %.3f  median_time_to_done_s %.3f  "
                "final_err_p50_m %.4f  final_err_p90_m %.4f\n",
                r.success_rate, r.median_time_to_done_s, r.final_error_p50_m,
                r.final_error_p90_m);
  out << buf;

  // Plot-ready extracts of the approach and alignment phases.
  int skipped = 0;
  for (const TrialResult& t : r.trials) {
    std::ifstream traj(t.trajectory_path);
    if (!traj) {
      out << "warning: missing trajectory log " << t.trajectory_path << "\n";
      continue;
    }
    const std::filesystem::path extract_path =
        dir / ("extract_seed" + std::to_string(t.seed) + ".csv");
    std::ofstream ex(extract_path, std::ios::binary);
    ex << "time_s,px_m,py_m,pz_m,ee_x_m,ee_y_m,ee_z_m,ee_err_true_m,state\n";

    std::string line;
    std::getline(traj, line);  // header
    while (std::getline(traj, line)) {
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cols.push_back(cell);
      if (cols.size() != 32) {
        ++skipped;
        continue;
      }
      double time_s, px, py, pz, eex, eey, eez, err;
      try {
        time_s = std::stod(cols[0]);
        px = std::stod(cols[1]);
        py = std::stod(cols[2]);
        pz = std::stod(cols[3]);
        eex = std::stod(cols[16]);
        eey = std::stod(cols[17]);
        eez = std::stod(cols[18]);
        err = std::stod(cols[23]);
      } catch (const std::exception&) {
        ++skipped;
        continue;
      }
      const std::string& st = cols[31];
      if (st == "Approach" || st == "Align" || st == "Done") {
        char row[256];
        std::snprintf(row, sizeof(row), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s\n",
                      time_s, px, py, pz, eex, eey, eez, err, st.c_str());
        ex << row;
      }
    }
  }
  if (skipped > 0) {
    out << "warning: skipped " << skipped << " malformed trajectory rows\n";
  }
  return skipped;
}

}  // namespace amsim
