#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "amsim/dynamics.hpp"
#include "amsim/errors.hpp"
#include "amsim/harness.hpp"
#include "amsim/manipulator.hpp"
#include "amsim/mission.hpp"
#include "amsim/mppi.hpp"
#include "amsim/perception.hpp"
#include "amsim/rng.hpp"
#include "amsim/rotation.hpp"
#include "amsim/scenario.hpp"

namespace py = pybind11;
using namespace amsim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Aerial-manipulator flower-targeting simulator and control library";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<UnreachableError>(m, "UnreachableError");
  py::register_exception<DivergedError>(m, "DivergedError");
  py::register_exception<ControllerError>(m, "ControllerError");
  py::register_exception<StaleTargetError>(m, "StaleTargetError");

  py::class_<Quat>(m, "Quaternion")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("w"), py::arg("x"),
           py::arg("y"), py::arg("z"))
      .def_property("w", [](const Quat& q) { return q.w(); },
                    [](Quat& q, double v) { q.w() = v; })
      .def_property("x", [](const Quat& q) { return q.x(); },
                    [](Quat& q, double v) { q.x() = v; })
      .def_property("y", [](const Quat& q) { return q.y(); },
                    [](Quat& q, double v) { q.y() = v; })
      .def_property("z", [](const Quat& q) { return q.z(); },
                    [](Quat& q, double v) { q.z() = v; })
      .def("norm", &Quat::norm)
      .def("normalized", [](const Quat& q) { return q.normalized(); })
      .def("conjugate", [](const Quat& q) { return q.conjugate(); })
      .def("to_matrix", [](const Quat& q) { return Mat3(q.toRotationMatrix()); })
      .def("__mul__", [](const Quat& a, const Quat& b) { return Quat(a * b); })
      .def_static("identity", [] { return Quat::Identity(); })
      .def("__repr__", [](const Quat& q) {
        std::ostringstream ss;
        ss << "Quaternion(" << q.w() << ", " << q.x() << ", " << q.y() << ", "
           << q.z() << ")";
        return ss.str();
      });

  m.def("rotate", &rotate, py::arg("q"), py::arg("v"));
  m.def("integrate_rotation", &integrate_rotation, py::arg("q"), py::arg("omega_body"),
        py::arg("dt"));
  m.def("axis_angle", &axis_angle, py::arg("axis"), py::arg("angle_rad"));
  m.def("yaw_of", &yaw_of);
  m.def("yaw_rotation", &yaw_rotation);
  m.def("wrap_angle", &wrap_angle);

  py::class_<ArmState>(m, "ArmState")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("theta1"), py::arg("theta2"))
      .def_readwrite("theta1", &ArmState::theta1)
      .def_readwrite("theta2", &ArmState::theta2);

  py::class_<FullState>(m, "FullState")
      .def(py::init<>())
      .def_readwrite("p", &FullState::p)
      .def_readwrite("v", &FullState::v)
      .def_readwrite("q", &FullState::q)
      .def_readwrite("omega", &FullState::omega)
      .def_readwrite("arm", &FullState::arm);

  py::class_<ControlInput>(m, "ControlInput")
      .def(py::init<>())
      .def_readwrite("thrust", &ControlInput::thrust)
      .def_readwrite("tau", &ControlInput::tau);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("mass_kg", &ModelParams::mass_kg)
      .def_readwrite("inertia_kgm2", &ModelParams::inertia_kgm2)
      .def_readwrite("gravity_mps2", &ModelParams::gravity_mps2)
      .def_readwrite("arm_mass_kg", &ModelParams::arm_mass_kg)
      .def_readwrite("link1_m", &ModelParams::link1_m)
      .def_readwrite("link2_m", &ModelParams::link2_m)
      .def_readwrite("mount_body_m", &ModelParams::mount_body_m)
      .def_readwrite("joint_min_rad", &ModelParams::joint_min_rad)
      .def_readwrite("joint_max_rad", &ModelParams::joint_max_rad)
      .def_readwrite("joint_rate_rad_s", &ModelParams::joint_rate_rad_s)
      .def_readwrite("thrust_max_n", &ModelParams::thrust_max_n)
      .def_readwrite("tau_max_nm", &ModelParams::tau_max_nm)
      .def("total_mass_kg", &ModelParams::total_mass_kg)
      .def("hover_thrust_n", &ModelParams::hover_thrust_n)
      .def("validate", &ModelParams::validate);

  py::class_<Setpoint>(m, "Setpoint")
      .def(py::init<>())
      .def_readwrite("p_des", &Setpoint::p_des)
      .def_readwrite("v_des", &Setpoint::v_des)
      .def_readwrite("yaw_des", &Setpoint::yaw_des);

  py::class_<Wrench>(m, "Wrench")
      .def(py::init<>())
      .def_readwrite("force", &Wrench::force)
      .def_readwrite("torque", &Wrench::torque);

  py::class_<StateDerivative>(m, "StateDerivative")
      .def(py::init<>())
      .def_readwrite("dp", &StateDerivative::dp)
      .def_readwrite("dv", &StateDerivative::dv)
      .def_readwrite("omega", &StateDerivative::omega)
      .def_readwrite("domega", &StateDerivative::domega)
      .def_readwrite("darm1", &StateDerivative::darm1)
      .def_readwrite("darm2", &StateDerivative::darm2);

  m.def("uav_derivatives", &uav_derivatives, py::arg("state"), py::arg("u"),
        py::arg("params"), py::arg("coupling"));
  m.def("step_rk4", &step_rk4, py::arg("state"), py::arg("u"), py::arg("params"),
        py::arg("coupling"), py::arg("dt"));
  m.def("arm_com_body", &arm_com_body, py::arg("arm"), py::arg("params"));
  m.def("arm_coupling_wrench", &arm_coupling_wrench, py::arg("arm"),
        py::arg("attitude"), py::arg("params"));

  py::class_<ArmCommand>(m, "ArmCommand")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("theta1_des"), py::arg("theta2_des"))
      .def_readwrite("theta1_des", &ArmCommand::theta1_des)
      .def_readwrite("theta2_des", &ArmCommand::theta2_des);

  py::class_<EndEffectorPose>(m, "EndEffectorPose")
      .def(py::init<>())
      .def_readwrite("position", &EndEffectorPose::position);

  m.def("arm_fk", &arm_fk, py::arg("arm"), py::arg("params"));
  m.def("end_effector_world", &end_effector_world, py::arg("state"), py::arg("params"));
  m.def("arm_ik", &arm_ik, py::arg("target_body"), py::arg("params"));
  m.def("arm_planar_distance", &arm_planar_distance, py::arg("target_body"),
        py::arg("params"));
  m.def("servo_step", &servo_step, py::arg("arm"), py::arg("cmd"),
        py::arg("rate_limit_rad_s"), py::arg("dt"), py::arg("joint_min_rad"),
        py::arg("joint_max_rad"));

  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("fx_px", &CameraModel::fx_px)
      .def_readwrite("fy_px", &CameraModel::fy_px)
      .def_readwrite("cx_px", &CameraModel::cx_px)
      .def_readwrite("cy_px", &CameraModel::cy_px)
      .def_readwrite("width_px", &CameraModel::width_px)
      .def_readwrite("height_px", &CameraModel::height_px)
      .def_readwrite("t_body_m", &CameraModel::t_body_m)
      .def_readwrite("q_body_cam", &CameraModel::q_body_cam)
      .def_static("forward_extrinsic", &CameraModel::forward_extrinsic,
                  py::arg("pitch_rad"))
      .def("validate", &CameraModel::validate);

  py::class_<NoiseParams>(m, "NoiseParams")
      .def(py::init<>())
      .def_readwrite("pixel_std_px", &NoiseParams::pixel_std_px)
      .def_readwrite("depth_rel_std", &NoiseParams::depth_rel_std)
      .def_readwrite("miss_prob", &NoiseParams::miss_prob);

  py::class_<Detection>(m, "Detection")
      .def(py::init<>())
      .def_readwrite("u_px", &Detection::u_px)
      .def_readwrite("v_px", &Detection::v_px)
      .def_readwrite("depth_m", &Detection::depth_m)
      .def_readwrite("valid", &Detection::valid);

  py::class_<TargetEstimate>(m, "TargetEstimate")
      .def(py::init<>())
      .def_readwrite("position_uav", &TargetEstimate::position_uav)
      .def_readwrite("position_world", &TargetEstimate::position_world)
      .def_readwrite("observation_count", &TargetEstimate::observation_count)
      .def_readwrite("fresh", &TargetEstimate::fresh)
      .def_readwrite("last_obs_time_s", &TargetEstimate::last_obs_time_s);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("gaussian", &RngStream::gaussian, py::arg("mean"), py::arg("stddev"))
      .def("uniform01", &RngStream::uniform01);

  m.def("substream_seed", [](std::uint64_t master, std::uint64_t a, std::uint64_t b,
                             std::uint64_t c) { return substream_seed(master, a, b, c); },
        py::arg("master"), py::arg("a"), py::arg("b") = 0, py::arg("c") = 0);

  m.def("project_target", &project_target, py::arg("target_world"), py::arg("uav"),
        py::arg("cam"));
  m.def("corrupt_detection", &corrupt_detection, py::arg("detection"), py::arg("noise"),
        py::arg("rng"));
  m.def("localize_target", &localize_target, py::arg("detection"), py::arg("cam"),
        py::arg("uav"));
  m.def("fuse_estimate", &fuse_estimate, py::arg("prev"), py::arg("obs"),
        py::arg("alpha"), py::arg("uav_at_fusion"));
  m.def("select_detection", &select_detection, py::arg("targets_world"), py::arg("uav"),
        py::arg("cam"));

  py::class_<TargetTracker>(m, "TargetTracker")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("fresh_window_s"))
      .def("observe", &TargetTracker::observe, py::arg("obs"), py::arg("uav"),
           py::arg("time_s"))
      .def("current", &TargetTracker::current, py::arg("now_s"));

  py::class_<MppiConfig>(m, "MppiConfig")
      .def(py::init<>())
      .def_readwrite("rollouts", &MppiConfig::rollouts)
      .def_readwrite("horizon", &MppiConfig::horizon)
      .def_readwrite("dt_ctrl_s", &MppiConfig::dt_ctrl_s)
      .def_readwrite("lambda_", &MppiConfig::lambda)
      .def_readwrite("sigma_thrust_n", &MppiConfig::sigma_thrust_n)
      .def_readwrite("sigma_tau_nm", &MppiConfig::sigma_tau_nm)
      .def_readwrite("w_p", &MppiConfig::w_p)
      .def_readwrite("w_v", &MppiConfig::w_v)
      .def_readwrite("w_u", &MppiConfig::w_u)
      .def_readwrite("w_terminal", &MppiConfig::w_terminal)
      .def_readwrite("w_yaw", &MppiConfig::w_yaw)
      .def_readwrite("w_omega", &MppiConfig::w_omega)
      .def_readwrite("threads", &MppiConfig::threads)
      .def("validate", &MppiConfig::validate);

  py::class_<MppiDiag>(m, "MppiDiag")
      .def(py::init<>())
      .def_readonly("min_cost", &MppiDiag::min_cost)
      .def_readonly("mean_cost", &MppiDiag::mean_cost)
      .def_readonly("ess", &MppiDiag::ess);

  py::class_<MppiStepResult>(m, "MppiStepResult")
      .def_readonly("command", &MppiStepResult::command)
      .def_readonly("next_nominal", &MppiStepResult::next_nominal)
      .def_readonly("diag", &MppiStepResult::diag);

  m.def("hover_trim", &hover_trim, py::arg("params"), py::arg("coupling"));
  m.def("make_constant_sequence", &make_constant_sequence, py::arg("u"),
        py::arg("horizon"));
  m.def("clamp_control", &clamp_control, py::arg("u"), py::arg("params"));
  m.def("stage_cost", &stage_cost, py::arg("state"), py::arg("u"), py::arg("sp"),
        py::arg("cfg"), py::arg("params"));
  m.def("rollout_cost", &rollout_cost, py::arg("x0"), py::arg("seq"), py::arg("sp"),
        py::arg("cfg"), py::arg("params"), py::arg("arm_coupling"));
  m.def(
      "mppi_update",
      [](const FullState& x0, const Setpoint& sp, const ControlSequence& nominal,
         const MppiConfig& cfg, const ModelParams& params, bool arm_coupling,
         std::uint64_t seed, std::uint64_t step_index) {
        return mppi_update(x0, sp, nominal, cfg, params, arm_coupling, seed,
                           step_index);
      },
      py::arg("x0"), py::arg("sp"), py::arg("nominal"), py::arg("cfg"),
      py::arg("params"), py::arg("arm_coupling"), py::arg("master_seed"),
      py::arg("step_index"));
  m.def("mppi_step", &mppi_step, py::arg("x0"), py::arg("sp"), py::arg("nominal"),
        py::arg("cfg"), py::arg("params"), py::arg("arm_coupling"),
        py::arg("master_seed"), py::arg("step_index"));

  py::enum_<MissionState>(m, "MissionState")
      .value("Search", MissionState::Search)
      .value("Detect", MissionState::Detect)
      .value("Approach", MissionState::Approach)
      .value("Align", MissionState::Align)
      .value("Done", MissionState::Done)
      .value("Failed", MissionState::Failed);

  py::class_<MissionConfig>(m, "MissionConfig")
      .def(py::init<>())
      .def_readwrite("d_offset_m", &MissionConfig::d_offset_m)
      .def_readwrite("approach_tol_m", &MissionConfig::approach_tol_m)
      .def_readwrite("approach_speed_mps", &MissionConfig::approach_speed_mps)
      .def_readwrite("align_threshold_m", &MissionConfig::align_threshold_m)
      .def_readwrite("dwell_count", &MissionConfig::dwell_count)
      .def_readwrite("detect_count", &MissionConfig::detect_count)
      .def_readwrite("fresh_window_s", &MissionConfig::fresh_window_s)
      .def_readwrite("stale_reset_s", &MissionConfig::stale_reset_s)
      .def_readwrite("timeout_s", &MissionConfig::timeout_s)
      .def_readwrite("search_waypoints", &MissionConfig::search_waypoints)
      .def_readwrite("waypoint_tol_m", &MissionConfig::waypoint_tol_m)
      .def_readwrite("stow", &MissionConfig::stow)
      .def("validate", &MissionConfig::validate);

  py::class_<MissionStatus>(m, "MissionStatus")
      .def(py::init<>())
      .def_readwrite("state", &MissionStatus::state)
      .def_readwrite("setpoint", &MissionStatus::setpoint)
      .def_readwrite("arm_command", &MissionStatus::arm_command)
      .def_readwrite("aligned_streak", &MissionStatus::aligned_streak)
      .def_readwrite("elapsed_s", &MissionStatus::elapsed_s)
      .def_property_readonly("last_trigger",
                             [](const MissionStatus& s) { return s.last_trigger; });

  py::class_<WorldSnapshot>(m, "WorldSnapshot")
      .def(py::init<>())
      .def_readwrite("uav", &WorldSnapshot::uav)
      .def_readwrite("ee", &WorldSnapshot::ee)
      .def_readwrite("target", &WorldSnapshot::target)
      .def_readwrite("time_s", &WorldSnapshot::time_s);

  py::class_<ArmAlignment>(m, "ArmAlignment")
      .def_readonly("command", &ArmAlignment::command)
      .def_readonly("saturated", &ArmAlignment::saturated)
      .def_readonly("lateral_residual_m", &ArmAlignment::lateral_residual_m);

  m.def("desired_standoff", &desired_standoff, py::arg("target"), py::arg("cfg"));
  m.def("arm_alignment_command", &arm_alignment_command, py::arg("target"),
        py::arg("uav"), py::arg("params"), py::arg("cfg"));
  m.def("alignment_check", &alignment_check, py::arg("ee"), py::arg("target"),
        py::arg("threshold_m"));
  m.def("mission_step", &mission_step, py::arg("status"), py::arg("world"),
        py::arg("cfg"), py::arg("params"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("dt_phys_s", &SimConfig::dt_phys_s)
      .def_readwrite("camera_rate_hz", &SimConfig::camera_rate_hz)
      .def_readwrite("duration_s", &SimConfig::duration_s);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("model", &Scenario::model)
      .def_readwrite("initial", &Scenario::initial)
      .def_readwrite("targets_world_m", &Scenario::targets_world_m)
      .def_readwrite("camera", &Scenario::camera)
      .def_readwrite("noise", &Scenario::noise)
      .def_readwrite("mppi", &Scenario::mppi)
      .def_readwrite("mission", &Scenario::mission)
      .def_readwrite("sim", &Scenario::sim)
      .def_readwrite("fusion_alpha", &Scenario::fusion_alpha)
      .def("steps_per_control", &Scenario::steps_per_control)
      .def("validate", &Scenario::validate);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("save_scenario", &save_scenario, py::arg("scenario"), py::arg("path"));
  m.def("scenario_from_json_text", &scenario_from_json_text, py::arg("text"));
  m.def("scenario_to_json_text", &scenario_to_json_text, py::arg("scenario"));

  py::enum_<TrialOutcome>(m, "TrialOutcome")
      .value("Done", TrialOutcome::Done)
      .value("Failed", TrialOutcome::Failed)
      .value("Diverged", TrialOutcome::Diverged);

  py::class_<TrialResult>(m, "TrialResult")
      .def_readonly("seed", &TrialResult::seed)
      .def_readonly("outcome", &TrialResult::outcome)
      .def_readonly("time_to_done_s", &TrialResult::time_to_done_s)
      .def_readonly("final_ee_error_m", &TrialResult::final_ee_error_m)
      .def_readonly("min_ee_error_m", &TrialResult::min_ee_error_m)
      .def_readonly("align_rms_error_m", &TrialResult::align_rms_error_m)
      .def_readonly("trajectory_path", &TrialResult::trajectory_path);

  py::class_<RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("write_detection_trace", &RunOptions::write_detection_trace)
      .def_readwrite("write_mppi_diag", &RunOptions::write_mppi_diag)
      .def_readwrite("threads_override", &RunOptions::threads_override);

  py::class_<BatchReport>(m, "BatchReport")
      .def_readonly("trials", &BatchReport::trials)
      .def_readonly("success_rate", &BatchReport::success_rate)
      .def_readonly("median_time_to_done_s", &BatchReport::median_time_to_done_s)
      .def_readonly("final_error_p50_m", &BatchReport::final_error_p50_m)
      .def_readonly("final_error_p90_m", &BatchReport::final_error_p90_m);

  m.def("run_trial", &run_trial, py::arg("scenario"), py::arg("seed"),
        py::arg("out_dir"), py::arg("opts") = RunOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("run_batch", &run_batch, py::arg("scenario"), py::arg("seeds"),
        py::arg("out_dir"), py::arg("opts") = RunOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("read_report", &read_report, py::arg("dir"));
}
