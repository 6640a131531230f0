#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace amsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Two revolute pitch joints forming a planar chain in the body x-z plane.
// theta measures rotation from the body x axis toward -z (downward), so a
// hanging arm has positive theta1.
struct ArmState {
  double theta1 = 0.0;  // rad
  double theta2 = 0.0;  // rad
};

// UAV rigid-body state plus arm joints: the simulated ground truth.
// Position and velocity are world-frame, angular velocity is body-frame.
// The quaternion is kept unit-norm by every integration step.
struct FullState {
  Vec3 p = Vec3::Zero();      // m
  Vec3 v = Vec3::Zero();      // m/s
  Quat q = Quat::Identity();  // body -> world
  Vec3 omega = Vec3::Zero();  // rad/s, body frame
  ArmState arm;
};

// Collective thrust along body +z plus body-frame torques.
struct ControlInput {
  double thrust = 0.0;      // N, >= 0
  Vec3 tau = Vec3::Zero();  // N*m
};

struct ModelParams {
  double mass_kg = 1.5;
  Vec3 inertia_kgm2{0.02, 0.02, 0.04};  // diagonal body inertia
  double gravity_mps2 = 9.81;
  double arm_mass_kg = 0.2;
  double link1_m = 0.2;
  double link2_m = 0.2;
  Vec3 mount_body_m{0.1, 0.0, -0.05};  // arm shoulder in the body frame
  double joint_min_rad = -2.0943951023931953;  // -120 deg
  double joint_max_rad = 2.0943951023931953;   // +120 deg
  double joint_rate_rad_s = 0.5;
  double thrust_max_n = 4.0 * 1.5 * 9.81;
  double tau_max_nm = 1.0;

  double total_mass_kg() const { return mass_kg + arm_mass_kg; }

  // Thrust balancing vehicle-plus-arm weight at level attitude, before any
  // coupling wrench is considered. Used as the control-effort reference.
  double hover_thrust_n() const { return total_mass_kg() * gravity_mps2; }

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Desired UAV pose for the position controller.
struct Setpoint {
  Vec3 p_des = Vec3::Zero();
  Vec3 v_des = Vec3::Zero();
  double yaw_des = 0.0;
};

}  // namespace amsim
