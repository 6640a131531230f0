#pragma once

#include "amsim/types.hpp"

namespace amsim {

struct ArmCommand {
  double theta1_des = 0.0;  // rad
  double theta2_des = 0.0;  // rad
};

struct EndEffectorPose {
  Vec3 position = Vec3::Zero();  // m, world frame
};

// Tip position in the body frame:
//   mount + [l1*cos(t1) + l2*cos(t1+t2), 0, -(l1*sin(t1) + l2*sin(t1+t2))]
Vec3 arm_fk(const ArmState& arm, const ModelParams& params);

// p_uav + R_uav * arm_fk(arm).
EndEffectorPose end_effector_world(const FullState& state, const ModelParams& params);

// Closed-form two-link inverse kinematics in the arm plane. The body-y
// component of the target is projected out; the caller owns that residual.
// Always returns the elbow-down branch (theta2 <= 0). Throws UnreachableError
// when the planar distance from the mount is outside [|l1-l2|, l1+l2] or the
// solution violates the joint limits.
ArmCommand arm_ik(const Vec3& target_body, const ModelParams& params);

// Planar distance of a body-frame point from the arm mount, ignoring body-y.
double arm_planar_distance(const Vec3& target_body, const ModelParams& params);

// Rate-limited first-order servo toward the command; each joint moves by at
// most rate_limit*dt and the result is clamped to the joint limits.
ArmState servo_step(const ArmState& arm, const ArmCommand& cmd,
                    double rate_limit_rad_s, double dt,
                    double joint_min_rad, double joint_max_rad);

}  // namespace amsim
