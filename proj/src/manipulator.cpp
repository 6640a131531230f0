#include "amsim/manipulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amsim/errors.hpp"
#include "amsim/rotation.hpp"

namespace amsim {

Vec3 arm_fk(const ArmState& arm, const ModelParams& params) {
  const double c1 = std::cos(arm.theta1);
  const double s1 = std::sin(arm.theta1);
  const double c12 = std::cos(arm.theta1 + arm.theta2);
  const double s12 = std::sin(arm.theta1 + arm.theta2);
  return params.mount_body_m +
         Vec3(params.link1_m * c1 + params.link2_m * c12, 0.0,
              -(params.link1_m * s1 + params.link2_m * s12));
}

EndEffectorPose end_effector_world(const FullState& state, const ModelParams& params) {
  return {state.p + rotate(state.q, arm_fk(state.arm, params))};
}

double arm_planar_distance(const Vec3& target_body, const ModelParams& params) {
  const double u = target_body.x() - params.mount_body_m.x();
  const double w = -(target_body.z() - params.mount_body_m.z());
  return std::hypot(u, w);
}

ArmCommand arm_ik(const Vec3& target_body, const ModelParams& params) {
  const double l1 = params.link1_m;
  const double l2 = params.link2_m;
  const double u = target_body.x() - params.mount_body_m.x();
  const double w = -(target_body.z() - params.mount_body_m.z());
  const double d2 = u * u + w * w;
  const double d = std::sqrt(d2);

  const double r_max = l1 + l2;
  const double r_min = std::abs(l1 - l2);
  if (d > r_max + 1e-12 || d < r_min - 1e-12) {
    std::ostringstream msg;
    msg << "arm_ik: planar target distance " << d << " outside workspace ["
        << r_min << ", " << r_max << "]";
    throw UnreachableError(msg.str());
  }

  const double c2 = std::clamp((d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double theta2 = -std::acos(c2);  // elbow down
  const double theta1 =
      std::atan2(w, u) - std::atan2(l2 * std::sin(theta2), l1 + l2 * std::cos(theta2));

  if (theta1 < params.joint_min_rad - 1e-12 || theta1 > params.joint_max_rad + 1e-12 ||
      theta2 < params.joint_min_rad - 1e-12 || theta2 > params.joint_max_rad + 1e-12) {
    std::ostringstream msg;
    msg << "arm_ik: solution (" << theta1 << ", " << theta2
        << ") violates joint limits [" << params.joint_min_rad << ", "
        << params.joint_max_rad << "]";
    throw UnreachableError(msg.str());
  }
  return {theta1, theta2};
}

ArmState servo_step(const ArmState& arm, const ArmCommand& cmd,
                    double rate_limit_rad_s, double dt,
                    double joint_min_rad, double joint_max_rad) {
  const double max_step = rate_limit_rad_s * dt;
  auto track = [&](double angle, double des) {
    const double next = angle + std::clamp(des - angle, -max_step, max_step);
    return std::clamp(next, joint_min_rad, joint_max_rad);
  };
  return {track(arm.theta1, cmd.theta1_des), track(arm.theta2, cmd.theta2_des)};
}

}  // namespace amsim
