#pragma once

#include "amsim/types.hpp"

namespace amsim {

// Quasi-static arm reaction on the vehicle: world-frame force plus
// body-frame torque.
struct Wrench {
  Vec3 force = Vec3::Zero();   // N, world frame
  Vec3 torque = Vec3::Zero();  // N*m, body frame
};

struct StateDerivative {
  Vec3 dp = Vec3::Zero();      // m/s
  Vec3 dv = Vec3::Zero();      // m/s^2
  Vec3 omega = Vec3::Zero();   // rad/s, drives attitude propagation
  Vec3 domega = Vec3::Zero();  // rad/s^2
  double darm1 = 0.0;          // rad/s; zero, joints are servoed externally
  double darm2 = 0.0;
};

// Rigid-body translational and rotational derivatives:
//   dv     = (R*[0,0,thrust] + coupling.force) / (m + m_arm) - [0,0,g]
//   domega = J^-1 * (tau + coupling.torque - omega x (J*omega))
StateDerivative uav_derivatives(const FullState& state, const ControlInput& u,
                                const ModelParams& params, const Wrench& coupling);

// Classical fixed-step RK4 over position, velocity, attitude quaternion and
// body rates. The quaternion is renormalized afterwards and joint angles are
// clamped to their limits. Throws DivergedError on a non-finite result.
FullState step_rk4(const FullState& state, const ControlInput& u,
                   const ModelParams& params, const Wrench& coupling, double dt);

// Composite arm center of mass in the body frame; link masses are lumped at
// link midpoints with the total split equally between the two links.
Vec3 arm_com_body(const ArmState& arm, const ModelParams& params);

// Gravity wrench of the arm on the vehicle: the arm weight in the world
// frame, and the body-frame moment of that weight about the body origin.
Wrench arm_coupling_wrench(const ArmState& arm, const Quat& attitude,
                           const ModelParams& params);

}  // namespace amsim
