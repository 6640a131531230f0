#include "amsim/dynamics.hpp"

#include <cmath>

#include "amsim/errors.hpp"

namespace amsim {

namespace {

// Quaternion kinematics dq/dt = 0.5 * q ⊗ [0, omega], components [w,x,y,z].
inline Eigen::Vector4d quat_derivative(const Eigen::Vector4d& q, const Vec3& w) {
  return 0.5 * Eigen::Vector4d(
      -q[1] * w.x() - q[2] * w.y() - q[3] * w.z(),
      q[0] * w.x() + q[2] * w.z() - q[3] * w.y(),
      q[0] * w.y() + q[3] * w.x() - q[1] * w.z(),
      q[0] * w.z() + q[1] * w.y() - q[2] * w.x());
}

struct Stage {
  Vec3 dp, dv;
  Eigen::Vector4d dq;
  Vec3 domega;
};

// Derivatives for an RK4 stage; the quaternion is normalized only for the
// thrust-direction evaluation so the integrated components stay a plain
// linear ODE in q.
inline Stage stage_derivatives(const Vec3& v, const Eigen::Vector4d& q,
                               const Vec3& omega, const ControlInput& u,
                               const ModelParams& P, const Wrench& c) {
  Stage s;
  s.dp = v;

  Quat qn(q[0], q[1], q[2], q[3]);
  qn.normalize();
  const Vec3 thrust_world = qn * Vec3(0.0, 0.0, u.thrust);
  s.dv = (thrust_world + c.force) / P.total_mass_kg() - Vec3(0.0, 0.0, P.gravity_mps2);

  s.dq = quat_derivative(q, omega);

  const Vec3& J = P.inertia_kgm2;
  const Vec3 Jw(J.x() * omega.x(), J.y() * omega.y(), J.z() * omega.z());
  const Vec3 m = u.tau + c.torque - omega.cross(Jw);
  s.domega = Vec3(m.x() / J.x(), m.y() / J.y(), m.z() / J.z());
  return s;
}

inline bool finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

StateDerivative uav_derivatives(const FullState& state, const ControlInput& u,
                                const ModelParams& params, const Wrench& coupling) {
  const Eigen::Vector4d q(state.q.w(), state.q.x(), state.q.y(), state.q.z());
  const Stage s = stage_derivatives(state.v, q, state.omega, u, params, coupling);
  StateDerivative d;
  d.dp = s.dp;
  d.dv = s.dv;
  d.omega = state.omega;
  d.domega = s.domega;
  return d;
}

FullState step_rk4(const FullState& state, const ControlInput& u,
                   const ModelParams& params, const Wrench& coupling, double dt) {
  const Eigen::Vector4d q0(state.q.w(), state.q.x(), state.q.y(), state.q.z());

  const Stage k1 = stage_derivatives(state.v, q0, state.omega, u, params, coupling);
  const Stage k2 = stage_derivatives(state.v + 0.5 * dt * k1.dv, q0 + 0.5 * dt * k1.dq,
                                     state.omega + 0.5 * dt * k1.domega, u, params, coupling);
  const Stage k3 = stage_derivatives(state.v + 0.5 * dt * k2.dv, q0 + 0.5 * dt * k2.dq,
                                     state.omega + 0.5 * dt * k2.domega, u, params, coupling);
  const Stage k4 = stage_derivatives(state.v + dt * k3.dv, q0 + dt * k3.dq,
                                     state.omega + dt * k3.domega, u, params, coupling);

  const double h = dt / 6.0;
  FullState out = state;
  out.p = state.p + h * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.v = state.v + h * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  out.omega = state.omega + h * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);

  const Eigen::Vector4d q = q0 + h * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  Quat qn(q[0], q[1], q[2], q[3]);
  const double n = qn.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DivergedError("step_rk4: attitude quaternion diverged");
  }
  qn.coeffs() /= n;
  out.q = qn;

  out.arm.theta1 = std::clamp(state.arm.theta1, params.joint_min_rad, params.joint_max_rad);
  out.arm.theta2 = std::clamp(state.arm.theta2, params.joint_min_rad, params.joint_max_rad);

  if (!finite(out.p) || !finite(out.v) || !finite(out.omega)) {
    throw DivergedError("step_rk4: non-finite state");
  }
  return out;
}

Vec3 arm_com_body(const ArmState& arm, const ModelParams& params) {
  const double c1 = std::cos(arm.theta1);
  const double s1 = std::sin(arm.theta1);
  const double c12 = std::cos(arm.theta1 + arm.theta2);
  const double s12 = std::sin(arm.theta1 + arm.theta2);
  const Vec3 dir1(c1, 0.0, -s1);
  const Vec3 dir2(c12, 0.0, -s12);
  const Vec3 mid1 = params.mount_body_m + 0.5 * params.link1_m * dir1;
  const Vec3 mid2 = params.mount_body_m + params.link1_m * dir1 + 0.5 * params.link2_m * dir2;
  // equal link masses at link midpoints
  return 0.5 * (mid1 + mid2);
}

Wrench arm_coupling_wrench(const ArmState& arm, const Quat& attitude,
                           const ModelParams& params) {
  Wrench w;
  w.force = Vec3(0.0, 0.0, -params.arm_mass_kg * params.gravity_mps2);
  const Vec3 force_body = attitude.conjugate() * w.force;
  w.torque = arm_com_body(arm, params).cross(force_body);
  return w;
}

}  // namespace amsim
