#include "amsim/rotation.hpp"

#include <cmath>

namespace amsim {

Quat integrate_rotation(const Quat& q, const Vec3& omega_body, double dt) {
  const Vec3 phi = omega_body * dt;
  const double angle = phi.norm();
  Quat dq;
  if (angle < 1e-12) {
    // first-order expansion, exact enough below the angle threshold
    dq = Quat(1.0, 0.5 * phi.x(), 0.5 * phi.y(), 0.5 * phi.z());
  } else {
    const double half = 0.5 * angle;
    const double s = std::sin(half) / angle;
    dq = Quat(std::cos(half), phi.x() * s, phi.y() * s, phi.z() * s);
  }
  Quat out = q * dq;
  out.normalize();
  return out;
}

Quat axis_angle(const Vec3& axis, double angle_rad) {
  return Quat(Eigen::AngleAxisd(angle_rad, axis.normalized()));
}

double yaw_of(const Quat& q) {
  // ZYX heading
  const double siny = 2.0 * (q.w() * q.z() + q.x() * q.y());
  const double cosy = 1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z());
  return std::atan2(siny, cosy);
}

Quat yaw_rotation(double yaw_rad) {
  return Quat(Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ()));
}

double wrap_angle(double angle_rad) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(angle_rad + M_PI, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - M_PI;
}

}  // namespace amsim
