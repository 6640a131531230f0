#pragma once

#include "amsim/types.hpp"

namespace amsim {

// R * v for a unit quaternion. Norm-preserving.
inline Vec3 rotate(const Quat& q, const Vec3& v) { return q * v; }

// Propagate attitude by a constant body-frame angular velocity over dt via
// the axis-angle exponential, then renormalize.
Quat integrate_rotation(const Quat& q, const Vec3& omega_body, double dt);

Quat axis_angle(const Vec3& axis, double angle_rad);

// Heading about world z (ZYX convention).
double yaw_of(const Quat& q);

Quat yaw_rotation(double yaw_rad);

// Wrap to (-pi, pi].
double wrap_angle(double angle_rad);

}  // namespace amsim
