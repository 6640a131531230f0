#include "amsim/perception.hpp"

#include <cmath>
#include <limits>

#include "amsim/errors.hpp"
#include "amsim/rotation.hpp"

namespace amsim {

Quat CameraModel::forward_extrinsic(double pitch_rad) {
  // Columns are the camera axes expressed in the body frame: image-right is
  // body -y, image-down and the optical axis live in the body x-z plane.
  const double c = std::cos(pitch_rad);
  const double s = std::sin(pitch_rad);
  Mat3 R;
  R.col(0) = Vec3(0.0, -1.0, 0.0);  // X: right
  R.col(1) = Vec3(-s, 0.0, -c);     // Y: down
  R.col(2) = Vec3(c, 0.0, -s);      // Z: optical axis
  return Quat(R);
}

void CameraModel::validate() const {
  if (!(fx_px > 0.0)) throw ValidationError("camera.fx_px must be > 0");
  if (!(fy_px > 0.0)) throw ValidationError("camera.fy_px must be > 0");
  if (width_px <= 0) throw ValidationError("camera.width_px must be > 0");
  if (height_px <= 0) throw ValidationError("camera.height_px must be > 0");
  if (cx_px < 0.0 || cx_px >= width_px)
    throw ValidationError("camera.cx_px must lie inside the image");
  if (cy_px < 0.0 || cy_px >= height_px)
    throw ValidationError("camera.cy_px must lie inside the image");
}

namespace {

inline bool in_image(const CameraModel& cam, double u, double v) {
  return u >= 0.0 && u < cam.width_px && v >= 0.0 && v < cam.height_px;
}

}  // namespace

std::optional<Detection> project_target(const Vec3& target_world,
                                        const FullState& uav,
                                        const CameraModel& cam) {
  const Vec3 body = uav.q.conjugate() * (target_world - uav.p);
  const Vec3 c = cam.q_body_cam.conjugate() * (body - cam.t_body_m);
  if (!(c.z() > 0.0)) return std::nullopt;
  const double u = cam.cx_px + cam.fx_px * c.x() / c.z();
  const double v = cam.cy_px + cam.fy_px * c.y() / c.z();
  if (!in_image(cam, u, v)) return std::nullopt;
  return Detection{u, v, c.z(), true};
}

std::optional<Detection> corrupt_detection(const Detection& d,
                                           const NoiseParams& noise,
                                           RngStream& rng) {
  if (rng.uniform01() < noise.miss_prob) return std::nullopt;
  Detection out = d;
  out.u_px += rng.gaussian(0.0, noise.pixel_std_px);
  out.v_px += rng.gaussian(0.0, noise.pixel_std_px);
  out.depth_m += rng.gaussian(0.0, noise.depth_rel_std * d.depth_m);
  // noisy pixels may land slightly outside the frame; only a non-positive
  // depth makes the sample unusable
  if (!(out.depth_m > 0.0)) return std::nullopt;
  return out;
}

TargetEstimate localize_target(const Detection& d, const CameraModel& cam,
                               const FullState& uav) {
  if (!d.valid || !(d.depth_m > 0.0)) {
    throw ValidationError("localize_target: invalid detection");
  }
  const Vec3 c((d.u_px - cam.cx_px) * d.depth_m / cam.fx_px,
               (d.v_px - cam.cy_px) * d.depth_m / cam.fy_px, d.depth_m);
  TargetEstimate est;
  est.position_uav = cam.t_body_m + cam.q_body_cam * c;
  est.position_world = uav.p + uav.q * est.position_uav;
  est.observation_count = 1;
  est.fresh = true;
  return est;
}

TargetEstimate fuse_estimate(const std::optional<TargetEstimate>& prev,
                             const TargetEstimate& obs, double alpha,
                             const FullState& uav_at_fusion) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ValidationError("fuse_estimate: alpha must be in (0, 1]");
  }
  TargetEstimate out = obs;
  if (prev && prev->observation_count > 0) {
    out.position_world =
        (1.0 - alpha) * prev->position_world + alpha * obs.position_world;
    out.observation_count = prev->observation_count + 1;
  } else {
    out.observation_count = 1;
  }
  out.position_uav =
      uav_at_fusion.q.conjugate() * (out.position_world - uav_at_fusion.p);
  out.fresh = true;
  return out;
}

std::optional<Detection> select_detection(const std::vector<Vec3>& targets_world,
                                          const FullState& uav,
                                          const CameraModel& cam) {
  std::optional<Detection> best;
  double best_r2 = std::numeric_limits<double>::infinity();
  for (const Vec3& t : targets_world) {
    const auto d = project_target(t, uav, cam);
    if (!d) continue;
    const double du = d->u_px - cam.cx_px;
    const double dv = d->v_px - cam.cy_px;
    const double r2 = du * du + dv * dv;
    if (r2 < best_r2) {
      best_r2 = r2;
      best = d;
    }
  }
  return best;
}

void TargetTracker::observe(const TargetEstimate& obs, const FullState& uav,
                            double time_s) {
  TargetEstimate fused = fuse_estimate(estimate_, obs, alpha_, uav);
  fused.last_obs_time_s = time_s;
  estimate_ = fused;
}

std::optional<TargetEstimate> TargetTracker::current(double now_s) const {
  if (!estimate_) return std::nullopt;
  TargetEstimate out = *estimate_;
  out.fresh = (now_s - out.last_obs_time_s) <= fresh_window_s_;
  return out;
}

}  // namespace amsim
