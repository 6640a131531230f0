#pragma once

#include <optional>
#include <vector>

#include "amsim/rng.hpp"
#include "amsim/types.hpp"

namespace amsim {

// Pinhole RGB-D camera rigidly mounted on the vehicle. The extrinsic maps
// camera coordinates (X right, Y down, Z along the optical axis) into the
// body frame. forward_extrinsic(0) points the axis along body +x.
struct CameraModel {
  double fx_px = 500.0;
  double fy_px = 500.0;
  double cx_px = 320.0;
  double cy_px = 240.0;
  int width_px = 640;
  int height_px = 480;
  Vec3 t_body_m{0.1, 0.0, -0.05};
  Quat q_body_cam = forward_extrinsic(0.0);

  // Optical axis in the body x-z plane, pitched down by pitch_rad from +x
  // (negative pitches up). Image-right stays along body -y.
  static Quat forward_extrinsic(double pitch_rad);

  void validate() const;
};

struct NoiseParams {
  double pixel_std_px = 0.0;
  double depth_rel_std = 0.0;  // stddev as a fraction of true depth
  double miss_prob = 0.0;
};

struct Detection {
  double u_px = 0.0;
  double v_px = 0.0;
  double depth_m = 0.0;
  bool valid = false;
};

struct TargetEstimate {
  Vec3 position_uav = Vec3::Zero();    // body frame at fusion time
  Vec3 position_world = Vec3::Zero();
  int observation_count = 0;
  bool fresh = false;
  double last_obs_time_s = 0.0;
};

// Perfect projection of a world point through the camera; empty when the
// point is behind the camera or outside the image.
std::optional<Detection> project_target(const Vec3& target_world,
                                        const FullState& uav,
                                        const CameraModel& cam);

// Detector/sensor error model: a miss with probability miss_prob, otherwise
// gaussian pixel noise and depth-proportional gaussian depth noise. A sample
// whose noisy depth is non-positive also yields an empty result.
std::optional<Detection> corrupt_detection(const Detection& d,
                                           const NoiseParams& noise,
                                           RngStream& rng);

// Back-project a detection to 3D and express it in the body and world
// frames using the camera extrinsics and the current vehicle pose.
TargetEstimate localize_target(const Detection& d, const CameraModel& cam,
                               const FullState& uav);

// Exponential moving average on the world position; the first observation
// initializes directly. position_uav is re-derived from the fused world
// position using the vehicle pose at fusion time so both frames stay
// consistent.
TargetEstimate fuse_estimate(const std::optional<TargetEstimate>& prev,
                             const TargetEstimate& obs, double alpha,
                             const FullState& uav_at_fusion);

// Among several candidate targets, project all and keep the detection
// nearest the image center.
std::optional<Detection> select_detection(const std::vector<Vec3>& targets_world,
                                          const FullState& uav,
                                          const CameraModel& cam);

// Fused-estimate bookkeeping with a freshness window.
class TargetTracker {
 public:
  TargetTracker(double alpha, double fresh_window_s)
      : alpha_(alpha), fresh_window_s_(fresh_window_s) {}

  void observe(const TargetEstimate& obs, const FullState& uav, double time_s);

  // Estimate with the fresh flag evaluated at `now_s`; empty before the
  // first observation.
  std::optional<TargetEstimate> current(double now_s) const;

 private:
  double alpha_;
  double fresh_window_s_;
  std::optional<TargetEstimate> estimate_;
};

}  // namespace amsim
