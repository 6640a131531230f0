#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "amsim/errors.hpp"
#include "amsim/perception.hpp"
#include "amsim/rotation.hpp"

using namespace amsim;

namespace {

// camera at the body origin with axes aligned to the body axes
CameraModel identity_camera() {
  CameraModel cam;
  cam.fx_px = 500.0;
  cam.fy_px = 500.0;
  cam.cx_px = 320.0;
  cam.cy_px = 320.0;
  cam.width_px = 640;
  cam.height_px = 640;
  cam.t_body_m = Vec3::Zero();
  cam.q_body_cam = Quat::Identity();
  return cam;
}

}  // namespace

TEST_CASE("project_target: optical axis, offset point, behind camera") {
  const CameraModel cam = identity_camera();
  const FullState uav;

  auto d0 = project_target(Vec3(0, 0, 2), uav, cam);
  REQUIRE(d0.has_value());
  CHECK(d0->u_px == doctest::Approx(320.0));
  CHECK(d0->v_px == doctest::Approx(320.0));
  CHECK(d0->depth_m == doctest::Approx(2.0));

  auto d1 = project_target(Vec3(0.4, 0, 2), uav, cam);
  REQUIRE(d1.has_value());
  CHECK(d1->u_px == doctest::Approx(420.0));
  CHECK(d1->v_px == doctest::Approx(320.0));

  CHECK_FALSE(project_target(Vec3(0, 0, -2), uav, cam).has_value());
}

TEST_CASE("corrupt_detection: noiseless identity, certain miss, empirical std") {
  const Detection d{420.0, 320.0, 2.0, true};

  RngStream rng0(1);
  const auto same = corrupt_detection(d, NoiseParams{0.0, 0.0, 0.0}, rng0);
  REQUIRE(same.has_value());
  CHECK(same->u_px == d.u_px);
  CHECK(same->v_px == d.v_px);
  CHECK(same->depth_m == d.depth_m);

  RngStream rng1(2);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(corrupt_detection(d, NoiseParams{0.0, 0.0, 1.0}, rng1).has_value());
  }

  NoiseParams noise;
  noise.pixel_std_px = 2.0;
  RngStream rng2(3);
  double sum = 0.0, sum2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto noisy = corrupt_detection(d, noise, rng2);
    REQUIRE(noisy.has_value());
    const double du = noisy->u_px - d.u_px;
    sum += du;
    sum2 += du * du;
  }
  const double var = sum2 / n - (sum / n) * (sum / n);
  CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("localize_target rejects an invalid detection") {
  const CameraModel cam = identity_camera();
  Detection bad;
  bad.valid = false;
  CHECK_THROWS_AS(localize_target(bad, cam, FullState{}), amsim::ValidationError);
  Detection zero_depth{320.0, 320.0, 0.0, true};
  CHECK_THROWS_AS(localize_target(zero_depth, cam, FullState{}),
                  amsim::ValidationError);
}

TEST_CASE("localize_target inverts the projection examples") {
  const CameraModel cam = identity_camera();
  FullState uav;

  const Detection d{420.0, 320.0, 2.0, true};
  const TargetEstimate e0 = localize_target(d, cam, uav);
  CHECK(e0.position_uav.isApprox(Vec3(0.4, 0, 2.0), 1e-12));
  CHECK(e0.position_world.isApprox(Vec3(0.4, 0, 2.0), 1e-12));

  uav.p = Vec3(1, 0, 0);
  const TargetEstimate e1 = localize_target(d, cam, uav);
  CHECK(e1.position_world.isApprox(Vec3(1.4, 0, 2.0), 1e-12));
}

TEST_CASE("noiseless project/localize round-trip over random poses") {
  CameraModel cam;  // forward-looking default on the vehicle
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-0.5, 0.5);
  int in_view = 0;
  for (int i = 0; i < 20000 && in_view < 2000; ++i) {
    FullState uav;
    uav.p = Vec3(u(gen), u(gen), u(gen));
    uav.q = yaw_rotation(4.0 * ang(gen)) * axis_angle(Vec3::UnitY(), ang(gen)) *
            axis_angle(Vec3::UnitX(), ang(gen));
    const Vec3 target = uav.p + rotate(uav.q, Vec3(2.0 + u(gen), u(gen) / 2, u(gen) / 2));
    const auto det = project_target(target, uav, cam);
    if (!det) continue;
    ++in_view;
    const TargetEstimate est = localize_target(*det, cam, uav);
    CHECK((est.position_world - target).norm() < 1e-9);
    // frame consistency is exact by construction
    const Vec3 recomposed = uav.p + rotate(uav.q, est.position_uav);
    CHECK((recomposed - est.position_world).norm() < 1e-12);
  }
  CHECK(in_view >= 2000);
}

TEST_CASE("fuse_estimate: init, fixed point, EMA arithmetic") {
  const FullState uav;
  TargetEstimate obs;
  obs.position_world = Vec3(2, 0, 1.5);
  obs.position_uav = obs.position_world;
  obs.observation_count = 1;

  const TargetEstimate first = fuse_estimate(std::nullopt, obs, 0.3, uav);
  CHECK(first.position_world.isApprox(Vec3(2, 0, 1.5)));
  CHECK(first.observation_count == 1);

  const TargetEstimate same = fuse_estimate(first, obs, 0.7, uav);
  CHECK(same.position_world.isApprox(Vec3(2, 0, 1.5)));
  CHECK(same.observation_count == 2);

  TargetEstimate prev;
  prev.position_world = Vec3::Zero();
  prev.observation_count = 1;
  TargetEstimate step;
  step.position_world = Vec3(1, 0, 0);
  const TargetEstimate fused = fuse_estimate(prev, step, 0.3, uav);
  CHECK(fused.position_world.isApprox(Vec3(0.3, 0, 0), 1e-12));
}

TEST_CASE("fusion shrinks noisy error versus a single observation") {
  CameraModel cam;
  NoiseParams noise;
  noise.pixel_std_px = 2.0;
  noise.depth_rel_std = 0.02;
  const Vec3 target(2.0, 0.0, 0.0);
  const FullState uav;  // static vehicle looking +x at the target

  int fused_wins = 0;
  const int kSeeds = 100;
  for (int seed = 0; seed < kSeeds; ++seed) {
    RngStream rng(substream_seed(seed, kStreamPerception));
    TargetTracker tracker(0.3, 0.5);
    double first_error = -1.0;
    for (int k = 0; k < 50; ++k) {
      const auto det = project_target(target, uav, cam);
      REQUIRE(det.has_value());
      const auto noisy = corrupt_detection(*det, noise, rng);
      REQUIRE(noisy.has_value());
      tracker.observe(localize_target(*noisy, cam, uav), uav, k / 30.0);
      if (first_error < 0.0) {
        first_error = (tracker.current(0.0)->position_world - target).norm();
      }
    }
    const double fused_error =
        (tracker.current(50 / 30.0)->position_world - target).norm();
    if (fused_error < first_error) ++fused_wins;
  }
  CHECK(fused_wins > kSeeds / 2);  // median improvement
}

TEST_CASE("tracker freshness window") {
  TargetTracker tracker(0.3, 0.5);
  CHECK_FALSE(tracker.current(0.0).has_value());
  const FullState uav;
  TargetEstimate obs;
  obs.position_world = Vec3(1, 1, 1);
  tracker.observe(obs, uav, 1.0);
  CHECK(tracker.current(1.2)->fresh);
  CHECK(tracker.current(1.5)->fresh);  // boundary inclusive
  CHECK_FALSE(tracker.current(1.6)->fresh);
}

TEST_CASE("select_detection picks the target nearest the image center") {
  CameraModel cam;
  FullState uav;
  const std::vector<Vec3> targets = {Vec3(2.0, 0.9, -0.05), Vec3(2.0, 0.0, -0.05),
                                     Vec3(2.0, -0.7, -0.05)};
  const auto det = select_detection(targets, uav, cam);
  REQUIRE(det.has_value());
  CHECK(det->u_px == doctest::Approx(cam.cx_px));
}
