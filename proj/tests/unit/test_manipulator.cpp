#include <doctest.h>

#include <cmath>
#include <random>

#include "amsim/errors.hpp"
#include "amsim/manipulator.hpp"
#include "amsim/rotation.hpp"

using namespace amsim;

TEST_CASE("arm_fk: straight out, straight down, 45/45") {
  const ModelParams P;
  CHECK(arm_fk(ArmState{0, 0}, P).isApprox(Vec3(0.5, 0, -0.05), 1e-12));
  CHECK(arm_fk(ArmState{M_PI / 2, 0}, P).isApprox(Vec3(0.1, 0, -0.45), 1e-12));

  // hand trig: [0.1 + 0.2 cos45 + 0.2 cos90, 0, -0.05 - 0.2 sin45 - 0.2 sin90]
  const Vec3 p = arm_fk(ArmState{M_PI / 4, M_PI / 4}, P);
  CHECK(p.x() == doctest::Approx(0.24142).epsilon(1e-4));
  CHECK(p.y() == 0.0);
  CHECK(p.z() == doctest::Approx(-0.39142).epsilon(1e-4));
}

TEST_CASE("end_effector_world composes pose and FK") {
  const ModelParams P;
  FullState x;
  x.p = Vec3(1, 2, 3);
  CHECK(end_effector_world(x, P).position.isApprox(Vec3(1.5, 2, 2.95), 1e-12));

  x.q = yaw_rotation(M_PI / 2);
  CHECK(end_effector_world(x, P).position.isApprox(Vec3(1, 2.5, 2.95), 1e-9));

  FullState y;
  y.arm = ArmState{M_PI / 2, 0};
  CHECK(end_effector_world(y, P).position.isApprox(Vec3(0.1, 0, -0.45), 1e-12));
}

TEST_CASE("end_effector_world: translation equivariance") {
  const ModelParams P;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    FullState x;
    x.p = Vec3(u(gen), u(gen), u(gen));
    x.q = axis_angle(Vec3(u(gen), u(gen), u(gen) + 2.1), u(gen));
    x.arm = ArmState{u(gen) / 2, u(gen) / 2};
    const Vec3 delta(u(gen), u(gen), u(gen));
    FullState moved = x;
    moved.p += delta;
    const Vec3 a = end_effector_world(moved, P).position;
    const Vec3 b = end_effector_world(x, P).position + delta;
    CHECK((a - b).norm() < 1e-12);
  }
}

TEST_CASE("reachability bound from the vehicle") {
  const ModelParams P;
  const double bound = P.mount_body_m.norm() + P.link1_m + P.link2_m;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> th(P.joint_min_rad, P.joint_max_rad);
  for (int i = 0; i < 500; ++i) {
    FullState x;
    x.arm = ArmState{th(gen), th(gen)};
    const double reach = (end_effector_world(x, P).position - x.p).norm();
    CHECK(reach <= bound + 1e-12);
  }
}

TEST_CASE("arm_ik: fully extended target and workspace bound") {
  const ModelParams P;
  const ArmCommand c = arm_ik(Vec3(0.5, 0, -0.05), P);
  CHECK(c.theta1_des == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.theta2_des == doctest::Approx(0.0).epsilon(1e-12));

  // distance 0.5 from the mount exceeds l1+l2 = 0.4
  CHECK_THROWS_AS(arm_ik(Vec3(0.1 + 0.5, 0, -0.05), P), UnreachableError);
}

TEST_CASE("arm_ik: elbow-down law-of-cosines solution checks out by FK") {
  const ModelParams P;
  const double a = M_PI / 6.0;
  const double r = 0.2 * std::sqrt(2.0);
  const Vec3 target(0.1 + r * std::cos(a), 0.0, -0.05 - r * std::sin(a));
  const ArmCommand c = arm_ik(target, P);
  CHECK(c.theta2_des <= 0.0);  // elbow down
  const Vec3 fk = arm_fk(ArmState{c.theta1_des, c.theta2_des}, P);
  CHECK((fk - target).norm() < 1e-9);
  // law-of-cosines oracle: cos(t2) = (d^2 - l1^2 - l2^2) / (2 l1 l2) = 0
  CHECK(c.theta2_des == doctest::Approx(-M_PI / 2.0).epsilon(1e-9));
  CHECK(c.theta1_des == doctest::Approx(a + M_PI / 4.0).epsilon(1e-9));
}

TEST_CASE("arm_ik: inner workspace hole for unequal links") {
  ModelParams P;
  P.link1_m = 0.25;
  P.link2_m = 0.15;
  // distance 0.05 < |l1 - l2| = 0.10
  CHECK_THROWS_AS(arm_ik(Vec3(P.mount_body_m.x() + 0.05, 0, P.mount_body_m.z()), P),
                  UnreachableError);
}

TEST_CASE("arm_ik: joint-limited targets rejected") {
  const ModelParams P;
  // reachable by distance but the elbow-down branch needs |theta2| > 120 deg
  const Vec3 target(0.1 + 0.15, 0.0, -0.05);
  CHECK_THROWS_AS(arm_ik(target, P), UnreachableError);
}

TEST_CASE("arm_ik: body-y component is projected out") {
  const ModelParams P;
  const ArmCommand c = arm_ik(Vec3(0.5, 0.3, -0.05), P);
  CHECK(c.theta1_des == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.theta2_des == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("FK/IK round-trip over the sampled workspace") {
  const ModelParams P;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> th1(P.joint_min_rad, P.joint_max_rad);
  std::uniform_real_distribution<double> th2(P.joint_min_rad, 0.0);  // elbow down
  for (int i = 0; i < 5000; ++i) {
    const ArmState arm{th1(gen), th2(gen)};
    const Vec3 target = arm_fk(arm, P);
    const ArmCommand c = arm_ik(target, P);
    CHECK((arm_fk(ArmState{c.theta1_des, c.theta2_des}, P) - target).norm() < 1e-9);
  }
}

TEST_CASE("servo_step: saturated step, fixed point, limit clamp, monotone") {
  const double lim = 2.0944;
  ArmState a{0, 0};
  const ArmState b = servo_step(a, ArmCommand{1.0, 0.0}, 1.0, 0.1, -lim, lim);
  CHECK(b.theta1 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(b.theta2 == 0.0);

  const ArmState c = servo_step(ArmState{1.0, -0.5}, ArmCommand{1.0, -0.5}, 1.0, 0.1,
                                -lim, lim);
  CHECK(c.theta1 == 1.0);
  CHECK(c.theta2 == -0.5);

  // command beyond the limit converges to the limit and never beyond
  ArmState s{2.0, 0};
  for (int i = 0; i < 100; ++i) {
    const ArmState next = servo_step(s, ArmCommand{3.0, 0.0}, 1.0, 0.05, -lim, lim);
    CHECK(next.theta1 <= lim + 1e-15);
    CHECK(std::abs(3.0 - next.theta1) <= std::abs(3.0 - s.theta1));
    s = next;
  }
  CHECK(s.theta1 == doctest::Approx(lim).epsilon(1e-12));
}
