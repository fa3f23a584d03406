#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "quadnav/attitude.hpp"
#include "test_helpers.hpp"

using namespace quadnav;

TEST_CASE("quat_integrate: constant rate about z gives the axis-angle yaw", "[attitude]") {
  const Attitude q = quat_integrate(Attitude::identity(), Vec3(0, 0, M_PI / 2), 1.0);
  CHECK(std::abs(quat_to_euler(q).yaw - M_PI / 2) < 1e-9);
  CHECK(std::abs(q.q.norm() - 1.0) < 1e-9);
}

TEST_CASE("quat_integrate: zero rate leaves any attitude unchanged", "[attitude]") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const Attitude q = testutil::random_attitude(rng);
    const Attitude q2 = quat_integrate(q, Vec3::Zero(), 1.0);
    CHECK(attitude_angle_between(q, q2) < 1e-12);
  }
}

TEST_CASE("quat_integrate: 1000 random steps track a Rodrigues matrix chain", "[attitude]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);  // rad/s
  Attitude att = Attitude::identity();
  Eigen::Matrix3d r_oracle = Eigen::Matrix3d::Identity();
  const double dt = 1.0 / 120.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 w(u(rng), u(rng), u(rng));
    att = quat_integrate(att, w, dt);
    r_oracle = r_oracle * testutil::rodrigues(w * dt);  // body-frame increment composes right
  }
  const double diff = testutil::rotation_angle(r_oracle.transpose() * att.rot());
  CHECK(diff < 1e-8);
}

TEST_CASE("quat_integrate: rejects non-finite input and bad dt", "[attitude]") {
  const Attitude q = Attitude::identity();
  CHECK_THROWS_AS(quat_integrate(q, Vec3(NAN, 0, 0), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(quat_integrate(q, Vec3::Zero(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quat_integrate(q, Vec3::Zero(), -1.0), std::invalid_argument);
}

TEST_CASE("quat_to_euler: identity and pure yaw", "[attitude]") {
  const EulerAngles e0 = quat_to_euler(Attitude::identity());
  CHECK(e0.roll == 0.0);
  CHECK(e0.pitch == 0.0);
  CHECK(e0.yaw == 0.0);
  CHECK_FALSE(e0.gimbal_proximity);

  const EulerAngles ez = quat_to_euler(Attitude::from_euler(0, 0, M_PI / 2));
  CHECK(std::abs(ez.yaw - M_PI / 2) < 1e-12);
}

TEST_CASE("quat_to_euler: euler round trip within 1e-9 quaternion distance", "[attitude]") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const Attitude q = testutil::random_attitude(rng);
    const EulerAngles e = quat_to_euler(q);
    if (e.gimbal_proximity) continue;  // representation is degenerate there by design
    const Attitude back = Attitude::from_euler(e.roll, e.pitch, e.yaw);
    const double dist = std::min((q.q.coeffs() - back.q.coeffs()).norm(),
                                 (q.q.coeffs() + back.q.coeffs()).norm());
    CHECK(dist < 1e-9);
  }
}

TEST_CASE("quat_to_euler: yaw stays in (-pi, pi]", "[attitude]") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const EulerAngles e = quat_to_euler(testutil::random_attitude(rng));
    CHECK(e.yaw > -M_PI);
    CHECK(e.yaw <= M_PI);
  }
}

TEST_CASE("quat_to_euler: flags gimbal proximity and still returns values", "[attitude]") {
  const Attitude q = Attitude::from_euler(0.3, 89.995 * M_PI / 180.0, 0.7);
  const EulerAngles e = quat_to_euler(q);
  CHECK(e.gimbal_proximity);
  CHECK(std::isfinite(e.roll));
  CHECK(std::isfinite(e.yaw));
}

TEST_CASE("attitude stays unit-norm through long random op chains", "[attitude]") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Attitude att = testutil::random_attitude(rng);
  for (int k = 0; k < 20000; ++k) {
    att = quat_integrate(att, Vec3(u(rng), u(rng), u(rng)), 1.0 / 120.0);
  }
  CHECK(std::abs(att.q.norm() - 1.0) < 1e-9);
}
