#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "quadnav/strapdown.hpp"
#include "quadnav/synth.hpp"
#include "quadnav/windowing.hpp"
#include "test_helpers.hpp"

using namespace quadnav;

namespace {

constexpr double kG = 9.794;

// circular horizontal motion, used as an extra analytic fixture
class CircleTrajectory final : public AnalyticTrajectory {
 public:
  CircleTrajectory(double radius, double rate, double duration)
      : r_(radius), omega_(rate), dur_(duration) {}
  Vec3 position(double t) const override {
    return Vec3(r_ * std::cos(omega_ * t), r_ * std::sin(omega_ * t), 0.0);
  }
  Vec3 velocity(double t) const override {
    return Vec3(-r_ * omega_ * std::sin(omega_ * t), r_ * omega_ * std::cos(omega_ * t), 0.0);
  }
  double duration() const override { return dur_; }

 private:
  double r_, omega_, dur_;
};

NavState exact_init(const AnalyticTrajectory& traj) {
  NavState s;
  s.t = 0.0;
  s.p = traj.position(0.0);
  s.v = traj.velocity(0.0);
  s.att = Attitude::level_with_yaw(traj.path_yaw(0.0));
  return s;
}

}  // namespace

TEST_CASE("gen_trajectory: straight line covers speed times duration", "[synth]") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::straight;
  spec.speed = 5.0;
  spec.duration = 10.0;
  spec.heading = 0.9;
  const GroundTruthTrack gt = gen_trajectory(spec, 120.0);
  CHECK((gt.points.back().p - gt.points.front().p).norm() == Catch::Approx(50.0).margin(1e-9));
  CHECK(gt.points.size() == 1201);
}

TEST_CASE("gen_trajectory: vertical-periodic altitude spans exactly 2 amplitudes", "[synth]") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::vertical_periodic;
  spec.amplitude = 1.7;
  spec.period = 2.0;
  spec.duration = 10.0;
  const GroundTruthTrack gt = gen_trajectory(spec, 120.0);
  double lo = 1e300, hi = -1e300;
  for (const auto& p : gt.points) {
    lo = std::min(lo, -p.p.z());
    hi = std::max(hi, -p.p.z());
  }
  CHECK(hi - lo == Catch::Approx(2.0 * spec.amplitude).margin(1e-6));
}

TEST_CASE("gen_trajectory: window labels match a quadrature of the analytic velocity",
          "[synth]") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::horizontal_periodic;
  spec.speed = 4.0;
  spec.duration = 12.0;
  spec.amplitude = 2.0;
  spec.period = 2.5;
  spec.heading = 0.3;
  const SpecTrajectory traj(spec);
  const GroundTruthTrack gt = traj.sample(120.0);
  const ImuSequence seq = trajectory_to_imu(traj, 120.0, kG);
  const auto wr = make_windows(seq, gt);
  REQUIRE(wr.windows.size() == 12);

  for (const auto& w : wr.windows) {
    // Simpson quadrature of the analytic velocity across the epoch
    const int steps = 200;
    Vec3 delta = Vec3::Zero();
    const double h = (w.t_end - w.t_start) / steps;
    for (int i = 0; i < steps; ++i) {
      const double a = w.t_start + i * h;
      delta += (h / 6.0) *
               (traj.velocity(a) + 4.0 * traj.velocity(a + h / 2.0) + traj.velocity(a + h));
    }
    CHECK(w.label_distance == Catch::Approx(std::hypot(delta.x(), delta.y())).margin(1e-6));
    CHECK(w.label_altitude == Catch::Approx(-delta.z()).margin(1e-6));
  }
}

TEST_CASE("trajectory_to_imu: straight constant velocity measures only gravity", "[synth]") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::straight;
  spec.speed = 5.0;
  spec.duration = 5.0;
  spec.heading = 0.7;
  const ImuSequence seq = trajectory_to_imu(SpecTrajectory(spec), 120.0, kG);
  for (const auto& s : seq.samples) {
    CHECK((s.f - Vec3(0, 0, -kG)).norm() < 1e-12);
    CHECK(s.w.norm() < 1e-12);
  }
}

TEST_CASE("trajectory_to_imu: circular motion shows the centripetal magnitude", "[synth]") {
  const double radius = 40.0, omega = 0.05;  // gentle circle
  const CircleTrajectory traj(radius, omega, 30.0);
  const ImuSequence seq = trajectory_to_imu(traj, 120.0, kG);
  const double want = omega * omega * radius;
  for (std::size_t k = 100; k < 200; ++k) {
    const Vec3 specific = seq.samples[k].f;
    const double horizontal = std::hypot(specific.x(), specific.y());
    CHECK(std::abs(horizontal - want) < 1e-9);
    CHECK(std::abs(specific.z() + kG) < 1e-9);
  }
}

TEST_CASE("mechanization round trip holds for all three trajectory kinds", "[synth]") {
  for (const TrajectoryKind kind :
       {TrajectoryKind::straight, TrajectoryKind::horizontal_periodic,
        TrajectoryKind::vertical_periodic}) {
    TrajectorySpec spec;
    spec.kind = kind;
    spec.speed = 4.2;
    spec.duration = 60.0;
    spec.amplitude = 2.0;
    spec.period = 2.5;
    spec.heading = 0.25;
    const SpecTrajectory traj(spec);
    const ImuSequence seq = trajectory_to_imu(traj, 120.0, kG);
    const TrajectorySolution sol = ins_run(seq, exact_init(traj), kG);
    double max_err = 0.0;
    for (const auto& pt : sol.points)
      max_err = std::max(max_err, (pt.p - traj.position(pt.t)).norm());
    INFO("kind " << to_string(kind));
    CHECK(max_err < 0.01);
  }
}

TEST_CASE("corrupt: zero model is the identity", "[synth]") {
  TrajectorySpec spec;
  spec.duration = 3.0;
  const ImuSequence seq = trajectory_to_imu(SpecTrajectory(spec), 120.0, kG);
  const ImuSequence out = corrupt(seq, ImuErrorModel{});
  REQUIRE(out.size() == seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    CHECK(out.samples[k].f == seq.samples[k].f);
    CHECK(out.samples[k].w == seq.samples[k].w);
  }
}

TEST_CASE("corrupt: pure bias shifts channel means by exactly the bias", "[synth]") {
  TrajectorySpec spec;
  spec.duration = 3.0;
  const ImuSequence seq = trajectory_to_imu(SpecTrajectory(spec), 120.0, kG);
  ImuErrorModel model;
  model.accel_bias = Vec3(0.01, -0.02, 0.03);
  model.gyro_bias = Vec3(-0.001, 0.002, -0.003);
  const ImuSequence out = corrupt(seq, model);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    CHECK((out.samples[k].f - seq.samples[k].f - model.accel_bias).norm() < 1e-15);
    CHECK((out.samples[k].w - seq.samples[k].w - model.gyro_bias).norm() < 1e-15);
  }
}

TEST_CASE("corrupt: noise sample variance lands within 5% over 1e5 samples", "[synth]") {
  ImuSequence seq;
  seq.rate_hz = 120.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) seq.samples.push_back({k / 120.0, Vec3::Zero(), Vec3::Zero()});
  ImuErrorModel model;
  model.accel_sigma = 0.05;
  model.seed = 606;
  const ImuSequence out = corrupt(seq, model);
  double mean = 0.0;
  for (const auto& s : out.samples) mean += s.f.x();
  mean /= n;
  double var = 0.0;
  for (const auto& s : out.samples) var += (s.f.x() - mean) * (s.f.x() - mean);
  var /= n;
  CHECK(var == Catch::Approx(model.accel_sigma * model.accel_sigma).epsilon(0.05));
}

TEST_CASE("corrupt: identical seeds give identical sequences", "[synth]") {
  TrajectorySpec spec;
  spec.duration = 2.0;
  const ImuSequence seq = trajectory_to_imu(SpecTrajectory(spec), 120.0, kG);
  ImuErrorModel model;
  model.accel_sigma = 0.1;
  model.gyro_sigma = 0.01;
  model.seed = 42;
  const ImuSequence a = corrupt(seq, model);
  const ImuSequence b = corrupt(seq, model);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.samples[k].f == b.samples[k].f);
    CHECK(a.samples[k].w == b.samples[k].w);
  }
}

TEST_CASE("gen_mimu: single zero-noise IMU equals the ideal sequence", "[synth]") {
  TrajectorySpec spec;
  spec.duration = 3.0;
  const SpecTrajectory traj(spec);
  const MimuRecording rec = gen_mimu(traj, 1, {ImuErrorModel{}}, 120.0, kG, "ideal");
  const ImuSequence ideal = trajectory_to_imu(traj, 120.0, kG);
  REQUIRE(rec.imus.size() == 1);
  for (std::size_t k = 0; k < ideal.size(); ++k)
    CHECK(rec.imus[0].samples[k].f == ideal.samples[k].f);
  CHECK(rec.kind == spec.kind);
  CHECK(rec.id == "ideal");
  CHECK(rec.gt.points.size() == ideal.size() + 1);
}

TEST_CASE("gen_mimu: reruns with the same seeds are identical", "[synth]") {
  TrajectorySpec spec;
  spec.duration = 2.0;
  const SpecTrajectory traj(spec);
  std::vector<ImuErrorModel> models(3);
  for (int i = 0; i < 3; ++i) {
    models[i].accel_sigma = 0.05;
    models[i].seed = 900 + i;
  }
  const MimuRecording a = gen_mimu(traj, 3, models, 120.0, kG);
  const MimuRecording b = gen_mimu(traj, 3, models, 120.0, kG);
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < a.imus[i].size(); ++k)
      CHECK(a.imus[i].samples[k].f == b.imus[i].samples[k].f);
  CHECK_THROWS_AS(gen_mimu(traj, 2, models, 120.0, kG), std::invalid_argument);
}
