#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/attitude.hpp"
#include "quadnav/strapdown.hpp"
#include "quadnav/types.hpp"

namespace quadnav {

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::horizontal_periodic;
  double speed = 4.0;      // forward speed [m/s]
  double duration = 60.0;  // s
  double amplitude = 2.0;  // periodic offset amplitude [m]
  double period = 2.5;     // s
  double heading = 0.0;    // forward direction [rad]
};

inline void validate(const TrajectorySpec& spec) {
  if (!(spec.speed > 0.0) || !(spec.duration > 0.0))
    throw std::invalid_argument("TrajectorySpec: speed and duration must be > 0");
  if (spec.kind != TrajectoryKind::straight &&
      (!(spec.amplitude > 0.0) || !(spec.period > 0.0)))
    throw std::invalid_argument("TrajectorySpec: periodic kinds need amplitude and period > 0");
}

// Analytic flight path with exact derivatives. The base class is the
// contract trajectory_to_imu consumes; the spec-driven subclass covers the
// three dataset trajectory families.
class AnalyticTrajectory {
 public:
  virtual ~AnalyticTrajectory() = default;
  virtual Vec3 position(double t) const = 0;  // NED [m]
  virtual Vec3 velocity(double t) const = 0;  // NED [m/s]
  virtual double duration() const = 0;        // s

  // Heading of the planar velocity; constant-heading paths override.
  virtual double path_yaw(double t) const {
    const Vec3 v = velocity(t);
    return std::atan2(v.y(), v.x());
  }

  GroundTruthTrack sample(double rate_hz) const {
    GroundTruthTrack gt;
    const int n = static_cast<int>(std::round(duration() * rate_hz));
    gt.points.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double t = k / rate_hz;
      gt.points.push_back({t, position(t)});
    }
    return gt;
  }
};

// straight: constant-velocity line along `heading`.
// horizontal-periodic: forward advance plus lateral amplitude*sin(2*pi*t/T).
// vertical-periodic: forward advance plus altitude amplitude*sin(2*pi*t/T).
class SpecTrajectory final : public AnalyticTrajectory {
 public:
  explicit SpecTrajectory(const TrajectorySpec& spec) : spec_(spec) {
    validate(spec);
    fwd_ = Vec3(std::cos(spec.heading), std::sin(spec.heading), 0.0);
    lat_ = Vec3(-std::sin(spec.heading), std::cos(spec.heading), 0.0);
    omega_ = spec.kind == TrajectoryKind::straight ? 0.0 : 2.0 * M_PI / spec.period;
  }

  Vec3 position(double t) const override {
    Vec3 p = spec_.speed * t * fwd_;
    switch (spec_.kind) {
      case TrajectoryKind::straight:
        break;
      case TrajectoryKind::horizontal_periodic:
        p += spec_.amplitude * std::sin(omega_ * t) * lat_;
        break;
      case TrajectoryKind::vertical_periodic:
        p.z() -= spec_.amplitude * std::sin(omega_ * t);  // altitude = -D
        break;
    }
    return p;
  }

  Vec3 velocity(double t) const override {
    Vec3 v = spec_.speed * fwd_;
    switch (spec_.kind) {
      case TrajectoryKind::straight:
        break;
      case TrajectoryKind::horizontal_periodic:
        v += spec_.amplitude * omega_ * std::cos(omega_ * t) * lat_;
        break;
      case TrajectoryKind::vertical_periodic:
        v.z() -= spec_.amplitude * omega_ * std::cos(omega_ * t);
        break;
    }
    return v;
  }

  double duration() const override { return spec_.duration; }

  double path_yaw(double t) const override {
    // planar heading is constant for straight and vertical-periodic paths
    if (spec_.kind != TrajectoryKind::horizontal_periodic) return spec_.heading;
    return AnalyticTrajectory::path_yaw(t);
  }

  const TrajectorySpec& spec() const { return spec_; }

 private:
  TrajectorySpec spec_;
  Vec3 fwd_, lat_;
  double omega_ = 0.0;
};

// Positions sampled at rate_hz (endpoints inclusive); derivatives stay
// available through the returned generator's class.
inline GroundTruthTrack gen_trajectory(const TrajectorySpec& spec, double rate_hz) {
  return SpecTrajectory(spec).sample(rate_hz);
}

// Inverse strapdown mechanization: emits the error-free specific-force and
// angular-rate samples that drive ins_run back onto the trajectory. The
// attitude profile is level with yaw following the path heading; each sample
// carries the interval-average acceleration (exact velocity difference), so
// the first-order integrator reproduces velocity exactly and position to
// trapezoidal accuracy.
inline ImuSequence trajectory_to_imu(const AnalyticTrajectory& traj, double rate_hz,
                                     double g = kDefaultGravity) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("trajectory_to_imu: rate must be > 0");
  const double dt = 1.0 / rate_hz;
  const int n = static_cast<int>(std::round(traj.duration() * rate_hz));
  const Vec3 gravity_ned(0.0, 0.0, g);

  ImuSequence seq;
  seq.rate_hz = rate_hz;
  seq.samples.reserve(n);
  Attitude att = Attitude::level_with_yaw(traj.path_yaw(0.0));
  for (int k = 0; k < n; ++k) {
    const double t0 = k / rate_hz;
    const double t1 = (k + 1) / rate_hz;
    const Attitude next = Attitude::level_with_yaw(traj.path_yaw(t1));
    const Vec3 accel_avg = (traj.velocity(t1) - traj.velocity(t0)) / (t1 - t0);

    ImuSample s;
    s.t = t0;
    s.w = rotation_vector_between(att, next) / dt;
    s.f = att.rot().transpose() * (accel_avg - gravity_ned);
    seq.samples.push_back(s);
    att = quat_integrate(att, s.w, dt);
  }
  return seq;
}

// Bias plus seeded white noise per channel.
struct ImuErrorModel {
  Vec3 accel_bias = Vec3::Zero();  // m/s^2
  Vec3 gyro_bias = Vec3::Zero();   // rad/s
  double accel_sigma = 0.0;        // m/s^2 per sample
  double gyro_sigma = 0.0;         // rad/s per sample
  std::uint64_t seed = 0;
};

inline void validate(const ImuErrorModel& m) {
  if (m.accel_sigma < 0.0 || m.gyro_sigma < 0.0)
    throw std::invalid_argument("ImuErrorModel: sigma must be >= 0");
}

inline ImuSequence corrupt(const ImuSequence& seq, const ImuErrorModel& model) {
  validate(model);
  ImuSequence out = seq;
  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& s : out.samples) {
    for (int c = 0; c < 3; ++c) s.f[c] += model.accel_bias[c] + model.accel_sigma * gauss(rng);
    for (int c = 0; c < 3; ++c) s.w[c] += model.gyro_bias[c] + model.gyro_sigma * gauss(rng);
  }
  return out;
}

// One ideal sequence corrupted independently n times, with the GT attached.
inline MimuRecording gen_mimu(const AnalyticTrajectory& traj, int n,
                              const std::vector<ImuErrorModel>& models, double rate_hz,
                              double g = kDefaultGravity, const std::string& id = "synthetic") {
  if (n < 1) throw std::invalid_argument("gen_mimu: need n >= 1");
  if (static_cast<int>(models.size()) != n)
    throw std::invalid_argument("gen_mimu: need one error model per IMU");

  const ImuSequence ideal = trajectory_to_imu(traj, rate_hz, g);
  MimuRecording rec;
  rec.id = id;
  if (const auto* st = dynamic_cast<const SpecTrajectory*>(&traj)) rec.kind = st->spec().kind;
  for (int i = 0; i < n; ++i) rec.imus.push_back(corrupt(ideal, models[i]));
  rec.gt = traj.sample(rate_hz);
  return rec;
}

}  // namespace quadnav
