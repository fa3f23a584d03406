#pragma once

#include <cmath>
#include <stdexcept>

#include "quadnav/attitude.hpp"
#include "quadnav/types.hpp"

namespace quadnav {

// Default local gravity magnitude [m/s^2]. Flights in scope last tens of
// seconds, so Earth rotation and transport-rate terms are ignored.
inline constexpr double kDefaultGravity = 9.794;

struct NavState {
  Vec3 p = Vec3::Zero();  // NED position [m]
  Vec3 v = Vec3::Zero();  // NED velocity [m/s]
  Attitude att;
  double t = 0.0;  // s
};

inline void validate(const NavState& s) {
  if (!all_finite(s.p) || !all_finite(s.v) || !std::isfinite(s.t) ||
      !s.att.q.coeffs().allFinite())
    throw std::invalid_argument("NavState: non-finite component");
}

// One first-order strapdown step. Velocity and position integrate the
// specific force rotated with the attitude at the start of the step;
// NED gravity vector is (0, 0, g).
inline NavState ins_propagate(const NavState& s, const ImuSample& sample, double dt,
                              double g = kDefaultGravity) {
  validate(s);
  validate(sample);
  if (!(dt > 0.0)) throw std::invalid_argument("ins_propagate: dt must be > 0");
  if (!(g > 0.0)) throw std::invalid_argument("ins_propagate: g must be > 0");

  const Vec3 a = s.att.rot() * sample.f + Vec3(0.0, 0.0, g);
  NavState next;
  next.att = quat_integrate(s.att, sample.w, dt);
  next.v = s.v + a * dt;
  next.p = s.p + s.v * dt + 0.5 * a * dt * dt;
  next.t = s.t + dt;
  return next;
}

// Folds ins_propagate over a sequence. The returned track holds the initial
// state plus one point per sample. init.t must match the sequence start.
inline TrajectorySolution ins_run(const ImuSequence& seq, const NavState& init,
                                  double g = kDefaultGravity) {
  if (seq.empty()) throw std::invalid_argument("ins_run: empty sequence");
  if (std::abs(init.t - seq.t_begin()) > 1e-9)
    throw std::invalid_argument("ins_run: init.t does not match sequence start");

  TrajectorySolution sol;
  sol.source = TrajectorySolution::Source::ins;
  sol.points.reserve(seq.size() + 1);
  NavState s = init;
  sol.points.push_back({s.t, s.p});
  const int n = static_cast<int>(seq.size());
  for (int k = 0; k < n; ++k) {
    const double dt = (k + 1 < n) ? seq.samples[k + 1].t - seq.samples[k].t : seq.dt();
    s = ins_propagate(s, seq.samples[k], dt, g);
    sol.points.push_back({s.t, s.p});
  }
  return sol;
}

// Initialization convention for recorded data: position and velocity from the
// first GT fixes, leveled attitude with the yaw of the initial GT velocity.
inline NavState init_from_gt(const GroundTruthTrack& gt, double t0) {
  if (gt.points.size() < 2) throw std::invalid_argument("init_from_gt: need at least two fixes");
  NavState s;
  s.t = t0;
  s.p = gt.interpolate(t0);
  const auto& a = gt.points[0];
  const auto& b = gt.points[1];
  s.v = (b.p - a.p) / (b.t - a.t);
  const double yaw = (s.v.head<2>().norm() > 1e-9) ? std::atan2(s.v.y(), s.v.x()) : 0.0;
  s.att = Attitude::level_with_yaw(yaw);
  return s;
}

}  // namespace quadnav
