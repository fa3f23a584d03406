#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

#include "quadnav/types.hpp"

namespace quadnav {

// Body-to-NED orientation. The quaternion is kept unit-norm after every
// update (|norm - 1| < 1e-9).
struct Attitude {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();

  static Attitude identity() { return Attitude{}; }

  // ZYX (yaw-pitch-roll) construction.
  static Attitude from_euler(double roll, double pitch, double yaw) {
    Eigen::Quaterniond q = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                           Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                           Eigen::AngleAxisd(roll, Vec3::UnitX());
    return Attitude{q.normalized()};
  }

  static Attitude level_with_yaw(double yaw) { return from_euler(0.0, 0.0, yaw); }

  Eigen::Matrix3d rot() const { return q.toRotationMatrix(); }  // body -> NED
};

struct EulerAngles {
  double roll = 0.0;   // rad
  double pitch = 0.0;  // rad
  double yaw = 0.0;    // rad, in (-pi, pi]
  bool gimbal_proximity = false;  // |pitch| > 89.99 deg
};

// q' = q (x) dq(w*dt). Exact axis-angle exponential above 1e-12 rad,
// first-order below; renormalized either way.
inline Attitude quat_integrate(const Attitude& att, const Vec3& w, double dt) {
  if (!all_finite(w) || !std::isfinite(dt))
    throw std::invalid_argument("quat_integrate: non-finite input");
  if (!(dt > 0.0)) throw std::invalid_argument("quat_integrate: dt must be > 0");

  const Vec3 theta = w * dt;
  const double angle = theta.norm();
  Eigen::Quaterniond dq;
  if (angle > 1e-12) {
    const double half = 0.5 * angle;
    const Vec3 axis = theta / angle;
    dq = Eigen::Quaterniond(std::cos(half), std::sin(half) * axis.x(),
                            std::sin(half) * axis.y(), std::sin(half) * axis.z());
  } else {
    dq = Eigen::Quaterniond(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z());
  }
  Eigen::Quaterniond out = att.q * dq;
  out.normalize();
  return Attitude{out};
}

// ZYX extraction from a body->NED quaternion. Near the pitch singularity
// (|pitch| > 89.99 deg) the gimbal flag is set and values are still returned.
inline EulerAngles quat_to_euler(const Attitude& att) {
  const Eigen::Quaterniond& q = att.q;
  EulerAngles e;
  const double sinp = 2.0 * (q.w() * q.y() - q.z() * q.x());
  e.pitch = std::asin(std::clamp(sinp, -1.0, 1.0));
  e.roll = std::atan2(2.0 * (q.w() * q.x() + q.y() * q.z()),
                      1.0 - 2.0 * (q.x() * q.x() + q.y() * q.y()));
  e.yaw = std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                     1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
  if (e.yaw <= -M_PI) e.yaw = M_PI;  // yaw in (-pi, pi]
  e.gimbal_proximity = std::abs(e.pitch) > 89.99 * M_PI / 180.0;
  return e;
}

// Rotation vector of att_from^-1 (x) att_to (exact log map). Used to derive
// the angular rate that drives one attitude onto another across a step.
inline Vec3 rotation_vector_between(const Attitude& from, const Attitude& to) {
  Eigen::Quaterniond dq = from.q.conjugate() * to.q;
  if (dq.w() < 0.0) dq.coeffs() *= -1.0;  // shortest arc
  const Vec3 v(dq.x(), dq.y(), dq.z());
  const double vn = v.norm();
  if (vn < 1e-15) return 2.0 * v;
  const double angle = 2.0 * std::atan2(vn, dq.w());
  return angle * v / vn;
}

// Angle of the relative rotation between two attitudes [rad].
inline double attitude_angle_between(const Attitude& a, const Attitude& b) {
  return rotation_vector_between(a, b).norm();
}

}  // namespace quadnav
