#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadnav {

using Vec3 = Eigen::Vector3d;

inline bool all_finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// One inertial sample. Body frame, SI units.
struct ImuSample {
  double t = 0.0;          // s
  Vec3 f = Vec3::Zero();   // specific force [m/s^2]
  Vec3 w = Vec3::Zero();   // angular rate [rad/s]
};

inline void validate(const ImuSample& s) {
  if (!std::isfinite(s.t) || s.t < 0.0)
    throw std::invalid_argument("ImuSample: timestamp must be finite and >= 0");
  if (!all_finite(s.f) || !all_finite(s.w))
    throw std::invalid_argument("ImuSample: non-finite component");
}

// Fixed-rate stream of ImuSamples. Canonical rate is 120 Hz (one 1-second
// epoch = 120 samples).
struct ImuSequence {
  std::vector<ImuSample> samples;
  double rate_hz = 120.0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double dt() const { return 1.0 / rate_hz; }
  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }
};

inline void validate(const ImuSequence& seq) {
  if (!(seq.rate_hz > 0.0))
    throw std::invalid_argument("ImuSequence: rate_hz must be > 0");
  const double nominal = 1.0 / seq.rate_hz;
  const double slack = 0.25 * nominal;
  for (std::size_t i = 0; i < seq.samples.size(); ++i) {
    validate(seq.samples[i]);
    if (i == 0) continue;
    const double dt = seq.samples[i].t - seq.samples[i - 1].t;
    if (dt <= 0.0)
      throw std::invalid_argument("ImuSequence: timestamps not strictly increasing at index " +
                                  std::to_string(i));
    if (std::abs(dt - nominal) >= slack)
      throw std::invalid_argument("ImuSequence: sample spacing off nominal rate at index " +
                                  std::to_string(i));
  }
}

struct GroundTruthPoint {
  double t = 0.0;  // s
  Vec3 p = Vec3::Zero();  // NED [m]
};

// RTK-grade position track, NED frame anchored at the trajectory's first fix.
// Timestamps strictly increasing; arbitrary rate, interpolated linearly.
struct GroundTruthTrack {
  std::vector<GroundTruthPoint> points;

  bool empty() const { return points.empty(); }
  double t_begin() const { return points.front().t; }
  double t_end() const { return points.back().t; }

  bool covers(double t, double eps = 1e-9) const {
    return !points.empty() && t >= points.front().t - eps && t <= points.back().t + eps;
  }

  // Linear interpolation; clamps to the end points inside the +-eps fringe.
  Vec3 interpolate(double t) const {
    if (points.empty()) throw std::invalid_argument("GroundTruthTrack: empty track");
    if (t <= points.front().t) return points.front().p;
    if (t >= points.back().t) return points.back().p;
    // binary search for the bracketing segment
    std::size_t lo = 0, hi = points.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (points[mid].t <= t) lo = mid; else hi = mid;
    }
    const auto& a = points[lo];
    const auto& b = points[hi];
    const double u = (t - a.t) / (b.t - a.t);
    return a.p + u * (b.p - a.p);
  }

  double path_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
      len += (points[i].p - points[i - 1].p).norm();
    return len;
  }
};

inline void validate(const GroundTruthTrack& gt) {
  for (std::size_t i = 0; i < gt.points.size(); ++i) {
    if (!std::isfinite(gt.points[i].t) || !all_finite(gt.points[i].p))
      throw std::invalid_argument("GroundTruthTrack: non-finite entry at index " +
                                  std::to_string(i));
    if (i > 0 && gt.points[i].t <= gt.points[i - 1].t)
      throw std::invalid_argument("GroundTruthTrack: timestamps not strictly increasing at index " +
                                  std::to_string(i));
  }
}

enum class TrajectoryKind { straight, horizontal_periodic, vertical_periodic };

inline std::string to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::straight: return "straight";
    case TrajectoryKind::horizontal_periodic: return "horizontal-periodic";
    case TrajectoryKind::vertical_periodic: return "vertical-periodic";
  }
  throw std::logic_error("TrajectoryKind: bad enum value");
}

inline TrajectoryKind parse_trajectory_kind(const std::string& s) {
  if (s == "straight") return TrajectoryKind::straight;
  if (s == "horizontal-periodic") return TrajectoryKind::horizontal_periodic;
  if (s == "vertical-periodic") return TrajectoryKind::vertical_periodic;
  throw std::invalid_argument("unknown trajectory kind '" + s + "'");
}

// n axis-aligned IMU sequences plus the ground-truth track. The unit of
// dataset and simulation I/O. After synchronization all member sequences
// share rate and sample count.
struct MimuRecording {
  std::vector<ImuSequence> imus;  // n >= 1
  GroundTruthTrack gt;
  std::string id;
  TrajectoryKind kind = TrajectoryKind::horizontal_periodic;

  int n_imus() const { return static_cast<int>(imus.size()); }
};

inline void validate(const MimuRecording& rec) {
  if (rec.imus.empty()) throw std::invalid_argument("MimuRecording: needs at least one IMU");
  const auto n = rec.imus.front().size();
  const double rate = rec.imus.front().rate_hz;
  for (const auto& seq : rec.imus) {
    if (seq.size() != n)
      throw std::invalid_argument("MimuRecording: member sequences differ in sample count");
    if (seq.rate_hz != rate)
      throw std::invalid_argument("MimuRecording: member sequences differ in rate");
  }
  validate(rec.gt);
}

// One network input block: `size` rows of [fx fy fz wx wy wz] (canonically
// 120 rows = 1 s at 120 Hz) with its regression labels.
struct Window {
  Eigen::MatrixXd x;          // size x 6
  double t_start = 0.0;       // s
  double t_end = 0.0;         // s
  double label_distance = 0.0;  // planar GT displacement over the window [m]
  double label_altitude = 0.0;  // altitude change (up positive) [m]
};

inline void validate(const Window& w) {
  if (w.x.cols() != 6) throw std::invalid_argument("Window: expected 6 columns");
  if (!w.x.allFinite()) throw std::invalid_argument("Window: non-finite sample");
  if (!std::isfinite(w.label_distance) || !std::isfinite(w.label_altitude))
    throw std::invalid_argument("Window: non-finite label");
  if (w.label_distance < 0.0) throw std::invalid_argument("Window: negative distance label");
}

// Reconstructed track from any of the three estimators.
struct TrajectorySolution {
  enum class Source { ins, qdr, quadnet };
  struct Point {
    double t = 0.0;
    Vec3 p = Vec3::Zero();  // NED [m]
  };
  std::vector<Point> points;
  Source source = Source::ins;
  std::map<std::string, std::string> meta;  // split id, mode, k, ...

  bool empty() const { return points.empty(); }
};

inline std::string to_string(TrajectorySolution::Source s) {
  switch (s) {
    case TrajectorySolution::Source::ins: return "ins";
    case TrajectorySolution::Source::qdr: return "qdr";
    case TrajectorySolution::Source::quadnet: return "quadnet";
  }
  throw std::logic_error("Source: bad enum value");
}

}  // namespace quadnav
