#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "quadnav/types.hpp"

namespace quadnav {

// Trajectory-level error summary. The headline numbers are 3-D position
// errors; the _2d variants restrict to the horizontal plane (the paper does
// not say which its tables use, so both are reported).
struct EvalReport {
  double rmse_m = 0.0;
  double max_error_m = 0.0;
  double std_m = 0.0;
  double rmse_2d_m = 0.0;
  double max_error_2d_m = 0.0;
  double std_2d_m = 0.0;
  double trajectory_length_m = 0.0;
};

// sqrt(sum (x_i - xhat_i)^2 / N)
inline double rmse(std::span<const double> x, std::span<const double> xhat) {
  if (x.size() != xhat.size()) throw std::invalid_argument("rmse: length mismatch");
  if (x.empty()) throw std::invalid_argument("rmse: empty input");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = x[i] - xhat[i];
    sq += e * e;
  }
  return std::sqrt(sq / static_cast<double>(x.size()));
}

namespace detail {

struct SeriesStats {
  double rmse = 0.0, max = 0.0, stddev = 0.0;
};

inline SeriesStats stats(const std::vector<double>& err) {
  SeriesStats s;
  double sq = 0.0, sum = 0.0;
  for (double e : err) {
    sq += e * e;
    sum += e;
    s.max = std::max(s.max, std::abs(e));
  }
  const double n = static_cast<double>(err.size());
  s.rmse = std::sqrt(sq / n);
  const double mean = sum / n;
  double var = 0.0;
  for (double e : err) var += (e - mean) * (e - mean);
  s.stddev = std::sqrt(var / n);  // population std
  return s;
}

}  // namespace detail

// Per-sample Euclidean position error of the solution against GT linearly
// interpolated to the solution timestamps.
inline EvalReport compute_metrics(const GroundTruthTrack& gt, const TrajectorySolution& est) {
  if (est.empty()) throw std::invalid_argument("compute_metrics: empty solution");
  if (gt.points.size() < 2) throw std::invalid_argument("compute_metrics: GT needs >= 2 points");

  std::vector<double> err3, err2;
  err3.reserve(est.points.size());
  err2.reserve(est.points.size());
  for (const auto& pt : est.points) {
    if (!gt.covers(pt.t, 1e-6))
      throw std::invalid_argument("compute_metrics: solution time outside GT span");
    const Vec3 d = gt.interpolate(pt.t) - pt.p;
    err3.push_back(d.norm());
    err2.push_back(std::hypot(d.x(), d.y()));
  }
  const auto s3 = detail::stats(err3);
  const auto s2 = detail::stats(err2);
  EvalReport r;
  r.rmse_m = s3.rmse;
  r.max_error_m = s3.max;
  r.std_m = s3.stddev;
  r.rmse_2d_m = s2.rmse;
  r.max_error_2d_m = s2.max;
  r.std_2d_m = s2.stddev;
  r.trajectory_length_m = gt.path_length();
  return r;
}

struct ReconstructionResult {
  TrajectorySolution track;
  int clamped = 0;  // negative distance increments clamped to zero
};

// Dead-reckoning equations of motion: per-epoch distance increments advance
// the horizontal position along the heading, altitude increments stack on
// the vertical. The track starts at `init` and emits one point per epoch.
inline ReconstructionResult reconstruct(const std::vector<double>& d,
                                        const std::vector<double>& dh,
                                        const std::vector<double>& yaw, const Vec3& init,
                                        double t0 = 0.0, double epoch_dt = 1.0) {
  if (d.size() != dh.size() || d.size() != yaw.size())
    throw std::invalid_argument("reconstruct: increment lists differ in length");
  if (d.empty()) throw std::invalid_argument("reconstruct: no increments");

  ReconstructionResult res;
  res.track.source = TrajectorySolution::Source::quadnet;
  res.track.points.reserve(d.size() + 1);
  Vec3 p = init;
  res.track.points.push_back({t0, p});
  for (std::size_t k = 0; k < d.size(); ++k) {
    double dk = d[k];
    if (dk < 0.0) {
      dk = 0.0;
      ++res.clamped;
    }
    p.x() += dk * std::cos(yaw[k]);
    p.y() += dk * std::sin(yaw[k]);
    p.z() -= dh[k];  // altitude up = Down negative
    res.track.points.push_back({t0 + (k + 1) * epoch_dt, p});
  }
  return res;
}

}  // namespace quadnav
