#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/attitude.hpp"
#include "quadnav/types.hpp"

namespace quadnav {

// Peaks of the smoothed accelerometer magnitude.
struct PeakSet {
  std::vector<int> indices;        // sample indices, strictly increasing
  std::vector<double> magnitudes;  // smoothed |f| at the peaks [m/s^2]

  int count() const { return static_cast<int>(indices.size()); }
};

struct QdrParams {
  double weinberg_gain = 0.48;       // K, calibratable per dataset
  int min_separation = 60;           // samples (~0.5 s at 120 Hz)
  int smoothing_halfwidth = 10;      // moving-average halfwidth, samples
  double prominence_threshold = 0.5; // m/s^2
};

inline void validate(const QdrParams& p) {
  if (!(p.weinberg_gain > 0.0)) throw std::invalid_argument("QdrParams: gain must be > 0");
  if (p.min_separation < 1) throw std::invalid_argument("QdrParams: min_separation must be >= 1");
  if (p.smoothing_halfwidth < 0) throw std::invalid_argument("QdrParams: negative halfwidth");
}

// Moving average with window [i-h, i+h], truncated at the edges.
inline std::vector<double> moving_average(const std::vector<double>& x, int halfwidth) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - halfwidth);
    const int hi = std::min(n - 1, i + halfwidth);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += x[j];
    out[i] = sum / (hi - lo + 1);
  }
  return out;
}

inline std::vector<double> accel_magnitude(const ImuSequence& seq) {
  std::vector<double> mag(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) mag[i] = seq.samples[i].f.norm();
  return mag;
}

namespace detail {

// Topographic prominence of a strict local maximum: height above the higher
// of the two deepest valleys separating it from taller terrain (or the edge).
inline double prominence(const std::vector<double>& s, int i) {
  const int n = static_cast<int>(s.size());
  double left_min = s[i];
  for (int j = i - 1; j >= 0; --j) {
    if (s[j] > s[i]) break;
    left_min = std::min(left_min, s[j]);
    if (j == 0) break;
  }
  double right_min = s[i];
  for (int j = i + 1; j < n; ++j) {
    if (s[j] > s[i]) break;
    right_min = std::min(right_min, s[j]);
  }
  return s[i] - std::max(left_min, right_min);
}

}  // namespace detail

// Strict local maxima of the smoothed |f| signal that clear the prominence
// threshold and sit at least min_separation samples apart; when two
// candidates conflict the taller one wins.
inline PeakSet detect_peaks(const ImuSequence& seq, const QdrParams& params) {
  validate(params);
  if (seq.empty()) throw std::invalid_argument("detect_peaks: empty sequence");

  const std::vector<double> smooth = moving_average(accel_magnitude(seq), params.smoothing_halfwidth);
  const int n = static_cast<int>(smooth.size());

  std::vector<int> candidates;
  for (int i = 1; i + 1 < n; ++i) {
    if (smooth[i] > smooth[i - 1] && smooth[i] > smooth[i + 1] &&
        detail::prominence(smooth, i) > params.prominence_threshold) {
      candidates.push_back(i);
    }
  }

  // tallest-first greedy separation
  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return smooth[candidates[a]] > smooth[candidates[b]];
  });
  std::vector<int> kept;
  for (int oi : order) {
    const int idx = candidates[oi];
    bool blocked = false;
    for (int k : kept) {
      if (std::abs(k - idx) < params.min_separation) { blocked = true; break; }
    }
    if (!blocked) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());

  PeakSet out;
  out.indices = kept;
  out.magnitudes.reserve(kept.size());
  for (int idx : kept) out.magnitudes.push_back(smooth[idx]);
  return out;
}

// Weinberg segment length: d = K * (max - min)^(1/4) over the magnitude
// slice between two consecutive peaks.
inline double weinberg_distance(std::span<const double> segment, double gain) {
  if (segment.empty()) throw std::invalid_argument("weinberg_distance: empty segment");
  const auto [mn, mx] = std::minmax_element(segment.begin(), segment.end());
  return gain * std::pow(*mx - *mn, 0.25);
}

// Gyro-only yaw track: leveled attitude seeded at init_yaw, quat_integrate
// folded over the gyro samples. Entry k is the yaw at sample time t_k.
inline std::vector<double> estimate_heading(const ImuSequence& seq, double init_yaw) {
  if (seq.empty()) throw std::invalid_argument("estimate_heading: empty sequence");
  std::vector<double> yaw(seq.size());
  Attitude att = Attitude::level_with_yaw(init_yaw);
  yaw[0] = quat_to_euler(att).yaw;
  const int n = static_cast<int>(seq.size());
  for (int k = 0; k + 1 < n; ++k) {
    const double dt = seq.samples[k + 1].t - seq.samples[k].t;
    att = quat_integrate(att, seq.samples[k].w, dt);
    yaw[k + 1] = quat_to_euler(att).yaw;
  }
  return yaw;
}

// One dead-reckoning advance in the horizontal plane.
inline std::pair<double, double> qdr_step(std::pair<double, double> pos, double d, double yaw) {
  if (d < 0.0) throw std::invalid_argument("qdr_step: distance must be >= 0");
  return {pos.first + d * std::cos(yaw), pos.second + d * std::sin(yaw)};
}

struct QdrResult {
  TrajectorySolution track;              // positions at peak times, D = 0 (2-D method)
  PeakSet peaks;
  std::vector<double> segment_distances; // Weinberg distance per peak-to-peak segment [m]
  std::string diagnostic;                // non-empty when no track could be formed
};

// Full model-based pipeline: peaks -> per-segment Weinberg distances ->
// heading at the segment-end peaks -> chained position updates.
inline QdrResult qdr_run(const ImuSequence& seq, const QdrParams& params,
                         std::pair<double, double> init_pos, double init_yaw) {
  QdrResult res;
  res.track.source = TrajectorySolution::Source::qdr;
  res.peaks = detect_peaks(seq, params);
  if (res.peaks.count() < 2) {
    res.diagnostic = "fewer than 2 peaks detected (" + std::to_string(res.peaks.count()) +
                     "); QDR needs a periodic trajectory";
    return res;
  }

  const std::vector<double> smooth =
      moving_average(accel_magnitude(seq), params.smoothing_halfwidth);
  const std::vector<double> yaw = estimate_heading(seq, init_yaw);

  std::pair<double, double> pos = init_pos;
  res.track.points.push_back({seq.samples[res.peaks.indices[0]].t, Vec3(pos.first, pos.second, 0.0)});
  for (int s = 0; s + 1 < res.peaks.count(); ++s) {
    const int i0 = res.peaks.indices[s];
    const int i1 = res.peaks.indices[s + 1];
    const std::span<const double> segment(smooth.data() + i0, static_cast<std::size_t>(i1 - i0 + 1));
    const double d = weinberg_distance(segment, params.weinberg_gain);
    pos = qdr_step(pos, d, yaw[i1]);
    res.segment_distances.push_back(d);
    res.track.points.push_back({seq.samples[i1].t, Vec3(pos.first, pos.second, 0.0)});
  }
  return res;
}

}  // namespace quadnav
