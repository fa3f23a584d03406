#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/network.hpp"
#include "quadnav/train.hpp"
#include "quadnav/types.hpp"
#include "quadnav/windowing.hpp"

namespace quadnav {

// 1-based IMU indices, matching the array numbering {1..n}.
struct ImuSubset {
  std::vector<int> indices;  // sorted, strictly increasing

  int size() const { return static_cast<int>(indices.size()); }
};

inline void validate(const ImuSubset& s, int n) {
  if (s.indices.empty()) throw std::invalid_argument("ImuSubset: empty");
  for (std::size_t i = 0; i < s.indices.size(); ++i) {
    if (s.indices[i] < 1 || s.indices[i] > n)
      throw std::invalid_argument("ImuSubset: index out of range 1..n");
    if (i > 0 && s.indices[i] <= s.indices[i - 1])
      throw std::invalid_argument("ImuSubset: indices not strictly increasing");
  }
}

// Raw-data average: per-sample, per-axis arithmetic mean of the subset's
// accelerometer and gyroscope channels. Members must be synchronized.
inline ImuSequence rda_average(const MimuRecording& rec, const ImuSubset& subset) {
  validate(subset, rec.n_imus());
  const ImuSequence& first = rec.imus[subset.indices.front() - 1];
  for (int idx : subset.indices) {
    const ImuSequence& seq = rec.imus[idx - 1];
    if (seq.size() != first.size() || seq.rate_hz != first.rate_hz)
      throw std::invalid_argument("rda_average: unsynchronized member sequences");
  }

  ImuSequence out;
  out.rate_hz = first.rate_hz;
  out.samples.resize(first.size());
  for (std::size_t k = 0; k < first.size(); ++k) {
    // running mean: identical members average to themselves bit-for-bit
    Vec3 f = Vec3::Zero(), w = Vec3::Zero();
    for (std::size_t j = 0; j < subset.indices.size(); ++j) {
      const ImuSample& s = rec.imus[subset.indices[j] - 1].samples[k];
      f += (s.f - f) / static_cast<double>(j + 1);
      w += (s.w - w) / static_cast<double>(j + 1);
    }
    out.samples[k].t = first.samples[k].t;
    out.samples[k].f = f;
    out.samples[k].w = w;
  }
  return out;
}

// After-regression average: arithmetic mean of the per-IMU scalar estimates
// (running form, so equal estimates average to themselves exactly).
inline double ara_average(std::span<const double> predictions) {
  if (predictions.empty()) throw std::invalid_argument("ara_average: empty input");
  double mean = 0.0;
  for (std::size_t j = 0; j < predictions.size(); ++j)
    mean += (predictions[j] - mean) / static_cast<double>(j + 1);
  return mean;
}

// All C(n,k) subsets of {1..n} in lexicographic order.
inline std::vector<ImuSubset> enumerate_subsets(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("enumerate_subsets: need 1 <= k <= n");
  std::vector<ImuSubset> out;
  std::vector<int> cur(k);
  std::iota(cur.begin(), cur.end(), 1);
  while (true) {
    out.push_back(ImuSubset{cur});
    // advance the rightmost index that can still move
    int i = k - 1;
    while (i >= 0 && cur[i] == n - (k - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

enum class FusionMode { rda, ara };

inline std::string to_string(FusionMode m) { return m == FusionMode::rda ? "rda" : "ara"; }

inline FusionMode parse_fusion_mode(const std::string& s) {
  if (s == "rda") return FusionMode::rda;
  if (s == "ara") return FusionMode::ara;
  throw std::invalid_argument("unknown fusion mode '" + s + "'");
}

// One table row: mean per-epoch regression metrics across all size-k subsets.
struct CombinationRow {
  int k = 0;
  int n_subsets = 0;       // subsets actually evaluated
  int n_skipped = 0;       // subsets skipped for missing IMUs/models
  double rmse = 0.0;       // m
  double max_error = 0.0;  // m
  double std_dev = 0.0;    // m
  std::vector<std::string> diagnostics;
};

namespace detail {

struct EpochSeries {
  std::vector<double> labels;
  std::vector<double> predictions;
};

inline void series_metrics(const EpochSeries& s, double& rmse, double& max_err, double& std_dev) {
  const std::size_t n = s.labels.size();
  if (n == 0) throw std::invalid_argument("evaluate_combinations: no epochs to score");
  double sq = 0.0, sum = 0.0, mx = 0.0;
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = s.predictions[i] - s.labels[i];
    sq += err[i] * err[i];
    sum += err[i];
    mx = std::max(mx, std::abs(err[i]));
  }
  rmse = std::sqrt(sq / static_cast<double>(n));
  max_err = mx;
  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double e : err) var += (e - mean) * (e - mean);
  std_dev = std::sqrt(var / static_cast<double>(n));  // population form
}

}  // namespace detail

// Evaluates one subset: RDA feeds the averaged channels to a single network,
// ARA averages the per-IMU network outputs epoch by epoch.
inline detail::EpochSeries evaluate_subset(FusionMode mode, const std::vector<Network>& models,
                                           const MimuRecording& rec, const ImuSubset& subset,
                                           Target target, int window_size = 120,
                                           int stride = 120) {
  detail::EpochSeries series;
  if (mode == FusionMode::rda) {
    const ImuSequence avg = rda_average(rec, subset);
    const auto wr = make_windows(avg, rec.gt, window_size, stride);
    for (const Window& w : wr.windows) {
      series.labels.push_back(label_of(w, target));
      series.predictions.push_back(forward(models.front(), w));
    }
    return series;
  }
  // ARA: one model per member (or one shared model)
  std::vector<std::vector<double>> per_imu;
  std::size_t n_epochs = 0;
  for (int idx : subset.indices) {
    const Network& model = models.size() == 1 ? models.front() : models[idx - 1];
    const auto wr = make_windows(rec.imus[idx - 1], rec.gt, window_size, stride);
    std::vector<double> preds;
    preds.reserve(wr.windows.size());
    for (const Window& w : wr.windows) preds.push_back(forward(model, w));
    if (per_imu.empty()) {
      n_epochs = preds.size();
      const auto wr_labels = wr;  // labels shared; members are synchronized
      for (const Window& w : wr_labels.windows) series.labels.push_back(label_of(w, target));
    } else if (preds.size() != n_epochs) {
      throw std::invalid_argument("evaluate_subset: unsynchronized member sequences");
    }
    per_imu.push_back(std::move(preds));
  }
  series.predictions.resize(n_epochs);
  std::vector<double> stack(subset.indices.size());
  for (std::size_t e = 0; e < n_epochs; ++e) {
    for (std::size_t m = 0; m < per_imu.size(); ++m) stack[m] = per_imu[m][e];
    series.predictions[e] = ara_average(stack);
  }
  return series;
}

// The per-k protocol behind Tables 3-8: every subset of size k drawn from the
// nominal array {1..n_total} runs the mode's pipeline over the recording; the
// row is the arithmetic mean of each metric across subsets. Subsets needing
// IMUs (or per-IMU models) that are missing are skipped with a diagnostic.
inline CombinationRow evaluate_combinations(FusionMode mode, const std::vector<Network>& models,
                                            const MimuRecording& rec, int k, Target target,
                                            int n_total = 0, int window_size = 120,
                                            int stride = 120) {
  if (n_total <= 0) n_total = rec.n_imus();
  if (models.empty()) throw std::invalid_argument("evaluate_combinations: no models supplied");
  if (mode == FusionMode::rda && models.size() != 1)
    throw std::invalid_argument("evaluate_combinations: RDA takes exactly one model");
  if (mode == FusionMode::ara && models.size() != 1 &&
      static_cast<int>(models.size()) != n_total)
    throw std::invalid_argument("evaluate_combinations: ARA needs one model or one per IMU");

  CombinationRow row;
  row.k = k;
  double rmse_sum = 0.0, max_sum = 0.0, std_sum = 0.0;
  for (const ImuSubset& subset : enumerate_subsets(n_total, k)) {
    if (subset.indices.back() > rec.n_imus()) {
      ++row.n_skipped;
      std::string ids;
      for (int i : subset.indices) ids += (ids.empty() ? "" : ",") + std::to_string(i);
      row.diagnostics.push_back("subset {" + ids + "} skipped: recording has " +
                                std::to_string(rec.n_imus()) + " IMU(s)");
      continue;
    }
    const auto series = evaluate_subset(mode, models, rec, subset, target, window_size, stride);
    double r, m, s;
    detail::series_metrics(series, r, m, s);
    rmse_sum += r;
    max_sum += m;
    std_sum += s;
    ++row.n_subsets;
  }
  if (row.n_subsets > 0) {
    row.rmse = rmse_sum / row.n_subsets;
    row.max_error = max_sum / row.n_subsets;
    row.std_dev = std_sum / row.n_subsets;
  }
  return row;
}

}  // namespace quadnav
