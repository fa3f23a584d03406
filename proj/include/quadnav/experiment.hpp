#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/checkpoint.hpp"
#include "quadnav/config.hpp"
#include "quadnav/csvio.hpp"
#include "quadnav/data.hpp"
#include "quadnav/fusion.hpp"
#include "quadnav/metrics.hpp"
#include "quadnav/qdr.hpp"
#include "quadnav/strapdown.hpp"
#include "quadnav/synth.hpp"
#include "quadnav/train.hpp"
#include "quadnav/types.hpp"
#include "quadnav/windowing.hpp"

namespace quadnav {

// ---------------------------------------------------------------------------
// Run configuration. Every key is listed here; unknown keys abort before any
// compute starts. Defaults are documented in the README.
// ---------------------------------------------------------------------------

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      // data ingestion
      "data.dir", "gt.format", "imu.units.accel", "imu.units.gyro",
      // windowing
      "window.size", "window.stride",
      // architecture
      "arch.conv_channels", "arch.conv_strides", "arch.kernel", "arch.dense_hidden",
      // training
      "train.learning_rate", "train.batch_size", "train.epochs", "train.seed",
      "train.optimizer", "train.adam.beta1", "train.adam.beta2", "train.adam.eps",
      "train.shuffle",
      // custom split override
      "split.axis", "split.test_trajectory", "split.train_imus",
      // model-based QDR
      "qdr.gain", "qdr.min_separation", "qdr.smoothing_halfwidth", "qdr.prominence",
      // strapdown
      "ins.g",
      // simulation (used by the simulate subcommand's --spec file)
      "sim.kind", "sim.speed", "sim.duration", "sim.amplitude", "sim.period",
      "sim.heading", "sim.count", "sim.id_prefix", "sim.rate",
      // noise model (simulate's --noise file)
      "noise.accel_sigma", "noise.gyro_sigma", "noise.accel_bias", "noise.gyro_bias",
  };
  return keys;
}

inline KvConfig load_run_config(const std::string& path) {
  KvConfig cfg = KvConfig::parse_file(path);
  cfg.require_known_keys(known_config_keys(), {"imu.col."});
  return cfg;
}

inline NetworkSpec arch_from_config(const KvConfig& cfg) {
  NetworkSpec spec;
  spec.conv_channels = cfg.get_int_list_or("arch.conv_channels", spec.conv_channels);
  spec.conv_strides = cfg.get_int_list_or("arch.conv_strides", spec.conv_strides);
  spec.kernel = static_cast<int>(cfg.get_int_or("arch.kernel", spec.kernel));
  spec.dense_hidden = cfg.get_int_list_or("arch.dense_hidden", spec.dense_hidden);
  return spec;
}

inline TrainConfig train_config_from_config(const KvConfig& cfg) {
  TrainConfig tc;
  tc.learning_rate = cfg.get_double_or("train.learning_rate", tc.learning_rate);
  tc.batch_size = static_cast<int>(cfg.get_int_or("train.batch_size", tc.batch_size));
  tc.epochs = static_cast<int>(cfg.get_int_or("train.epochs", tc.epochs));
  tc.seed = static_cast<std::uint64_t>(cfg.get_int_or("train.seed", 1));
  const std::string opt = cfg.get_or("train.optimizer", "adam");
  if (opt == "adam") tc.optimizer = TrainConfig::Optimizer::adam;
  else if (opt == "sgd") tc.optimizer = TrainConfig::Optimizer::sgd;
  else throw std::runtime_error("config: train.optimizer must be adam or sgd, got '" + opt + "'");
  tc.adam.beta1 = cfg.get_double_or("train.adam.beta1", tc.adam.beta1);
  tc.adam.beta2 = cfg.get_double_or("train.adam.beta2", tc.adam.beta2);
  tc.adam.eps = cfg.get_double_or("train.adam.eps", tc.adam.eps);
  tc.shuffle = cfg.get_bool_or("train.shuffle", tc.shuffle);
  return tc;
}

inline SplitSpec split_from_config(const KvConfig& cfg, const std::string& split_name) {
  if (cfg.has("split.axis") || cfg.has("split.test_trajectory")) {
    SplitSpec spec;
    spec.id = split_name;
    spec.axis = parse_trajectory_kind(cfg.get("split.axis"));
    spec.test_trajectory = cfg.get("split.test_trajectory");
    spec.train_imus = cfg.get_int_list_or("split.train_imus", {});
    return spec;
  }
  return SplitSpec::standard(split_name);
}

// ---------------------------------------------------------------------------
// QuadNet trajectory pipeline (Fig. 3): regressed per-epoch distance and
// altitude increments plus gyro-integrated heading, chained through the
// equations of motion into a 3-D track.
// ---------------------------------------------------------------------------

struct QuadnetRunResult {
  TrajectorySolution track;
  int clamped = 0;
  std::vector<double> epoch_t;   // epoch start times
  std::vector<double> pred_d, label_d;
  std::vector<double> pred_dh, label_dh;
};

// Heading per epoch is the circular mean of the per-sample gyro-integrated
// yaw across the window; it tracks the chord direction of a curving path far
// better than any single-sample value.
inline QuadnetRunResult quadnet_reconstruct(const ImuSequence& seq, const GroundTruthTrack& gt,
                                            const Network& net_distance,
                                            const Network& net_altitude, const Vec3& init_pos,
                                            double init_yaw, int window_size = 120,
                                            int stride = 120) {
  const auto wr = make_windows(seq, gt, window_size, stride);
  if (wr.windows.empty()) throw std::runtime_error("quadnet_reconstruct: no usable windows");

  const std::vector<double> yaw_series = estimate_heading(seq, init_yaw);
  QuadnetRunResult res;
  std::vector<double> d, dh, yaw;
  double expected_start = wr.windows.front().t_start;
  for (std::size_t k = 0; k < wr.windows.size(); ++k) {
    const Window& w = wr.windows[k];
    if (std::abs(w.t_start - expected_start) > 1e-6) break;  // contiguity lost (GT gap)
    expected_start = w.t_start + static_cast<double>(stride) / seq.rate_hz;

    // sample index of this window's start
    const std::size_t i0 = static_cast<std::size_t>(k) * stride;
    double sin_sum = 0.0, cos_sum = 0.0;
    for (int r = 0; r < window_size; ++r) {
      sin_sum += std::sin(yaw_series[i0 + r]);
      cos_sum += std::cos(yaw_series[i0 + r]);
    }
    yaw.push_back(std::atan2(sin_sum, cos_sum));
    d.push_back(forward(net_distance, w));
    dh.push_back(forward(net_altitude, w));
    res.epoch_t.push_back(w.t_start);
    res.label_d.push_back(w.label_distance);
    res.label_dh.push_back(w.label_altitude);
  }
  res.pred_d = d;
  res.pred_dh = dh;

  auto rec = reconstruct(d, dh, yaw, init_pos, wr.windows.front().t_start,
                         static_cast<double>(window_size) / seq.rate_hz);
  res.track = std::move(rec.track);
  res.track.source = TrajectorySolution::Source::quadnet;
  res.clamped = rec.clamped;
  return res;
}

// ---------------------------------------------------------------------------
// Subcommand implementations (shared between the CLI binary and the tests)
// ---------------------------------------------------------------------------

namespace detail {

inline void write_solution_csv(const std::string& path, const TrajectorySolution& sol) {
  CsvWriter w(path);
  w.header({"t", "n", "e", "d"});
  for (const auto& p : sol.points) w.row({p.t, p.p.x(), p.p.y(), p.p.z()});
}

inline void write_metrics_csv(const std::string& path, const EvalReport& r,
                              const std::vector<std::pair<std::string, double>>& extra = {}) {
  std::vector<std::string> header = {"rmse_m",    "max_error_m",    "std_m",
                                     "rmse_2d_m", "max_error_2d_m", "std_2d_m",
                                     "trajectory_length_m"};
  std::vector<double> row = {r.rmse_m,    r.max_error_m,    r.std_m,
                             r.rmse_2d_m, r.max_error_2d_m, r.std_2d_m,
                             r.trajectory_length_m};
  for (const auto& [k, v] : extra) {
    header.push_back(k);
    row.push_back(v);
  }
  CsvWriter w(path);
  w.header(header);
  w.row(row);
}

}  // namespace detail

// simulate: writes `sim.count` trajectory directories in the canonical CSV
// layout so synthetic corpora flow through the same ingestion path as real
// recordings.
inline void cmd_simulate(const std::string& spec_path, int n_imus, const std::string& noise_path,
                         std::uint64_t seed, const std::string& out_dir) {
  const KvConfig sim = load_run_config(spec_path);
  TrajectorySpec spec;
  spec.kind = parse_trajectory_kind(sim.get_or("sim.kind", "horizontal-periodic"));
  spec.speed = sim.get_double_or("sim.speed", spec.speed);
  spec.duration = sim.get_double_or("sim.duration", spec.duration);
  spec.amplitude = sim.get_double_or("sim.amplitude", spec.amplitude);
  spec.period = sim.get_double_or("sim.period", spec.period);
  spec.heading = sim.get_double_or("sim.heading", spec.heading);
  const int count = static_cast<int>(sim.get_int_or("sim.count", 1));
  const std::string prefix = sim.get_or("sim.id_prefix", to_string(spec.kind) + "-");
  const double rate = sim.get_double_or("sim.rate", 120.0);

  ImuErrorModel base;
  if (!noise_path.empty() && noise_path != "none") {
    const KvConfig noise = load_run_config(noise_path);
    base.accel_sigma = noise.get_double_or("noise.accel_sigma", 0.0);
    base.gyro_sigma = noise.get_double_or("noise.gyro_sigma", 0.0);
    const auto bias3 = [](const KvConfig& c, const std::string& key) {
      if (!c.has(key)) return Vec3{0.0, 0.0, 0.0};
      std::istringstream ss(c.get(key));
      std::string tok;
      std::vector<double> v;
      while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
      if (v.size() != 3) throw std::runtime_error("config: " + key + " needs 3 comma-separated values");
      return Vec3{v[0], v[1], v[2]};
    };
    base.accel_bias = bias3(noise, "noise.accel_bias");
    base.gyro_bias = bias3(noise, "noise.gyro_bias");
  }

  for (int j = 0; j < count; ++j) {
    const std::string id = prefix + std::to_string(j + 1);
    SpecTrajectory traj(spec);
    std::vector<ImuErrorModel> models;
    for (int i = 0; i < n_imus; ++i) {
      ImuErrorModel m = base;
      m.seed = seed + static_cast<std::uint64_t>(j) * n_imus + i;
      models.push_back(m);
    }
    const MimuRecording rec = gen_mimu(traj, n_imus, models, rate, kDefaultGravity, id);
    save_recording(out_dir + "/" + id, rec);
  }
  std::cout << "simulate: wrote " << count << " trajectory(ies) under " << out_dir << "\n";
}

// ins-baseline: pure inertial strapdown on IMU #1, initialized from GT.
inline EvalReport cmd_ins_baseline(const std::string& recording_dir, double g,
                                   const std::string& out_dir) {
  const MimuRecording rec = load_recording_dir(recording_dir).recording;
  const ImuSequence& seq = rec.imus.front();
  NavState init = init_from_gt(rec.gt, seq.t_begin());
  const TrajectorySolution sol = ins_run(seq, init, g);
  const EvalReport report = compute_metrics(rec.gt, sol);

  std::filesystem::create_directories(out_dir);
  detail::write_solution_csv(out_dir + "/ins_track.csv", sol);
  detail::write_metrics_csv(out_dir + "/ins_metrics.csv", report);
  std::cout << "ins-baseline: " << rec.id << " rmse " << format_double(report.rmse_m)
            << " m over " << format_double(report.trajectory_length_m) << " m\n";
  return report;
}

// qdr-run: model-based peaks + Weinberg + heading pipeline on IMU #1.
inline EvalReport cmd_qdr_run(const std::string& recording_dir, double gain,
                              const std::string& out_dir, const QdrParams& base = {}) {
  const MimuRecording rec = load_recording_dir(recording_dir).recording;
  const ImuSequence& seq = rec.imus.front();
  QdrParams params = base;
  params.weinberg_gain = gain;

  const NavState init = init_from_gt(rec.gt, seq.t_begin());
  const double init_yaw = quat_to_euler(init.att).yaw;

  // anchor the track at the GT position of the first peak
  const PeakSet peaks = detect_peaks(seq, params);
  std::pair<double, double> init_pos{0.0, 0.0};
  if (peaks.count() >= 1) {
    const Vec3 p0 = rec.gt.interpolate(seq.samples[peaks.indices[0]].t);
    init_pos = {p0.x(), p0.y()};
  }
  const QdrResult res = qdr_run(seq, params, init_pos, init_yaw);

  std::filesystem::create_directories(out_dir);
  if (!res.diagnostic.empty()) {
    std::ofstream diag(out_dir + "/qdr_diagnostic.txt");
    diag << res.diagnostic << "\n";
    std::cout << "qdr-run: " << rec.id << ": " << res.diagnostic << "\n";
    return EvalReport{};
  }
  detail::write_solution_csv(out_dir + "/qdr_track.csv", res.track);
  double path = 0.0;
  for (double d : res.segment_distances) path += d;
  const EvalReport report = compute_metrics(rec.gt, res.track);
  detail::write_metrics_csv(out_dir + "/qdr_metrics.csv", report,
                            {{"n_peaks", static_cast<double>(res.peaks.count())},
                             {"qdr_path_length_m", path}});
  std::cout << "qdr-run: " << rec.id << " horizontal rmse " << format_double(report.rmse_2d_m)
            << " m, " << res.peaks.count() << " peaks\n";
  return report;
}

// train: builds the split from the corpus, trains one QuadNet head, and
// writes the checkpoint plus its loss history.
inline std::vector<double> cmd_train(const std::string& split_name, Target target,
                                     const std::string& config_path,
                                     const std::string& out_model) {
  const KvConfig cfg = load_run_config(config_path);
  const std::string corpus_dir = cfg.get("data.dir");
  const ColumnMap colmap = ColumnMap::from_config(cfg);
  const std::vector<MimuRecording> corpus = load_corpus(corpus_dir, colmap);

  const SplitSpec split = split_from_config(cfg, split_name);
  const int window_size = static_cast<int>(cfg.get_int_or("window.size", 120));
  const int stride = static_cast<int>(cfg.get_int_or("window.stride", 120));
  const SplitResult data = build_split(split, corpus, window_size, stride);
  if (data.train.empty()) throw std::runtime_error("train: split produced no training windows");

  const NetworkSpec arch = arch_from_config(cfg);
  const TrainConfig tc = train_config_from_config(cfg);
  Network net = make_quadnet(arch, tc.seed);
  TrainResult result = train(std::move(net), data.train, target, tc);

  std::map<std::string, std::string> meta{
      {"split", split.id},
      {"target", to_string(target)},
      {"seed", std::to_string(tc.seed)},
      {"epochs", std::to_string(tc.epochs)},
      {"train_windows", std::to_string(data.train.size())},
      {"final_loss", format_double(result.loss_history.back())},
  };
  save_model(out_model, result.net, meta);
  {
    CsvWriter w(out_model + ".loss.csv");
    w.header({"epoch", "mean_loss"});
    for (std::size_t e = 0; e < result.loss_history.size(); ++e)
      w.row({static_cast<double>(e + 1), result.loss_history[e]});
  }

  // held-out sanity number, reported but not asserted here
  std::vector<double> y, yhat;
  for (const Window& w : data.test) {
    y.push_back(label_of(w, target));
    yhat.push_back(forward(result.net, w));
  }
  const double test_rmse = y.empty() ? 0.0 : rmse(y, yhat);
  std::cout << "train: " << split.id << "/" << to_string(target) << " windows "
            << data.train.size() << " final-loss " << format_double(result.loss_history.back())
            << " test-rmse " << format_double(test_rmse) << " m\n";
  return result.loss_history;
}

// evaluate: Tables 3-8 style per-k rows plus the per-epoch trace (Fig. 7
// analog) computed with the full IMU set.
inline std::vector<CombinationRow> cmd_evaluate(FusionMode mode, const std::vector<int>& ks,
                                                const std::vector<std::string>& model_paths,
                                                const std::string& recording_dir,
                                                const std::string& out_dir) {
  if (model_paths.empty()) throw std::runtime_error("evaluate: no models given");
  std::vector<Network> models;
  Target target = Target::distance;
  for (std::size_t i = 0; i < model_paths.size(); ++i) {
    Checkpoint ck = load_model(model_paths[i]);
    const std::string t = ck.meta.count("target") ? ck.meta["target"] : "distance";
    if (i == 0) target = parse_target(t);
    else if (parse_target(t) != target)
      throw std::runtime_error("evaluate: models disagree on regression target");
    models.push_back(std::move(ck.net));
  }

  const MimuRecording rec = load_recording_dir(recording_dir).recording;
  std::filesystem::create_directories(out_dir);

  const std::string tag = to_string(mode) + "_" + to_string(target);
  std::vector<CombinationRow> rows;
  {
    CsvWriter w(out_dir + "/eval_" + tag + ".csv");
    w.header({"k", "n_subsets", "rmse_m", "max_m", "std_m"});
    for (int k : ks) {
      CombinationRow row = evaluate_combinations(mode, models, rec, k, target);
      for (const auto& d : row.diagnostics) std::cerr << "evaluate: " << d << "\n";
      w.line({std::to_string(row.k), std::to_string(row.n_subsets), format_double(row.rmse),
              format_double(row.max_error), format_double(row.std_dev)});
      rows.push_back(std::move(row));
    }
  }
  {
    // full-set per-epoch trace
    std::vector<int> all(rec.n_imus());
    for (int i = 0; i < rec.n_imus(); ++i) all[i] = i + 1;
    const auto series = evaluate_subset(mode, models, rec, ImuSubset{all}, target);
    CsvWriter w(out_dir + "/trace_" + tag + ".csv");
    w.header({"epoch", "gt_m", "pred_m"});
    for (std::size_t e = 0; e < series.labels.size(); ++e)
      w.row({static_cast<double>(e + 1), series.labels[e], series.predictions[e]});
  }
  std::cout << "evaluate: " << tag << " on " << rec.id << ", " << rows.size() << " row(s)\n";
  return rows;
}

// report: merges every eval_*.csv under a results tree into one table.
inline int cmd_report(const std::string& results_dir, const std::string& out_path) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(results_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("eval_", 0) == 0 &&
        entry.path().extension() == ".csv")
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());

  CsvWriter w(out_path);
  w.header({"source", "k", "n_subsets", "rmse_m", "max_m", "std_m"});
  int rows = 0;
  for (const auto& f : files) {
    const CsvTable t = read_csv(f);
    const std::string rel = fs::relative(f, results_dir).string();
    for (const auto& r : t.rows) {
      std::vector<std::string> line{rel};
      line.insert(line.end(), r.begin(), r.end());
      w.line(line);
      ++rows;
    }
  }
  std::cout << "report: " << rows << " row(s) from " << files.size() << " file(s) -> "
            << out_path << "\n";
  return rows;
}

}  // namespace quadnav
