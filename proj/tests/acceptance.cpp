// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criteria 11-13 need the public flight dataset converted into the
// canonical corpus layout (see README) and are skipped unless --dataset is
// given.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "quadnav/quadnav.hpp"

using namespace quadnav;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& text) {
  std::printf("[%2d] %s  %s\n", id, pass ? "PASS" : "FAIL", text.c_str());
  if (!pass) ++g_failures;
}

void report_skip(int id, const std::string& text) {
  std::printf("[%2d] SKIP  %s\n", id, text.c_str());
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. gradient correctness on 20 random small networks
// ---------------------------------------------------------------------------
void criterion_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> convs(2, 3), dense(1, 2), chan(2, 5), ker(2, 5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  double worst = 0.0;
  std::size_t max_params = 0;
  for (int trial = 0; trial < 20; ++trial) {
    NetworkSpec spec;
    spec.conv_channels.clear();
    spec.conv_strides.clear();
    const int n_conv = convs(rng);
    for (int i = 0; i < n_conv; ++i) {
      spec.conv_channels.push_back(chan(rng));
      spec.conv_strides.push_back(i == 0 ? 4 : 3);
    }
    spec.kernel = ker(rng);
    spec.dense_hidden.clear();
    for (int i = 0; i < dense(rng) - 1; ++i) spec.dense_hidden.push_back(chan(rng));

    const Network net = build_network(spec, 4000 + trial);
    max_params = std::max(max_params, net.parameter_count());
    std::vector<Window> batch;
    std::vector<double> y;
    for (int i = 0; i < 4; ++i) {
      Window w;
      w.x.resize(120, 6);
      for (int r = 0; r < 120; ++r)
        for (int c = 0; c < 6; ++c) w.x(r, c) = u(rng);
      batch.push_back(std::move(w));
      y.push_back(u(rng));
    }
    worst = std::max(worst, grad_check(net, batch, y));
  }
  const double elapsed = seconds_since(t0);
  report(1, worst < 1e-5 && elapsed < 60.0 && max_params <= 2000,
         fmt("gradient correctness: max rel err %.2e over 20 nets (max %zu params, %.1f s)",
             worst, max_params, elapsed));
}

// ---------------------------------------------------------------------------
// 2. mechanization round trip for the three trajectory kinds
// ---------------------------------------------------------------------------
void criterion_round_trip() {
  double worst = 0.0;
  std::string detail;
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
    const ImuSequence seq = trajectory_to_imu(traj, 120.0);

    NavState init;
    init.p = traj.position(0.0);
    init.v = traj.velocity(0.0);
    init.att = Attitude::level_with_yaw(traj.path_yaw(0.0));
    const TrajectorySolution sol = ins_run(seq, init);
    double max_err = 0.0;
    for (const auto& pt : sol.points)
      max_err = std::max(max_err, (pt.p - traj.position(pt.t)).norm());
    worst = std::max(worst, max_err);
    detail += fmt("%s %.1e m  ", to_string(kind).c_str(), max_err);
  }
  report(2, worst < 0.01, "mechanization round trip (60 s, 120 Hz): " + detail);
}

// ---------------------------------------------------------------------------
// 3. bias drift closed form
// ---------------------------------------------------------------------------
void criterion_bias_drift() {
  ImuSequence seq;
  seq.rate_hz = 120.0;
  for (int k = 0; k < 1200; ++k)
    seq.samples.push_back({k / 120.0, Vec3(0, 0, -kDefaultGravity + 0.01), Vec3::Zero()});
  NavState init;
  const TrajectorySolution sol = ins_run(seq, init);
  const double drift = sol.points.back().p.norm();
  const double want = 0.5 * 0.01 * 100.0;
  report(3, std::abs(drift - want) <= 0.01 * want,
         fmt("bias drift 0.01 m/s^2 over 10 s: |p| = %.4f m (want %.1f +- 1%%)", drift, want));
}

// ---------------------------------------------------------------------------
// 4. RDA identity and ARA identity
// ---------------------------------------------------------------------------
void criterion_rda_identity() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ImuSequence seq;
  seq.rate_hz = 120.0;
  for (int k = 0; k < 600; ++k)
    seq.samples.push_back({k / 120.0, Vec3(u(rng), u(rng), -9.794 + u(rng)),
                           Vec3(0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng))});
  MimuRecording rec;
  rec.id = "dup";
  for (int i = 0; i < 3; ++i) rec.imus.push_back(seq);
  for (int k = 0; k <= 50; ++k) rec.gt.points.push_back({k * 0.1, Vec3(k * 0.4, 0, 0)});

  const ImuSequence avg = rda_average(rec, ImuSubset{{1, 2, 3}});
  bool bit_equal = avg.size() == seq.size();
  for (std::size_t k = 0; bit_equal && k < seq.size(); ++k)
    bit_equal = avg.samples[k].f == seq.samples[k].f && avg.samples[k].w == seq.samples[k].w;

  const double p = 1.2345678901234;
  const bool ara_ok = ara_average(std::vector<double>{p, p, p, p}) == p;
  report(4, bit_equal && ara_ok,
         fmt("RDA identity bit-equal on duplicated streams: %s; ARA of equal predictions: %s",
             bit_equal ? "yes" : "no", ara_ok ? "exact" : "off"));
}

// ---------------------------------------------------------------------------
// 5. noise averaging: variance sigma^2/4 over 1e5 samples
// ---------------------------------------------------------------------------
void criterion_noise_averaging() {
  const double sigma = 0.05;
  const int n_samples = 100000;
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::straight;
  spec.speed = 4.0;
  spec.duration = n_samples / 120.0;
  const SpecTrajectory traj(spec);
  std::vector<ImuErrorModel> models(4);
  for (int i = 0; i < 4; ++i) {
    models[i].accel_sigma = sigma;
    models[i].seed = 7000 + i;
  }
  const MimuRecording rec = gen_mimu(traj, 4, models, 120.0);
  const ImuSequence avg = rda_average(rec, ImuSubset{{1, 2, 3, 4}});

  // straight-line ideal f is constant, so all variance comes from the noise
  double mean = 0.0;
  const std::size_t n = avg.size();
  for (const auto& s : avg.samples) mean += s.f.y();
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& s : avg.samples) var += (s.f.y() - mean) * (s.f.y() - mean);
  var /= static_cast<double>(n);

  const double want = sigma * sigma / 4.0;
  report(5, std::abs(var - want) <= 0.10 * want,
         fmt("noise averaging: channel variance %.3e vs sigma^2/4 = %.3e (%.1f%% off)", var, want,
             100.0 * std::abs(var - want) / want));
}

// ---------------------------------------------------------------------------
// 6. ARA/RDA commute for linear networks
// ---------------------------------------------------------------------------
void criterion_linear_commutation() {
  double worst = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    NetworkSpec spec;
    spec.conv_channels = {8, 8, 8, 8, 8, 8, 8};
    spec.conv_strides = {2, 1, 2, 1, 1, 1, 1};
    spec.dense_hidden = {32, 16};
    Network net = build_network(spec, 600 + seed);
    net.linear_activations = true;
    for (auto& c : net.conv) std::fill(c.b.begin(), c.b.end(), 0.0);
    for (auto& d : net.dense) std::fill(d.b.begin(), d.b.end(), 0.0);

    std::mt19937_64 rng(880 + seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MimuRecording rec;
    rec.id = "lin";
    for (int i = 0; i < 3; ++i) {
      ImuSequence seq;
      seq.rate_hz = 120.0;
      for (int k = 0; k < 360; ++k)
        seq.samples.push_back({k / 120.0, Vec3(u(rng), u(rng), u(rng)),
                               Vec3(u(rng), u(rng), u(rng))});
      rec.imus.push_back(std::move(seq));
    }
    for (int k = 0; k <= 30; ++k) rec.gt.points.push_back({k * 0.1, Vec3(k * 0.4, 0, 0)});

    const ImuSubset subset{{1, 2, 3}};
    const auto rda = evaluate_subset(FusionMode::rda, {net}, rec, subset, Target::distance);
    const auto ara = evaluate_subset(FusionMode::ara, {net}, rec, subset, Target::distance);
    for (std::size_t e = 0; e < rda.predictions.size(); ++e)
      worst = std::max(worst, std::abs(rda.predictions[e] - ara.predictions[e]));
  }
  report(6, worst < 1e-9, fmt("linear ARA/RDA commutation: max |ARA - RDA| = %.2e", worst));
}

// ---------------------------------------------------------------------------
// 7. subset protocol
// ---------------------------------------------------------------------------
void criterion_subsets() {
  const auto subsets = enumerate_subsets(4, 2);
  const std::vector<std::vector<int>> want{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  bool ok = subsets.size() == 6;
  for (std::size_t i = 0; ok && i < 6; ++i) ok = subsets[i].indices == want[i];
  report(7, ok, "enumerate_subsets(4,2) = {1,2},{1,3},{1,4},{2,3},{2,4},{3,4}");
}

// ---------------------------------------------------------------------------
// 8. overfit sanity with bit-identical rerun
// ---------------------------------------------------------------------------
void criterion_overfit() {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::horizontal_periodic;
  spec.duration = 8.0;
  spec.amplitude = 1.0;
  spec.period = 2.0;
  const SpecTrajectory traj(spec);
  ImuErrorModel noise;
  noise.accel_sigma = 0.05;
  noise.gyro_sigma = 0.002;
  noise.seed = 31;
  const MimuRecording rec = gen_mimu(traj, 1, {noise}, 120.0);
  const auto wr = make_windows(rec.imus[0], rec.gt);
  const std::vector<Window> windows(wr.windows.begin(), wr.windows.begin() + 8);

  NetworkSpec arch;
  arch.conv_channels = {8, 8, 8, 8, 8, 8, 8};
  arch.conv_strides = {2, 1, 2, 1, 1, 1, 1};
  arch.dense_hidden = {32, 16};
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.epochs = 500;
  cfg.batch_size = 8;
  cfg.seed = 17;
  const Network net = make_quadnet(arch, cfg.seed);
  const TrainResult a = train(net, windows, Target::distance, cfg);
  const TrainResult b = train(net, windows, Target::distance, cfg);

  bool identical = a.loss_history == b.loss_history;
  for (std::size_t i = 0; identical && i < a.net.dense.size(); ++i)
    identical = a.net.dense[i].W == b.net.dense[i].W;
  report(8, a.loss_history.back() < 1e-3 && identical,
         fmt("overfit 8 windows: final loss %.2e after %d epochs, rerun bit-identical: %s",
             a.loss_history.back(), cfg.epochs, identical ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// 9. end-to-end synthetic superiority over the strapdown baseline
// ---------------------------------------------------------------------------
void criterion_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const double accel_sigma = 0.05, gyro_sigma = 0.002;

  auto make_spec = [](double heading, double duration) {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::horizontal_periodic;
    spec.speed = 4.0;
    spec.duration = duration;
    spec.amplitude = 1.0;
    spec.period = 4.0;
    spec.heading = heading;
    return spec;
  };

  // 20 training trajectories, 30 s each
  std::vector<Window> train_windows;
  for (int j = 0; j < 20; ++j) {
    const SpecTrajectory traj(make_spec(0.15 * j, 30.0));
    ImuErrorModel noise;
    noise.accel_sigma = accel_sigma;
    noise.gyro_sigma = gyro_sigma;
    noise.seed = 5000 + j;
    const MimuRecording rec = gen_mimu(traj, 1, {noise}, 120.0, kDefaultGravity,
                                       "train-" + std::to_string(j));
    const auto wr = make_windows(rec.imus[0], rec.gt);
    for (const auto& w : wr.windows) train_windows.push_back(w);
  }

  NetworkSpec arch;
  arch.conv_channels = {8, 8, 8, 8, 8, 8, 8};
  arch.conv_strides = {2, 1, 2, 1, 1, 1, 1};
  arch.dense_hidden = {32, 16};
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 64;
  cfg.epochs = 200;
  cfg.seed = 23;
  const TrainResult dist = train(make_quadnet(arch, cfg.seed), train_windows, Target::distance, cfg);
  TrainConfig cfg_alt = cfg;
  cfg_alt.seed = 29;
  const TrainResult alt =
      train(make_quadnet(arch, cfg_alt.seed), train_windows, Target::altitude, cfg_alt);

  // 2 held-out test trajectories, 120 s each
  double ins_rmse_sum = 0.0, net_rmse_sum = 0.0;
  std::string detail;
  for (int j = 0; j < 2; ++j) {
    const SpecTrajectory traj(make_spec(0.3 + 0.8 * j, 120.0));
    ImuErrorModel noise;
    noise.accel_sigma = accel_sigma;
    noise.gyro_sigma = gyro_sigma;
    noise.seed = 9000 + j;
    const MimuRecording rec = gen_mimu(traj, 1, {noise}, 120.0, kDefaultGravity,
                                       "test-" + std::to_string(j));
    const ImuSequence& seq = rec.imus[0];

    const NavState init = init_from_gt(rec.gt, seq.t_begin());
    const EvalReport ins_report = compute_metrics(rec.gt, ins_run(seq, init));

    const auto qn = quadnet_reconstruct(seq, rec.gt, dist.net, alt.net, init.p,
                                        quat_to_euler(init.att).yaw);
    const EvalReport net_report = compute_metrics(rec.gt, qn.track);

    ins_rmse_sum += ins_report.rmse_m;
    net_rmse_sum += net_report.rmse_m;
    detail += fmt("traj%d ins %.1f m vs quadnet %.2f m  ", j, ins_report.rmse_m,
                  net_report.rmse_m);
  }
  const double ratio = net_rmse_sum / ins_rmse_sum;
  report(9, ratio < 0.10,
         fmt("end-to-end: %sratio %.3f (< 0.10 required, train loss %.2e, %.0f s)",
             detail.c_str(), ratio, dist.loss_history.back(), seconds_since(t0)));
}

// ---------------------------------------------------------------------------
// 10. metric cross-checks against the published tables
// ---------------------------------------------------------------------------
void criterion_metric_crosschecks() {
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) {
      a.push_back(u(rng));
      b.push_back(u(rng));
    }
    const double r = rmse(a, b);
    worst = std::max(worst, std::abs(r * r - mse_loss(a, b)));
  }

  const double mean1 = (384.0 + 221.0 + 210.0 + 88.0) / 4.0;
  const double mean2 = (266.0 + 195.0 + 179.0 + 76.0) / 4.0;
  const bool means_ok = std::round(mean1) == 226.0 && std::round(mean2) == 179.0;
  const double improvement = (std::round(mean1) - std::round(mean2)) / std::round(mean1);
  const bool ratio_ok = std::abs(improvement * 100.0 - 20.8) < 0.1;
  report(10, worst < 1e-12 && means_ok && ratio_ok,
         fmt("metric cross-checks: |rmse^2 - mse| %.1e; straight-line means %d / %d; "
             "four-IMU improvement %.1f%%",
             worst, static_cast<int>(std::round(mean1)), static_cast<int>(std::round(mean2)),
             improvement * 100.0));
}

// ---------------------------------------------------------------------------
// 11-13. dataset-dependent directional checks
// ---------------------------------------------------------------------------

std::vector<MimuRecording> load_kind_corpus(const std::string& dataset_dir,
                                            const std::string& sub) {
  return load_corpus(dataset_dir + "/" + sub);
}

void criterion_baseline_drift(const std::string& dataset_dir) {
  const auto corpus = load_kind_corpus(dataset_dir, "straight");
  double sum = 0.0;
  int count = 0;
  for (const auto& rec : corpus) {
    const ImuSequence& seq = rec.imus.front();
    const NavState init = init_from_gt(rec.gt, seq.t_begin());
    sum += compute_metrics(rec.gt, ins_run(seq, init)).rmse_m;
    ++count;
  }
  const double mean = sum / count;
  report(11, mean >= 50.0 && mean <= 1000.0,
         fmt("baseline drift: mean strapdown RMSE %.0f m over %d straight recordings "
             "(want 50..1000)",
             mean, count));
}

struct TrainedHeads {
  Network distance;
};

TrainedHeads train_on_split(const std::string& dataset_dir, const std::string& split_name) {
  const std::string sub =
      (split_name == "D1" || split_name == "D3") ? "horizontal" : "vertical";
  const auto corpus = load_kind_corpus(dataset_dir, sub);
  SplitSpec spec = SplitSpec::standard(split_name);
  const SplitResult split = build_split(spec, corpus);

  NetworkSpec arch;
  arch.conv_channels = {8, 8, 8, 8, 8, 8, 8};
  arch.conv_strides = {2, 1, 2, 1, 1, 1, 1};
  arch.dense_hidden = {32, 16};
  TrainConfig cfg;
  cfg.epochs = 150;
  cfg.batch_size = 64;
  cfg.seed = 41;
  TrainedHeads heads{train(make_quadnet(arch, cfg.seed), split.train, Target::distance, cfg).net};
  return heads;
}

MimuRecording find_test_recording(const std::string& dataset_dir, const std::string& split_name) {
  const std::string sub =
      (split_name == "D1" || split_name == "D3") ? "horizontal" : "vertical";
  const auto corpus = load_kind_corpus(dataset_dir, sub);
  const SplitSpec spec = SplitSpec::standard(split_name);
  for (const auto& rec : corpus)
    if (rec.id == spec.test_trajectory) return rec;
  throw std::runtime_error("dataset: test trajectory for " + split_name + " not found");
}

void criterion_mimu_trend(const std::string& dataset_dir) {
  bool ok = true;
  std::string detail;
  for (const std::string split : {"D1", "D2"}) {
    const TrainedHeads heads = train_on_split(dataset_dir, split);
    const MimuRecording rec = find_test_recording(dataset_dir, split);
    const CombinationRow k1 =
        evaluate_combinations(FusionMode::rda, {heads.distance}, rec, 1, Target::distance, 4);
    const CombinationRow k4 =
        evaluate_combinations(FusionMode::rda, {heads.distance}, rec, 4, Target::distance, 4);
    ok = ok && k4.n_subsets > 0 && k4.rmse <= k1.rmse;
    detail += fmt("%s k1 %.2f m k4 %.2f m  ", split.c_str(), k1.rmse, k4.rmse);
  }
  report(12, ok, "MIMU monotonic trend (RDA): " + detail);
}

void criterion_training_set_effect(const std::string& dataset_dir) {
  const TrainedHeads d1 = train_on_split(dataset_dir, "D1");
  const TrainedHeads d3 = train_on_split(dataset_dir, "D3");
  const MimuRecording rec = find_test_recording(dataset_dir, "D1");
  const CombinationRow r1 =
      evaluate_combinations(FusionMode::rda, {d1.distance}, rec, 1, Target::distance, 4);
  const CombinationRow r3 =
      evaluate_combinations(FusionMode::rda, {d3.distance}, rec, 1, Target::distance, 4);
  report(13, r3.rmse <= r1.rmse,
         fmt("training-set effect: D3-trained k=1 RMSE %.2f m <= D1-trained %.2f m", r3.rmse,
             r1.rmse));
}

}  // namespace

int main(int argc, char** argv) {
  std::string dataset_dir;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--dataset") == 0 && i + 1 < argc) dataset_dir = argv[++i];
  }

  criterion_gradients();
  criterion_round_trip();
  criterion_bias_drift();
  criterion_rda_identity();
  criterion_noise_averaging();
  criterion_linear_commutation();
  criterion_subsets();
  criterion_overfit();
  criterion_end_to_end();
  criterion_metric_crosschecks();

  if (dataset_dir.empty()) {
    report_skip(11, "baseline drift magnitude: dataset not provided (--dataset DIR)");
    report_skip(12, "MIMU monotonic trend: dataset not provided (--dataset DIR)");
    report_skip(13, "training-set effect: dataset not provided (--dataset DIR)");
  } else {
    try {
      criterion_baseline_drift(dataset_dir);
      criterion_mimu_trend(dataset_dir);
      criterion_training_set_effect(dataset_dir);
    } catch (const std::exception& e) {
      report(11, false, std::string("dataset criteria aborted: ") + e.what());
    }
  }

  if (g_failures == 0) std::printf("all criteria passed\n");
  else std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
