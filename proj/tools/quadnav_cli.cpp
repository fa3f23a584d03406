// quadnav command-line front end: simulate synthetic corpora, run the
// strapdown and QDR baselines, train QuadNet heads, and evaluate the
// RDA/ARA fusion protocols.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quadnav/quadnav.hpp"

namespace {

std::vector<int> parse_k_range(const std::string& spec) {
  // "2" or "1-4"
  const auto dash = spec.find('-');
  std::vector<int> ks;
  if (dash == std::string::npos) {
    ks.push_back(std::stoi(spec));
  } else {
    const int lo = std::stoi(spec.substr(0, dash));
    const int hi = std::stoi(spec.substr(dash + 1));
    if (hi < lo) throw std::runtime_error("--k range is reversed: " + spec);
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
  }
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadrotor dead reckoning toolkit"};
  app.require_subcommand(1);

  // simulate
  std::string sim_spec, sim_noise = "none", sim_out;
  int sim_n_imus = 1;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic trajectory recordings");
  simulate->add_option("--spec", sim_spec, "trajectory spec config (sim.* keys)")->required();
  simulate->add_option("--n-imus", sim_n_imus, "IMUs per recording")->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sim_noise, "noise config (noise.* keys) or 'none'");
  simulate->add_option("--seed", sim_seed, "base RNG seed");
  simulate->add_option("--out-dir", sim_out, "output corpus directory")->required();

  // ins-baseline
  std::string ins_rec, ins_out;
  double ins_g = quadnav::kDefaultGravity;
  auto* ins = app.add_subcommand("ins-baseline", "pure inertial strapdown on a recording");
  ins->add_option("--recording", ins_rec, "trajectory directory")->required();
  ins->add_option("--g", ins_g, "gravity magnitude [m/s^2]");
  ins->add_option("--out", ins_out, "output directory")->required();

  // qdr-run
  std::string qdr_rec, qdr_out;
  double qdr_gain = quadnav::QdrParams{}.weinberg_gain;
  auto* qdr = app.add_subcommand("qdr-run", "model-based QDR on a recording");
  qdr->add_option("--recording", qdr_rec, "trajectory directory")->required();
  qdr->add_option("--gain", qdr_gain, "Weinberg gain K");
  qdr->add_option("--out", qdr_out, "output directory")->required();

  // train
  std::string train_split, train_target = "distance", train_config, train_out;
  auto* train = app.add_subcommand("train", "train a QuadNet regression head");
  train->add_option("--split", train_split, "split id (D1..D4, or custom via config)")->required();
  train->add_option("--target", train_target, "distance|altitude");
  train->add_option("--config", train_config, "run configuration file")->required();
  train->add_option("--out-model", train_out, "checkpoint path to write")->required();

  // evaluate
  std::string eval_mode = "rda", eval_k = "1", eval_rec, eval_out;
  std::vector<std::string> eval_models;
  auto* eval = app.add_subcommand("evaluate", "per-k RDA/ARA metrics on a recording");
  eval->add_option("--mode", eval_mode, "rda|ara");
  eval->add_option("--k", eval_k, "subset size, single value or range like 1-4");
  eval->add_option("--models", eval_models, "model checkpoint(s); ARA takes one per IMU")
      ->required()
      ->delimiter(',');
  eval->add_option("--recording", eval_rec, "trajectory directory")->required();
  eval->add_option("--out", eval_out, "output directory")->required();

  // report
  std::string report_dir, report_out;
  auto* report = app.add_subcommand("report", "aggregate eval_*.csv tables");
  report->add_option("--results-dir", report_dir, "directory tree with eval results")->required();
  report->add_option("--out", report_out, "aggregated CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      quadnav::cmd_simulate(sim_spec, sim_n_imus, sim_noise, sim_seed, sim_out);
    } else if (*ins) {
      quadnav::cmd_ins_baseline(ins_rec, ins_g, ins_out);
    } else if (*qdr) {
      quadnav::cmd_qdr_run(qdr_rec, qdr_gain, qdr_out);
    } else if (*train) {
      quadnav::cmd_train(train_split, quadnav::parse_target(train_target), train_config,
                         train_out);
    } else if (*eval) {
      quadnav::cmd_evaluate(quadnav::parse_fusion_mode(eval_mode), parse_k_range(eval_k),
                            eval_models, eval_rec, eval_out);
    } else if (*report) {
      quadnav::cmd_report(report_dir, report_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
