#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/network.hpp"
#include "quadnav/types.hpp"

namespace quadnav {

enum class Target { distance, altitude };

inline std::string to_string(Target t) {
  return t == Target::distance ? "distance" : "altitude";
}

inline Target parse_target(const std::string& s) {
  if (s == "distance") return Target::distance;
  if (s == "altitude") return Target::altitude;
  throw std::invalid_argument("unknown regression target '" + s + "'");
}

inline double label_of(const Window& w, Target t) {
  return t == Target::distance ? w.label_distance : w.label_altitude;
}

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 300;
  std::uint64_t seed = 1;
  enum class Optimizer { sgd, adam } optimizer = Optimizer::adam;
  AdamParams adam;
  bool shuffle = true;
};

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw std::invalid_argument("TrainConfig: bad learning rate");
  if (cfg.batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (cfg.epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
}

struct TrainResult {
  Network net;
  std::vector<double> loss_history;  // per-epoch mean training loss
};

namespace detail {

struct AdamState {
  Gradients m, v;
  long step = 0;
};

inline void apply_update(Network& net, Gradients& grads, const TrainConfig& cfg,
                         AdamState& state) {
  if (cfg.optimizer == TrainConfig::Optimizer::sgd) {
    for_each_param_array(net, grads, [&](std::vector<double>& p, std::vector<double>& g) {
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * g[i];
    });
    return;
  }
  ++state.step;
  const double b1 = cfg.adam.beta1, b2 = cfg.adam.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  // Adam state mirrors the gradient layout; walk both in lockstep.
  auto walk = [&](std::vector<std::vector<double>>& pm, std::vector<std::vector<double>>& pv,
                  std::vector<std::vector<double>>& pg, auto get_params) {
    for (std::size_t li = 0; li < pg.size(); ++li) {
      std::vector<double>& p = get_params(li);
      std::vector<double>& g = pg[li];
      std::vector<double>& m = pm[li];
      std::vector<double>& v = pv[li];
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mh = m[i] / corr1;
        const double vh = v[i] / corr2;
        p[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam.eps);
      }
    }
  };
  walk(state.m.conv_W, state.v.conv_W, grads.conv_W,
       [&](std::size_t li) -> std::vector<double>& { return net.conv[li].W; });
  walk(state.m.conv_b, state.v.conv_b, grads.conv_b,
       [&](std::size_t li) -> std::vector<double>& { return net.conv[li].b; });
  walk(state.m.dense_W, state.v.dense_W, grads.dense_W,
       [&](std::size_t li) -> std::vector<double>& { return net.dense[li].W; });
  walk(state.m.dense_b, state.v.dense_b, grads.dense_b,
       [&](std::size_t li) -> std::vector<double>& { return net.dense[li].b; });
}

}  // namespace detail

// Deterministic mini-batch training: shuffling, batching, and updates are all
// driven by cfg.seed, single-threaded. Aborts with a diagnostic naming the
// epoch if the loss goes non-finite.
inline TrainResult train(Network net, const std::vector<Window>& train_set, Target target,
                         const TrainConfig& cfg) {
  validate(cfg);
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");

  std::vector<double> labels(train_set.size());
  for (std::size_t i = 0; i < train_set.size(); ++i) labels[i] = label_of(train_set[i], target);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  detail::AdamState adam;
  adam.m = Gradients::zeros_like(net);
  adam.v = Gradients::zeros_like(net);

  TrainResult result;
  result.loss_history.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<Window> batch;
      std::vector<double> y;
      batch.reserve(end - start);
      y.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
        y.push_back(labels[order[i]]);
      }
      auto [loss, grads] = backward(net, batch, y);
      if (!std::isfinite(loss))
        throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                                 std::to_string(epoch + 1));
      epoch_loss += loss * static_cast<double>(batch.size());
      seen += batch.size();
      detail::apply_update(net, grads, cfg, adam);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(seen));
  }
  result.net = std::move(net);
  return result;
}

}  // namespace quadnav
