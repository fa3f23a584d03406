#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadnav/tensor.hpp"
#include "quadnav/types.hpp"

namespace quadnav {

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
  std::vector<double> W;  // [out][in][k], row-major
  std::vector<double> b;  // [out]
};

struct DenseLayer {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> W;  // [out][in], row-major
  std::vector<double> b;  // [out]
};

inline int conv_output_length(int length, int kernel, int stride) {
  if (length < kernel)
    throw std::invalid_argument("conv: input length " + std::to_string(length) +
                                " shorter than kernel " + std::to_string(kernel));
  return (length - kernel) / stride + 1;
}

// Architecture description. The canonical QuadNet is seven 1-D convolutions
// followed by three fully connected layers mapping a 120x6 window to one
// scalar; widths and strides below are this artifact's documented defaults
// and are configurable.
struct NetworkSpec {
  int input_channels = 6;
  int input_length = 120;
  std::vector<int> conv_channels = {32, 32, 64, 64, 128, 128, 128};
  std::vector<int> conv_strides = {1, 1, 1, 1, 1, 2, 2};
  int kernel = 3;
  std::vector<int> dense_hidden = {128, 64};  // a final scalar layer is appended
};

struct Network {
  NetworkSpec spec;
  std::vector<ConvLayer> conv;
  std::vector<DenseLayer> dense;
  bool linear_activations = false;  // test hook: identity in place of ReLU

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& c : conv) n += c.W.size() + c.b.size();
    for (const auto& d : dense) n += d.W.size() + d.b.size();
    return n;
  }
};

// Lengths of every conv stage output, starting with the input length.
inline std::vector<int> conv_length_chain(const NetworkSpec& spec) {
  if (spec.conv_channels.size() != spec.conv_strides.size())
    throw std::invalid_argument("NetworkSpec: conv_channels/conv_strides size mismatch");
  if (spec.kernel < 1) throw std::invalid_argument("NetworkSpec: kernel must be >= 1");
  std::vector<int> lengths{spec.input_length};
  for (std::size_t i = 0; i < spec.conv_channels.size(); ++i) {
    if (spec.conv_channels[i] < 1) throw std::invalid_argument("NetworkSpec: channel count < 1");
    if (spec.conv_strides[i] < 1) throw std::invalid_argument("NetworkSpec: stride < 1");
    lengths.push_back(conv_output_length(lengths.back(), spec.kernel, spec.conv_strides[i]));
  }
  return lengths;
}

inline int flatten_dim(const NetworkSpec& spec) {
  const auto lengths = conv_length_chain(spec);
  const int ch = spec.conv_channels.empty() ? spec.input_channels : spec.conv_channels.back();
  return ch * lengths.back();
}

// He-style uniform fan-in init, biases zero, draw order fixed by layer order.
inline Network build_network(const NetworkSpec& spec, std::uint64_t seed) {
  conv_length_chain(spec);  // validates the shape chain
  std::mt19937_64 rng(seed);
  Network net;
  net.spec = spec;

  int in_ch = spec.input_channels;
  for (std::size_t i = 0; i < spec.conv_channels.size(); ++i) {
    ConvLayer layer;
    layer.in_channels = in_ch;
    layer.out_channels = spec.conv_channels[i];
    layer.kernel = spec.kernel;
    layer.stride = spec.conv_strides[i];
    const int fan_in = in_ch * spec.kernel;
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.W.resize(static_cast<std::size_t>(layer.out_channels) * in_ch * spec.kernel);
    for (auto& w : layer.W) w = dist(rng);
    layer.b.assign(layer.out_channels, 0.0);
    net.conv.push_back(std::move(layer));
    in_ch = spec.conv_channels[i];
  }

  int in_dim = flatten_dim(spec);
  std::vector<int> widths = spec.dense_hidden;
  widths.push_back(1);  // scalar regression head
  for (int out_dim : widths) {
    if (out_dim < 1) throw std::invalid_argument("NetworkSpec: dense width < 1");
    DenseLayer layer;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    const double limit = std::sqrt(6.0 / in_dim);
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.W.resize(static_cast<std::size_t>(out_dim) * in_dim);
    for (auto& w : layer.W) w = dist(rng);
    layer.b.assign(out_dim, 0.0);
    net.dense.push_back(std::move(layer));
    in_dim = out_dim;
  }
  return net;
}

// Canonical QuadNet factory: exactly seven conv and three dense layers,
// 120x6 window in, one scalar out. Fails loudly on anything else.
inline Network make_quadnet(const NetworkSpec& spec, std::uint64_t seed) {
  if (spec.conv_channels.size() != 7)
    throw std::invalid_argument("QuadNet requires exactly 7 conv layers, got " +
                                std::to_string(spec.conv_channels.size()));
  if (spec.dense_hidden.size() != 2)
    throw std::invalid_argument("QuadNet requires exactly 3 dense layers (2 hidden + head)");
  if (spec.input_channels != 6 || spec.input_length != 120)
    throw std::invalid_argument("QuadNet input must be a 120x6 window");
  return build_network(spec, seed);
}

// ---------------------------------------------------------------------------
// Forward ops (Tensor-level surface; used directly by the oracles)
// ---------------------------------------------------------------------------

namespace detail {

// y[o][j] = b[o] + sum_i sum_k W[o][i][k] * x[i][j*stride + k]
inline void conv_forward_raw(const double* x, int in_ch, int length, const ConvLayer& c,
                             double* y, int out_len) {
  for (int o = 0; o < c.out_channels; ++o) {
    double* yo = y + static_cast<std::size_t>(o) * out_len;
    for (int j = 0; j < out_len; ++j) yo[j] = c.b[o];
    for (int i = 0; i < in_ch; ++i) {
      const double* xi = x + static_cast<std::size_t>(i) * length;
      const double* wo = c.W.data() + (static_cast<std::size_t>(o) * in_ch + i) * c.kernel;
      for (int j = 0; j < out_len; ++j) {
        const double* xs = xi + static_cast<std::size_t>(j) * c.stride;
        double sum = 0.0;
        for (int k = 0; k < c.kernel; ++k) sum += wo[k] * xs[k];
        yo[j] += sum;
      }
    }
  }
}

inline void dense_forward_raw(const double* x, const DenseLayer& d, double* y) {
  for (int o = 0; o < d.out_dim; ++o) {
    const double* wo = d.W.data() + static_cast<std::size_t>(o) * d.in_dim;
    double sum = d.b[o];
    for (int i = 0; i < d.in_dim; ++i) sum += wo[i] * x[i];
    y[o] = sum;
  }
}

inline void activation_raw(const double* pre, double* post, std::size_t n, bool linear) {
  if (linear) {
    for (std::size_t i = 0; i < n; ++i) post[i] = pre[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
  }
}

}  // namespace detail

// Valid (no padding) discrete cross-correlation plus bias. Input C_in x L,
// output C_out x L' with L' = floor((L - k)/stride) + 1.
inline Tensor conv1d_forward(const Tensor& x, const ConvLayer& layer) {
  if (x.shape.size() != 2) throw std::invalid_argument("conv1d_forward: expected 2-D input");
  const int in_ch = x.shape[0];
  const int length = x.shape[1];
  if (in_ch != layer.in_channels)
    throw std::invalid_argument("conv1d_forward: channel mismatch");
  const int out_len = conv_output_length(length, layer.kernel, layer.stride);
  Tensor y = Tensor::zeros({layer.out_channels, out_len});
  detail::conv_forward_raw(x.data.data(), in_ch, length, layer, y.data.data(), out_len);
  return y;
}

// Elementwise max{0, z}.
inline Tensor relu(const Tensor& z) {
  Tensor out = z;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

// W h + b for a flat vector h.
inline Tensor dense_forward(const Tensor& h, const DenseLayer& layer) {
  if (static_cast<int>(h.size()) != layer.in_dim)
    throw std::invalid_argument("dense_forward: dimension mismatch");
  Tensor y = Tensor::zeros({layer.out_dim});
  detail::dense_forward_raw(h.data.data(), layer, y.data.data());
  return y;
}

// ---------------------------------------------------------------------------
// Whole-network forward / backward
// ---------------------------------------------------------------------------

namespace detail {

// Per-window activations retained for the backward pass. conv_pre[0] is the
// channel-major input; entries 1..n are conv pre-activations.
struct ForwardTrace {
  std::vector<std::vector<double>> conv_pre;
  std::vector<std::vector<double>> conv_act;
  std::vector<std::vector<double>> dense_pre;
  std::vector<std::vector<double>> dense_act;
  std::vector<int> lengths;  // conv stage output lengths (incl. input)
  double output = 0.0;
};

inline void check_window(const Network& net, const Window& w) {
  if (w.x.rows() != net.spec.input_length || w.x.cols() != net.spec.input_channels)
    throw std::invalid_argument("forward: window is " + std::to_string(w.x.rows()) + "x" +
                                std::to_string(w.x.cols()) + ", network expects " +
                                std::to_string(net.spec.input_length) + "x" +
                                std::to_string(net.spec.input_channels));
}

inline ForwardTrace forward_trace(const Network& net, const Window& w) {
  check_window(net, w);
  ForwardTrace tr;
  tr.lengths = conv_length_chain(net.spec);

  const int ch0 = net.spec.input_channels;
  const int len0 = net.spec.input_length;
  // window rows are time, columns are channels; the network is channel-major
  std::vector<double> x(static_cast<std::size_t>(ch0) * len0);
  for (int c = 0; c < ch0; ++c)
    for (int t = 0; t < len0; ++t) x[static_cast<std::size_t>(c) * len0 + t] = w.x(t, c);
  tr.conv_pre.push_back(std::move(x));
  tr.conv_act.push_back(tr.conv_pre[0]);

  int in_ch = ch0;
  for (std::size_t li = 0; li < net.conv.size(); ++li) {
    const ConvLayer& c = net.conv[li];
    const int len_in = tr.lengths[li];
    const int len_out = tr.lengths[li + 1];
    std::vector<double> pre(static_cast<std::size_t>(c.out_channels) * len_out);
    conv_forward_raw(tr.conv_act.back().data(), in_ch, len_in, c, pre.data(), len_out);
    std::vector<double> act(pre.size());
    activation_raw(pre.data(), act.data(), pre.size(), net.linear_activations);
    tr.conv_pre.push_back(std::move(pre));
    tr.conv_act.push_back(std::move(act));
    in_ch = c.out_channels;
  }

  // flatten is channel-major by construction; dense layers take over
  const std::vector<double>* h = &tr.conv_act.back();
  for (std::size_t li = 0; li < net.dense.size(); ++li) {
    const DenseLayer& d = net.dense[li];
    if (static_cast<int>(h->size()) != d.in_dim)
      throw std::invalid_argument("forward: dense dimension mismatch at layer " + std::to_string(li));
    std::vector<double> pre(d.out_dim);
    dense_forward_raw(h->data(), d, pre.data());
    std::vector<double> act(pre.size());
    const bool last = li + 1 == net.dense.size();
    activation_raw(pre.data(), act.data(), pre.size(), net.linear_activations || last);
    tr.dense_pre.push_back(std::move(pre));
    tr.dense_act.push_back(std::move(act));
    h = &tr.dense_act.back();
  }
  tr.output = tr.dense_act.back().at(0);
  return tr;
}

}  // namespace detail

// conv x7 (ReLU after each) -> flatten -> dense x3 (ReLU after the first two,
// linear head) -> predicted distance or altitude change [m].
inline double forward(const Network& net, const Window& window) {
  return detail::forward_trace(net, window).output;
}

// Mean squared error, Eq-style (1/N) sum (y - yhat)^2.
inline double mse_loss(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw std::invalid_argument("mse_loss: length mismatch");
  if (y.empty()) throw std::invalid_argument("mse_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - yhat[i];
    sum += e * e;
  }
  return sum / static_cast<double>(y.size());
}

// Parameter-shaped gradient store, one flat array per layer tensor.
struct Gradients {
  std::vector<std::vector<double>> conv_W, conv_b;
  std::vector<std::vector<double>> dense_W, dense_b;

  static Gradients zeros_like(const Network& net) {
    Gradients g;
    for (const auto& c : net.conv) {
      g.conv_W.emplace_back(c.W.size(), 0.0);
      g.conv_b.emplace_back(c.b.size(), 0.0);
    }
    for (const auto& d : net.dense) {
      g.dense_W.emplace_back(d.W.size(), 0.0);
      g.dense_b.emplace_back(d.b.size(), 0.0);
    }
    return g;
  }
};

// Applies fn(param, grad_slot) over every parameter array in a fixed order.
// The same order defines the flattened parameter vector used by grad_check
// and the optimizers.
template <typename NetT, typename GradT, typename Fn>
void for_each_param_array(NetT& net, GradT& grads, Fn&& fn) {
  for (std::size_t i = 0; i < net.conv.size(); ++i) {
    fn(net.conv[i].W, grads.conv_W[i]);
    fn(net.conv[i].b, grads.conv_b[i]);
  }
  for (std::size_t i = 0; i < net.dense.size(); ++i) {
    fn(net.dense[i].W, grads.dense_W[i]);
    fn(net.dense[i].b, grads.dense_b[i]);
  }
}

// Exact reverse-mode gradients of the batch-mean MSE with respect to every
// parameter. ReLU subgradient at exactly 0 is taken as 0. Accumulation is in
// batch order, so results are deterministic.
inline std::pair<double, Gradients> backward(const Network& net, const std::vector<Window>& batch,
                                             const std::vector<double>& y) {
  if (batch.empty()) throw std::invalid_argument("backward: empty batch");
  if (batch.size() != y.size()) throw std::invalid_argument("backward: batch/label size mismatch");

  Gradients grads = Gradients::zeros_like(net);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;

  for (std::size_t bi = 0; bi < batch.size(); ++bi) {
    const detail::ForwardTrace tr = detail::forward_trace(net, batch[bi]);
    const double err = tr.output - y[bi];
    loss += err * err / n;
    // dL/dyhat for this example
    std::vector<double> grad_out{2.0 * err / n};

    // dense stack, last to first
    for (int li = static_cast<int>(net.dense.size()) - 1; li >= 0; --li) {
      const DenseLayer& d = net.dense[li];
      const bool last = li + 1 == static_cast<int>(net.dense.size());
      // activation backward (head is linear)
      std::vector<double> grad_pre = grad_out;
      if (!last && !net.linear_activations) {
        for (int o = 0; o < d.out_dim; ++o)
          if (tr.dense_pre[li][o] <= 0.0) grad_pre[o] = 0.0;
      }
      const std::vector<double>& input =
          (li == 0) ? tr.conv_act.back() : tr.dense_act[li - 1];
      auto& gW = grads.dense_W[li];
      auto& gb = grads.dense_b[li];
      std::vector<double> grad_in(d.in_dim, 0.0);
      for (int o = 0; o < d.out_dim; ++o) {
        const double go = grad_pre[o];
        if (go == 0.0) continue;
        gb[o] += go;
        double* gWo = gW.data() + static_cast<std::size_t>(o) * d.in_dim;
        const double* wo = d.W.data() + static_cast<std::size_t>(o) * d.in_dim;
        for (int i = 0; i < d.in_dim; ++i) {
          gWo[i] += go * input[i];
          grad_in[i] += go * wo[i];
        }
      }
      grad_out = std::move(grad_in);
    }

    // conv stack, last to first
    for (int li = static_cast<int>(net.conv.size()) - 1; li >= 0; --li) {
      const ConvLayer& c = net.conv[li];
      const int len_in = tr.lengths[li];
      const int len_out = tr.lengths[li + 1];
      std::vector<double>& grad_post = grad_out;  // dL/d(activation output)
      if (!net.linear_activations) {
        const auto& pre = tr.conv_pre[li + 1];
        for (std::size_t i = 0; i < grad_post.size(); ++i)
          if (pre[i] <= 0.0) grad_post[i] = 0.0;
      }
      const std::vector<double>& input = tr.conv_act[li];
      auto& gW = grads.conv_W[li];
      auto& gb = grads.conv_b[li];
      std::vector<double> grad_in(static_cast<std::size_t>(c.in_channels) * len_in, 0.0);
      for (int o = 0; o < c.out_channels; ++o) {
        const double* gpo = grad_post.data() + static_cast<std::size_t>(o) * len_out;
        for (int j = 0; j < len_out; ++j) gb[o] += gpo[j];
        for (int i = 0; i < c.in_channels; ++i) {
          const double* xi = input.data() + static_cast<std::size_t>(i) * len_in;
          double* gxi = grad_in.data() + static_cast<std::size_t>(i) * len_in;
          const std::size_t w_off = (static_cast<std::size_t>(o) * c.in_channels + i) * c.kernel;
          const double* wo = c.W.data() + w_off;
          double* gWo = gW.data() + w_off;
          for (int j = 0; j < len_out; ++j) {
            const double go = gpo[j];
            if (go == 0.0) continue;
            const int base = j * c.stride;
            for (int k = 0; k < c.kernel; ++k) {
              gWo[k] += go * xi[base + k];
              gxi[base + k] += go * wo[k];
            }
          }
        }
      }
      grad_out = std::move(grad_in);
    }
  }
  return {loss, std::move(grads)};
}

// Central finite-difference verification of backward(). Returns the maximum
// relative error max |analytic - numeric| / max(|analytic| + |numeric|, 1e-8)
// over every parameter. Intended for small nets (<= a few thousand params).
inline double grad_check(const Network& net, const std::vector<Window>& batch,
                         const std::vector<double>& y, double eps = 1e-6) {
  auto [loss, grads] = backward(net, batch, y);
  (void)loss;

  Network probe = net;
  Gradients& analytic = grads;
  double max_rel = 0.0;

  auto eval_loss = [&]() {
    std::vector<double> yhat(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) yhat[i] = forward(probe, batch[i]);
    return mse_loss(y, yhat);
  };

  for_each_param_array(probe, analytic, [&](std::vector<double>& params, std::vector<double>& g) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + eps;
      const double lp = eval_loss();
      params[i] = saved - eps;
      const double lm = eval_loss();
      params[i] = saved;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double rel = std::abs(g[i] - numeric) / std::max(std::abs(g[i]) + std::abs(numeric), 1e-8);
      max_rel = std::max(max_rel, rel);
    }
  });
  return max_rel;
}

}  // namespace quadnav
