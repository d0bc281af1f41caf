#include "orient8/network.hpp"

#include <cmath>

#include "orient8/errors.hpp"
#include "orient8/kernels.hpp"
#include "orient8/rng.hpp"
#include "orient8/threadpool.hpp"

namespace orient8::nn {

namespace {

constexpr int kBatchChunk = 4;  // samples per reduction chunk

// All per-sample scratch for one forward/backward pass.
struct Workspace {
  // stage s runs at spatial side sides[s]; conv output keeps the side,
  // pooling halves it.
  std::array<int, 3> sides{};
  std::array<int, 3> c_in{};
  std::array<int, 3> c_out{};
  std::array<std::vector<float>, 3> cols;
  std::array<std::vector<float>, 3> conv_out;   // pre-activation
  std::array<std::vector<float>, 3> relu_out;
  std::array<std::vector<float>, 3> pooled;
  std::array<std::vector<int>, 3> pool_idx;
  std::vector<float> hidden_pre;
  std::vector<float> hidden;
  std::vector<float> logits;
  std::vector<float> probs;
  // backward scratch
  std::vector<float> d_buf_a;  // holds d(conv_out) at the current stage
  std::vector<float> d_buf_b;  // holds d(pooled) / d(relu_out)
  std::vector<float> d_cols;
  std::vector<float> d_hidden;
  std::vector<float> d_logits;

  explicit Workspace(const NetworkConfig& cfg) {
    int side = cfg.input_size;
    size_t max_conv = 0, max_cols = 0;
    for (int s = 0; s < 3; ++s) {
      sides[s] = side;
      c_in[s] = s == 0 ? cfg.in_channels : cfg.conv_channels[s - 1];
      c_out[s] = cfg.conv_channels[s];
      const size_t plane = static_cast<size_t>(side) * side;
      cols[s].resize(static_cast<size_t>(c_in[s]) * 9 * plane);
      conv_out[s].resize(static_cast<size_t>(c_out[s]) * plane);
      relu_out[s].resize(conv_out[s].size());
      pooled[s].resize(conv_out[s].size() / 4);
      pool_idx[s].resize(pooled[s].size());
      max_conv = std::max(max_conv, conv_out[s].size());
      max_cols = std::max(max_cols, cols[s].size());
      side /= 2;
    }
    hidden_pre.resize(cfg.hidden_units);
    hidden.resize(cfg.hidden_units);
    logits.resize(cfg.classes);
    probs.resize(cfg.classes);
    d_buf_a.resize(max_conv);
    d_buf_b.resize(max_conv);
    d_cols.resize(max_cols);
    d_hidden.resize(cfg.hidden_units);
    d_logits.resize(cfg.classes);
  }
};

}  // namespace

void NetworkConfig::validate() const {
  if (classes != 8) throw ArgumentError("classes must be 8");
  if (kernel != 3) throw ArgumentError("kernel must be 3");
  if (input_size < 8 || input_size % 8 != 0) {
    throw ArgumentError("input_size " + std::to_string(input_size) +
                        " must be a positive multiple of 8");
  }
  if (in_channels < 1) throw ArgumentError("in_channels must be >= 1");
  for (int c : conv_channels) {
    if (c < 1) throw ArgumentError("conv channel counts must be >= 1");
  }
  if (hidden_units < 1) throw ArgumentError("hidden_units must be >= 1");
}

bool NetworkConfig::compatible_with(const NetworkConfig& other, std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (input_size != other.input_size)
    return fail("input_size " + std::to_string(other.input_size) + " != " +
                std::to_string(input_size));
  if (in_channels != other.in_channels)
    return fail("in_channels " + std::to_string(other.in_channels) + " != " +
                std::to_string(in_channels));
  for (int s = 0; s < 3; ++s) {
    if (conv_channels[s] != other.conv_channels[s])
      return fail("conv" + std::to_string(s + 1) + " channels " +
                  std::to_string(other.conv_channels[s]) + " != " +
                  std::to_string(conv_channels[s]));
  }
  if (kernel != other.kernel) return fail("kernel mismatch");
  if (hidden_units != other.hidden_units)
    return fail("hidden_units " + std::to_string(other.hidden_units) + " != " +
                std::to_string(hidden_units));
  if (classes != other.classes) return fail("classes mismatch");
  return true;
}

Network::Network(const NetworkConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  params_.reserve(10);
  for (int s = 0; s < 3; ++s) {
    const int ci = s == 0 ? cfg_.in_channels : cfg_.conv_channels[s - 1];
    const int co = cfg_.conv_channels[s];
    params_.emplace_back("conv" + std::to_string(s + 1) + ".weight",
                         std::vector<int>{co, ci, 3, 3});
    params_.emplace_back("conv" + std::to_string(s + 1) + ".bias",
                         std::vector<int>{co});
  }
  params_.emplace_back("fc1.weight", std::vector<int>{cfg_.hidden_units, cfg_.flat_size()});
  params_.emplace_back("fc1.bias", std::vector<int>{cfg_.hidden_units});
  params_.emplace_back("fc2.weight", std::vector<int>{cfg_.classes, cfg_.hidden_units});
  params_.emplace_back("fc2.bias", std::vector<int>{cfg_.classes});

  // Kaiming-uniform fan-in init for weights, zero biases.
  Rng rng(cfg_.seed);
  for (auto& t : params_) {
    if (t.name.ends_with(".bias")) continue;
    size_t fan_in = 1;
    for (size_t d = 1; d < t.shape.size(); ++d) fan_in *= static_cast<size_t>(t.shape[d]);
    const float bound = std::sqrt(6.0f / static_cast<float>(fan_in));
    for (auto& v : t.data) v = rng.uniform(-bound, bound);
  }
}

Gradients Network::make_gradients() const {
  Gradients g;
  g.tensors.reserve(params_.size());
  for (const auto& p : params_) g.tensors.emplace_back(p.name, p.shape);
  return g;
}

namespace {

void check_input_shape(const NetworkConfig& cfg, int channels, int h, int w) {
  if (channels != cfg.in_channels) {
    throw ShapeError("input channels " + std::to_string(channels) +
                     " does not match network in_channels " +
                     std::to_string(cfg.in_channels));
  }
  if (h != cfg.input_size) {
    throw ShapeError("input height " + std::to_string(h) +
                     " does not match network input_size " +
                     std::to_string(cfg.input_size));
  }
  if (w != cfg.input_size) {
    throw ShapeError("input width " + std::to_string(w) +
                     " does not match network input_size " +
                     std::to_string(cfg.input_size));
  }
}

// Runs one sample through the network, filling ws.
void forward_sample(const NetworkConfig& cfg, const std::vector<Tensor>& params,
                    const float* x, Workspace& ws) {
  using namespace kernels;
  const float* cur = x;
  for (int s = 0; s < 3; ++s) {
    const int side = ws.sides[s];
    conv3x3_forward(cur, ws.c_in[s], side, side, params[2 * s].data.data(),
                    params[2 * s + 1].data.data(), ws.c_out[s],
                    ws.cols[s].data(), ws.conv_out[s].data());
    relu_forward(ws.conv_out[s].data(), ws.relu_out[s].data(), ws.conv_out[s].size());
    maxpool2_forward(ws.relu_out[s].data(), ws.c_out[s], side, side,
                     ws.pooled[s].data(), ws.pool_idx[s].data());
    cur = ws.pooled[s].data();
  }
  const auto& fc1w = params[6];
  const auto& fc1b = params[7];
  const auto& fc2w = params[8];
  const auto& fc2b = params[9];
  dense_forward(ws.pooled[2].data(), fc1w.data.data(), fc1b.data.data(),
                cfg.flat_size(), cfg.hidden_units, ws.hidden_pre.data());
  relu_forward(ws.hidden_pre.data(), ws.hidden.data(), ws.hidden.size());
  dense_forward(ws.hidden.data(), fc2w.data.data(), fc2b.data.data(),
                cfg.hidden_units, cfg.classes, ws.logits.data());
  softmax(ws.logits.data(), ws.probs.data(), cfg.classes);
}

// Backward for the sample currently held in ws; accumulates into grads.
void backward_sample(const NetworkConfig& cfg, const std::vector<Tensor>& params,
                     int label, Workspace& ws, Gradients& grads) {
  using namespace kernels;
  softmax_nll_backward(ws.probs.data(), label, ws.d_logits.data(), cfg.classes);

  auto& g_fc1w = grads.tensors[6];
  auto& g_fc1b = grads.tensors[7];
  auto& g_fc2w = grads.tensors[8];
  auto& g_fc2b = grads.tensors[9];

  dense_backward(ws.hidden.data(), params[8].data.data(), ws.d_logits.data(),
                 cfg.hidden_units, cfg.classes, g_fc2w.data.data(),
                 g_fc2b.data.data(), ws.d_hidden.data());
  relu_backward(ws.hidden_pre.data(), ws.d_hidden.data(), ws.d_hidden.data(),
                ws.d_hidden.size());

  // d(pooled[2]) lands in d_buf_b.
  dense_backward(ws.pooled[2].data(), params[6].data.data(), ws.d_hidden.data(),
                 cfg.flat_size(), cfg.hidden_units, g_fc1w.data.data(),
                 g_fc1b.data.data(), ws.d_buf_b.data());

  for (int s = 2; s >= 0; --s) {
    const int side = ws.sides[s];
    // d(pooled[s]) -> d(relu_out) -> d(conv_out), reusing d_buf_a.
    maxpool2_backward(ws.d_buf_b.data(), ws.pool_idx[s].data(), ws.d_buf_a.data(),
                      ws.c_out[s], side, side);
    relu_backward(ws.conv_out[s].data(), ws.d_buf_a.data(), ws.d_buf_a.data(),
                  ws.conv_out[s].size());
    conv3x3_backward(ws.cols[s].data(), params[2 * s].data.data(),
                     ws.d_buf_a.data(), ws.c_in[s], side, side, ws.c_out[s],
                     grads.tensors[2 * s].data.data(),
                     grads.tensors[2 * s + 1].data.data(), ws.d_cols.data(),
                     s > 0 ? ws.d_buf_b.data() : nullptr);
  }
}

}  // namespace

void Network::forward_batch(const float* input, int n, int channels, int h,
                            int w, float* probs) const {
  check_input_shape(cfg_, channels, h, w);
  const size_t in_stride = static_cast<size_t>(channels) * h * w;
  parallel_chunks(n, kBatchChunk, [&](int, int begin, int end) {
    Workspace ws(cfg_);
    for (int i = begin; i < end; ++i) {
      forward_sample(cfg_, params_, input + i * in_stride, ws);
      std::copy(ws.probs.begin(), ws.probs.end(),
                probs + static_cast<size_t>(i) * cfg_.classes);
    }
  });
}

double Network::batch_loss(const float* input, const int* labels, int n,
                           int channels, int h, int w) const {
  check_input_shape(cfg_, channels, h, w);
  const size_t in_stride = static_cast<size_t>(channels) * h * w;
  std::vector<double> losses(n);
  parallel_chunks(n, kBatchChunk, [&](int, int begin, int end) {
    Workspace ws(cfg_);
    for (int i = begin; i < end; ++i) {
      forward_sample(cfg_, params_, input + i * in_stride, ws);
      losses[i] = kernels::nll_loss(ws.probs.data(), labels[i]);
    }
  });
  double total = 0;
  for (double l : losses) total += l;
  return total / n;
}

double Network::accumulate_gradients(const float* input, const int* labels,
                                     int n, int channels, int h, int w,
                                     Gradients& grads) const {
  check_input_shape(cfg_, channels, h, w);
  const size_t in_stride = static_cast<size_t>(channels) * h * w;
  const int n_chunks = (n + kBatchChunk - 1) / kBatchChunk;

  // Per-chunk partial gradients, reduced in chunk order afterwards so the
  // result is identical for any worker count.
  std::vector<Gradients> partial(n_chunks);
  for (auto& p : partial) p = make_gradients();
  std::vector<double> losses(n);

  parallel_chunks(n, kBatchChunk, [&](int chunk, int begin, int end) {
    Workspace ws(cfg_);
    for (int i = begin; i < end; ++i) {
      forward_sample(cfg_, params_, input + i * in_stride, ws);
      losses[i] = kernels::nll_loss(ws.probs.data(), labels[i]);
      backward_sample(cfg_, params_, labels[i], ws, partial[chunk]);
    }
  });

  const float inv_n = 1.0f / static_cast<float>(n);
  for (size_t t = 0; t < grads.tensors.size(); ++t) {
    float* dst = grads.tensors[t].data.data();
    const size_t numel = grads.tensors[t].data.size();
    for (int c = 0; c < n_chunks; ++c) {
      const float* src = partial[c].tensors[t].data.data();
      for (size_t i = 0; i < numel; ++i) dst[i] += src[i] * inv_n;
    }
  }
  double total = 0;
  for (double l : losses) total += l;
  return total / n;
}

double nll_loss(const PredictionDistribution& pred, const std::array<float, 8>& onehot) {
  double loss = 0;
  for (int i = 0; i < 8; ++i) {
    if (onehot[i] != 0.0f) {
      loss -= onehot[i] * std::log(pred.probs[i] + kernels::kLossEpsilon);
    }
  }
  return loss;
}

int argmax_label(const float* probs, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (probs[i] > probs[best]) best = i;  // ties keep the smaller index
  }
  return best;
}

}  // namespace orient8::nn
