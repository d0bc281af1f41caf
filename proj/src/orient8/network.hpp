#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "orient8/tensor.hpp"

namespace orient8::nn {

struct NetworkConfig {
  int input_size = 64;   // square side; must be divisible by 8
  int in_channels = 3;
  std::array<int, 3> conv_channels{8, 16, 32};
  int kernel = 3;
  int hidden_units = 64;
  int classes = 8;
  uint32_t seed = 0;

  void validate() const;
  int flat_size() const {
    const int s = input_size / 8;
    return conv_channels[2] * s * s;
  }
  // Everything except the init seed must agree for weights to be portable.
  bool compatible_with(const NetworkConfig& other, std::string* why) const;
};

struct Gradients {
  std::vector<Tensor> tensors;  // same names/shapes/order as Network params
  void zero() {
    for (auto& t : tensors) t.zero();
  }
};

// Classifier: 3 x (conv 3x3 pad 1 -> ReLU -> maxpool 2x2), flatten,
// dense -> ReLU, dense -> softmax over 8 orientation classes.
class Network {
 public:
  explicit Network(const NetworkConfig& cfg);

  const NetworkConfig& config() const { return cfg_; }
  const std::vector<Tensor>& params() const { return params_; }
  std::vector<Tensor>& params() { return params_; }
  Gradients make_gradients() const;

  // input: n samples of [in_channels][h][w]; probs: n x classes (softmax).
  // Dims must match the config; mismatch throws ShapeError naming the dim.
  void forward_batch(const float* input, int n, int channels, int h, int w,
                     float* probs) const;

  // Mean nll loss over the batch (forward only).
  double batch_loss(const float* input, const int* labels, int n, int channels,
                    int h, int w) const;

  // Mean loss; accumulates batch-mean gradients into `grads` (caller zeroes).
  // Parallel across samples in fixed-size chunks reduced in chunk order, so
  // results do not depend on the worker count.
  double accumulate_gradients(const float* input, const int* labels, int n,
                              int channels, int h, int w, Gradients& grads) const;

 private:
  NetworkConfig cfg_;
  std::vector<Tensor> params_;
};

// Per-class probabilities for one sample.
struct PredictionDistribution {
  std::array<float, 8> probs{};
};

// -sum_i onehot[i] * log(probs[i] + eps); used directly by tests and the
// evaluation path (training uses the fused kernel).
double nll_loss(const PredictionDistribution& pred, const std::array<float, 8>& onehot);

int argmax_label(const float* probs, int n);

}  // namespace orient8::nn
