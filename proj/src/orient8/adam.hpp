#pragma once

#include <cstdint>
#include <vector>

#include "orient8/network.hpp"

namespace orient8::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a parameter list. Non-finite gradients or
// parameters abort the run with DivergedError naming the tensor.
class Adam {
 public:
  Adam(const std::vector<Tensor>& params, AdamConfig cfg);

  // frozen, when given, marks tensors (by index) that receive no update.
  void step(std::vector<Tensor>& params, const Gradients& grads,
            const std::vector<bool>* frozen = nullptr);

  int64_t steps() const { return t_; }
  AdamConfig& config() { return cfg_; }

 private:
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
};

}  // namespace orient8::nn
