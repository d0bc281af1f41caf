#pragma once

#include <numeric>
#include <string>
#include <vector>

namespace orient8::nn {

struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::string n, std::vector<int> s) : name(std::move(n)), shape(std::move(s)) {
    data.assign(numel(), 0.0f);
  }

  size_t numel() const {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
  }

  void zero() { std::fill(data.begin(), data.end(), 0.0f); }
};

}  // namespace orient8::nn
