#include "orient8/adam.hpp"

#include <cmath>

#include "orient8/errors.hpp"

namespace orient8::nn {

Adam::Adam(const std::vector<Tensor>& params, AdamConfig cfg) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.emplace_back(p.data.size(), 0.0f);
    v_.emplace_back(p.data.size(), 0.0f);
  }
}

void Adam::step(std::vector<Tensor>& params, const Gradients& grads,
                const std::vector<bool>* frozen) {
  if (params.size() != grads.tensors.size() || params.size() != m_.size()) {
    throw ShapeError("optimizer state does not match parameter list");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

  for (size_t t = 0; t < params.size(); ++t) {
    if (frozen && (*frozen)[t]) continue;
    auto& p = params[t].data;
    const auto& g = grads.tensors[t].data;
    if (p.size() != g.size()) {
      throw ShapeError("gradient shape mismatch for " + params[t].name);
    }
    auto& m = m_[t];
    auto& v = v_[t];
    for (size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      if (!std::isfinite(gi)) {
        throw DivergedError("non-finite gradient in " + params[t].name +
                            " at step " + std::to_string(t_));
      }
      const double mi = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      const double vi = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double update = cfg_.lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg_.eps);
      const double pi = p[i] - update;
      if (!std::isfinite(pi)) {
        throw DivergedError("non-finite parameter in " + params[t].name +
                            " at step " + std::to_string(t_));
      }
      p[i] = static_cast<float>(pi);
    }
  }
}

}  // namespace orient8::nn
