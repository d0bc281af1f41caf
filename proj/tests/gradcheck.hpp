#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "orient8/kernels.hpp"
#include "orient8/network.hpp"
#include "orient8/rng.hpp"

// Central-difference gradient verification helpers. The loss callback is
// re-evaluated with single coordinates displaced by +/-h; relative error
// uses max(|analytic|, |numeric|, floor) as denominator so exactly-zero
// gradients (relu dead zones, pooling losers) compare cleanly.

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
  std::string worst;  // description of the worst coordinate
};

template <typename T>
GradCheckResult check_gradient(T* coords, const T* analytic, size_t n,
                               size_t max_coords, T step, T floor,
                               const std::function<double()>& loss,
                               orient8::Rng& rng, const std::string& tag) {
  GradCheckResult res;
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  if (n > max_coords) rng.shuffle(order);
  const size_t count = std::min(n, max_coords);

  for (size_t c = 0; c < count; ++c) {
    const size_t i = order[c];
    const T saved = coords[i];
    coords[i] = saved + step;
    const double lp = loss();
    coords[i] = saved - step;
    const double lm = loss();
    coords[i] = saved;
    const double numeric = (lp - lm) / (2.0 * static_cast<double>(step));
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric),
                                   static_cast<double>(floor)});
    const double rel = std::abs(a - numeric) / denom;
    if (rel > res.max_rel_err) {
      res.max_rel_err = rel;
      res.worst = tag + "[" + std::to_string(i) + "] analytic=" +
                  std::to_string(a) + " numeric=" + std::to_string(numeric);
    }
    ++res.checked;
  }
  return res;
}

// Reference loss for the finite-difference oracle: the same architecture
// evaluated in double precision from the network's float32 parameters.
// Keeping the oracle in higher precision leaves the float32 backward pass
// as the only thing under test.
inline double network_loss_f64(const orient8::nn::Network& net,
                               const std::vector<float>& input,
                               const std::vector<int>& labels) {
  using namespace orient8::nn;
  namespace k = orient8::nn::kernels;
  const NetworkConfig& cfg = net.config();

  std::vector<std::vector<double>> params;
  params.reserve(net.params().size());
  for (const auto& t : net.params()) {
    params.emplace_back(t.data.begin(), t.data.end());
  }

  const int n = static_cast<int>(labels.size());
  const size_t stride =
      static_cast<size_t>(cfg.in_channels) * cfg.input_size * cfg.input_size;
  double total = 0.0;
  std::vector<double> x(stride);
  for (int s = 0; s < n; ++s) {
    for (size_t i = 0; i < stride; ++i) x[i] = input[s * stride + i];
    std::vector<double> cur = x;
    int side = cfg.input_size;
    int c_in = cfg.in_channels;
    for (int st = 0; st < 3; ++st) {
      const int c_out = cfg.conv_channels[st];
      const size_t plane = static_cast<size_t>(side) * side;
      std::vector<double> cols(static_cast<size_t>(c_in) * 9 * plane);
      std::vector<double> y(static_cast<size_t>(c_out) * plane);
      k::conv3x3_forward(cur.data(), c_in, side, side, params[2 * st].data(),
                         params[2 * st + 1].data(), c_out, cols.data(), y.data());
      k::relu_forward(y.data(), y.data(), y.size());
      std::vector<double> pooled(y.size() / 4);
      std::vector<int> idx(pooled.size());
      k::maxpool2_forward(y.data(), c_out, side, side, pooled.data(), idx.data());
      cur = std::move(pooled);
      side /= 2;
      c_in = c_out;
    }
    std::vector<double> hidden(cfg.hidden_units), logits(cfg.classes), probs(cfg.classes);
    k::dense_forward(cur.data(), params[6].data(), params[7].data(),
                     cfg.flat_size(), cfg.hidden_units, hidden.data());
    k::relu_forward(hidden.data(), hidden.data(), hidden.size());
    k::dense_forward(hidden.data(), params[8].data(), params[9].data(),
                     cfg.hidden_units, cfg.classes, logits.data());
    k::softmax(logits.data(), probs.data(), cfg.classes);
    total += k::nll_loss(probs.data(), labels[s]);
  }
  return total / n;
}

// Full-network check: float32 analytic gradients from accumulate_gradients
// against central differences of the double-precision reference loss, for
// sampled coordinates of every parameter tensor.
inline std::vector<GradCheckResult> check_network_gradients(
    orient8::nn::Network& net, const std::vector<float>& input,
    const std::vector<int>& labels, int coords_per_tensor, float step,
    float floor, uint64_t seed) {
  using namespace orient8;
  const auto& cfg = net.config();
  const int n = static_cast<int>(labels.size());

  nn::Gradients grads = net.make_gradients();
  net.accumulate_gradients(input.data(), labels.data(), n, cfg.in_channels,
                           cfg.input_size, cfg.input_size, grads);

  Rng rng(seed);
  std::vector<GradCheckResult> results;
  for (size_t t = 0; t < net.params().size(); ++t) {
    auto& p = net.params()[t];
    auto loss = [&]() { return network_loss_f64(net, input, labels); };
    results.push_back(check_gradient<float>(
        p.data.data(), grads.tensors[t].data.data(), p.data.size(),
        static_cast<size_t>(coords_per_tensor), step, floor, loss, rng, p.name));
  }
  return results;
}
