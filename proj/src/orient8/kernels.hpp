#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>

// Scalar-templated layer primitives. The network runs them at float; the
// gradient-check harness instantiates the same code at double to get a
// tighter finite-difference bound.

namespace orient8::nn::kernels {

// c = a(m x k) * b(k x n), row-major. Accumulates when acc is true.
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool acc) {
  if (!acc) std::fill(c, c + static_cast<size_t>(m) * n, T(0));
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    T* crow = c + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T(0)) continue;
      const T* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c = a(m x k) * b(n x k)^T.
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool acc) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    T* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const T* brow = b + static_cast<size_t>(j) * k;
      T sum = 0;
      for (int p = 0; p < k; ++p) sum += arow[p] * brow[p];
      crow[j] = acc ? crow[j] + sum : sum;
    }
  }
}

// c = a(k x m)^T * b(k x n).
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool acc) {
  if (!acc) std::fill(c, c + static_cast<size_t>(m) * n, T(0));
  for (int p = 0; p < k; ++p) {
    const T* arow = a + static_cast<size_t>(p) * m;
    const T* brow = b + static_cast<size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      const T av = arow[i];
      if (av == T(0)) continue;
      T* crow = c + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// 3x3, stride 1, pad 1 patch extraction: x[c][h][w] -> cols[c*9 + t][h*w].
template <typename T>
void im2col_3x3(const T* x, int c_in, int h, int w, T* cols) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int c = 0; c < c_in; ++c) {
    const T* xc = x + c * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = cols + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * plane;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          T* dst = row + static_cast<size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + w, T(0));
            continue;
          }
          const T* src = xc + static_cast<size_t>(sy) * w;
          const int x0 = std::max(0, 1 - kx);          // first valid target x
          const int x1 = w - std::max(0, kx - 1);      // one past last valid
          if (x0 > 0) std::fill(dst, dst + x0, T(0));
          if (x1 < w) std::fill(dst + x1, dst + w, T(0));
          for (int xx = x0; xx < x1; ++xx) dst[xx] = src[xx + kx - 1];
        }
      }
    }
  }
}

// Transpose of im2col: scatter-add cols back into dx (caller zeroes dx).
template <typename T>
void col2im_3x3(const T* cols, int c_in, int h, int w, T* dx) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int c = 0; c < c_in; ++c) {
    T* xc = dx + c * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = cols + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * plane;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const T* src = row + static_cast<size_t>(y) * w;
          T* dst = xc + static_cast<size_t>(sy) * w;
          const int x0 = std::max(0, 1 - kx);
          const int x1 = w - std::max(0, kx - 1);
          for (int xx = x0; xx < x1; ++xx) dst[xx + kx - 1] += src[xx];
        }
      }
    }
  }
}

// y = weight[c_out][c_in*9] * im2col(x) + bias; cols is caller scratch and
// is retained for the backward pass.
template <typename T>
void conv3x3_forward(const T* x, int c_in, int h, int w, const T* weight,
                     const T* bias, int c_out, T* cols, T* y) {
  const size_t plane = static_cast<size_t>(h) * w;
  im2col_3x3(x, c_in, h, w, cols);
  gemm_nn(weight, cols, y, c_out, c_in * 9, static_cast<int>(plane), false);
  for (int co = 0; co < c_out; ++co) {
    T* yr = y + co * plane;
    const T b = bias[co];
    for (size_t i = 0; i < plane; ++i) yr[i] += b;
  }
}

// Accumulates dweight/dbias; writes dx when non-null (dcols is scratch).
template <typename T>
void conv3x3_backward(const T* cols, const T* weight, const T* dy, int c_in,
                      int h, int w, int c_out, T* dweight, T* dbias, T* dcols,
                      T* dx) {
  const int plane = h * w;
  for (int co = 0; co < c_out; ++co) {
    const T* dyr = dy + static_cast<size_t>(co) * plane;
    T sum = 0;
    for (int i = 0; i < plane; ++i) sum += dyr[i];
    dbias[co] += sum;
  }
  gemm_nt(dy, cols, dweight, c_out, plane, c_in * 9, true);
  if (dx) {
    gemm_tn(weight, dy, dcols, c_in * 9, c_out, plane, false);
    std::fill(dx, dx + static_cast<size_t>(c_in) * plane, T(0));
    col2im_3x3(dcols, c_in, h, w, dx);
  }
}

template <typename T>
void relu_forward(const T* x, T* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void relu_backward(const T* x, const T* dy, T* dx, size_t n) {
  for (size_t i = 0; i < n; ++i) dx[i] = x[i] > T(0) ? dy[i] : T(0);
}

// 2x2 max pooling, stride 2; h and w must be even. idx records the flat
// input offset of each winner for the backward pass.
template <typename T>
void maxpool2_forward(const T* x, int c, int h, int w, T* y, int* idx) {
  const int oh = h / 2;
  const int ow = w / 2;
  for (int ch = 0; ch < c; ++ch) {
    const T* xc = x + static_cast<size_t>(ch) * h * w;
    const size_t base = static_cast<size_t>(ch) * h * w;
    for (int y0 = 0; y0 < oh; ++y0) {
      for (int x0 = 0; x0 < ow; ++x0) {
        const int iy = 2 * y0;
        const int ix = 2 * x0;
        int best = iy * w + ix;
        T bv = xc[best];
        const int cand[3] = {iy * w + ix + 1, (iy + 1) * w + ix, (iy + 1) * w + ix + 1};
        for (int cd : cand) {
          if (xc[cd] > bv) {
            bv = xc[cd];
            best = cd;
          }
        }
        const size_t o = (static_cast<size_t>(ch) * oh + y0) * ow + x0;
        y[o] = bv;
        idx[o] = static_cast<int>(base) + best;
      }
    }
  }
}

template <typename T>
void maxpool2_backward(const T* dy, const int* idx, T* dx, int c, int h, int w) {
  std::fill(dx, dx + static_cast<size_t>(c) * h * w, T(0));
  const size_t n_out = static_cast<size_t>(c) * (h / 2) * (w / 2);
  for (size_t i = 0; i < n_out; ++i) dx[idx[i]] += dy[i];
}

// y = weight[out][in] * x + bias.
template <typename T>
void dense_forward(const T* x, const T* weight, const T* bias, int in, int out, T* y) {
  for (int o = 0; o < out; ++o) {
    const T* wr = weight + static_cast<size_t>(o) * in;
    T sum = bias[o];
    for (int i = 0; i < in; ++i) sum += wr[i] * x[i];
    y[o] = sum;
  }
}

template <typename T>
void dense_backward(const T* x, const T* weight, const T* dy, int in, int out,
                    T* dweight, T* dbias, T* dx) {
  for (int o = 0; o < out; ++o) {
    const T g = dy[o];
    dbias[o] += g;
    T* dwr = dweight + static_cast<size_t>(o) * in;
    for (int i = 0; i < in; ++i) dwr[i] += g * x[i];
  }
  if (dx) {
    std::fill(dx, dx + in, T(0));
    for (int o = 0; o < out; ++o) {
      const T g = dy[o];
      const T* wr = weight + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) dx[i] += g * wr[i];
    }
  }
}

template <typename T>
void softmax(const T* logits, T* probs, int n) {
  T mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  T sum = 0;
  for (int i = 0; i < n; ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  const T inv = T(1) / sum;
  for (int i = 0; i < n; ++i) probs[i] *= inv;
}

inline constexpr double kLossEpsilon = 1e-12;

// Negative log-likelihood of the labelled class.
template <typename T>
T nll_loss(const T* probs, int label) {
  return -std::log(probs[label] + T(kLossEpsilon));
}

// d(loss)/d(logits) for softmax followed by nll_loss. The epsilon inside the
// log makes the exact gradient r*(p - y) with r = p_t / (p_t + eps).
template <typename T>
void softmax_nll_backward(const T* probs, int label, T* dlogits, int n) {
  const T r = probs[label] / (probs[label] + T(kLossEpsilon));
  for (int i = 0; i < n; ++i) dlogits[i] = r * probs[i];
  dlogits[label] -= r;
}

}  // namespace orient8::nn::kernels
