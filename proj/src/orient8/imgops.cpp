#include "orient8/imgops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "orient8/errors.hpp"
#include "orient8/rng.hpp"

namespace orient8 {

const char* to_string(Modality m) {
  switch (m) {
    case Modality::C0: return "C0";
    case Modality::LGE: return "LGE";
    case Modality::T2: return "T2";
  }
  return "?";
}

Modality modality_from_string(std::string_view s) {
  if (s == "C0") return Modality::C0;
  if (s == "LGE") return Modality::LGE;
  if (s == "T2") return Modality::T2;
  throw ArgumentError("unknown modality '" + std::string(s) +
                      "' (expected C0, LGE or T2)");
}

Slice Slice::zeros(int channels, int height, int width) {
  Slice s;
  s.channels = channels;
  s.height = height;
  s.width = width;
  s.pixels.assign(static_cast<size_t>(channels) * height * width, 0.0f);
  return s;
}

void Slice::validate() const {
  if (channels < 1 || height < 2 || width < 2) {
    throw ArgumentError("slice dims " + std::to_string(channels) + "x" +
                        std::to_string(height) + "x" + std::to_string(width) +
                        " below minimum 1x2x2");
  }
  if (pixels.size() != pixel_count()) {
    throw ShapeError("slice pixel buffer holds " +
                     std::to_string(pixels.size()) + " values, expected " +
                     std::to_string(pixel_count()));
  }
  for (float v : pixels) {
    if (!std::isfinite(v)) throw ArgumentError("slice contains non-finite pixel");
  }
  if (true_orientation && !d4::is_valid(*true_orientation)) {
    throw ArgumentError("slice true_orientation out of range");
  }
}

namespace imgops {

Slice apply_orientation(const Slice& slice, d4::Label label) {
  if (!d4::is_valid(label)) {
    throw ArgumentError("orientation label " + std::to_string(label) +
                        " out of range [0,7]");
  }
  const int sx = slice.width;
  const int sy = slice.height;
  const int ow = d4::swaps_extents(label) ? sy : sx;
  const int oh = d4::swaps_extents(label) ? sx : sy;

  Slice out = slice;
  out.width = ow;
  out.height = oh;
  out.pixels.resize(slice.pixels.size());
  for (int c = 0; c < slice.channels; ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        auto [px, py] = d4::coordinate_map(label, x, y, sx, sy);
        out.at(c, y, x) = slice.at(c, py, px);
      }
    }
  }
  if (slice.true_orientation) {
    out.true_orientation = d4::compose(d4::tables(), label, *slice.true_orientation);
  }
  return out;
}

Slice resize_bilinear(const Slice& slice, int out_h, int out_w) {
  if (out_h < 2 || out_w < 2) {
    throw ArgumentError("resize target " + std::to_string(out_h) + "x" +
                        std::to_string(out_w) + " is degenerate (min 2x2)");
  }
  Slice out = slice;
  out.height = out_h;
  out.width = out_w;
  out.pixels.resize(static_cast<size_t>(slice.channels) * out_h * out_w);

  const double sy_step = static_cast<double>(slice.height - 1) / (out_h - 1);
  const double sx_step = static_cast<double>(slice.width - 1) / (out_w - 1);
  for (int c = 0; c < slice.channels; ++c) {
    for (int y = 0; y < out_h; ++y) {
      const double fy = y * sy_step;
      const int y0 = std::min(static_cast<int>(fy), slice.height - 2);
      const double wy = fy - y0;
      for (int x = 0; x < out_w; ++x) {
        const double fx = x * sx_step;
        const int x0 = std::min(static_cast<int>(fx), slice.width - 2);
        const double wx = fx - x0;
        const double v00 = slice.at(c, y0, x0);
        const double v01 = slice.at(c, y0, x0 + 1);
        const double v10 = slice.at(c, y0 + 1, x0);
        const double v11 = slice.at(c, y0 + 1, x0 + 1);
        out.at(c, y, x) = static_cast<float>((1 - wy) * ((1 - wx) * v00 + wx * v01) +
                                             wy * ((1 - wx) * v10 + wx * v11));
      }
    }
  }
  return out;
}

Slice crop_or_pad(const Slice& slice, int out_h, int out_w, float fill) {
  if (out_h < 2 || out_w < 2) {
    throw ArgumentError("crop_or_pad target " + std::to_string(out_h) + "x" +
                        std::to_string(out_w) + " is degenerate (min 2x2)");
  }
  Slice out = slice;
  out.height = out_h;
  out.width = out_w;
  out.pixels.assign(static_cast<size_t>(slice.channels) * out_h * out_w, fill);

  // src_off when cropping, dst_off when padding; floor keeps the extra
  // row/column at the bottom/right.
  const int src_y = std::max(0, (slice.height - out_h) / 2);
  const int src_x = std::max(0, (slice.width - out_w) / 2);
  const int dst_y = std::max(0, (out_h - slice.height) / 2);
  const int dst_x = std::max(0, (out_w - slice.width) / 2);
  const int copy_h = std::min(slice.height, out_h);
  const int copy_w = std::min(slice.width, out_w);

  for (int c = 0; c < slice.channels; ++c) {
    for (int y = 0; y < copy_h; ++y) {
      for (int x = 0; x < copy_w; ++x) {
        out.at(c, dst_y + y, dst_x + x) = slice.at(c, src_y + y, src_x + x);
      }
    }
  }
  return out;
}

NormalizedSlice normalize(const Slice& slice) {
  NormalizedSlice out;
  out.channels = slice.channels;
  out.height = slice.height;
  out.width = slice.width;
  out.pixels.resize(slice.pixels.size());
  out.source = slice.patient_id + "/" + to_string(slice.modality);

  const size_t plane = static_cast<size_t>(slice.height) * slice.width;
  for (int c = 0; c < slice.channels; ++c) {
    const float* src = slice.pixels.data() + c * plane;
    float* dst = out.pixels.data() + c * plane;
    double sum = 0.0;
    for (size_t i = 0; i < plane; ++i) sum += src[i];
    const double mean = sum / static_cast<double>(plane);
    double var = 0.0;
    for (size_t i = 0; i < plane; ++i) {
      const double d = src[i] - mean;
      var += d * d;
    }
    const double stddev = std::sqrt(var / static_cast<double>(plane));
    if (stddev <= 1e-7 * std::max(1.0, std::abs(mean))) {
      std::fill(dst, dst + plane, 0.0f);
    } else {
      const double inv = 1.0 / stddev;
      for (size_t i = 0; i < plane; ++i) {
        dst[i] = static_cast<float>((src[i] - mean) * inv);
      }
    }
  }
  return out;
}

Slice augment(const Slice& slice, uint64_t rng_seed, const AugmentConfig& cfg) {
  Rng rng(rng_seed);
  Slice out = slice;

  float scale = 1.0f;
  if (cfg.intensity) scale = rng.uniform(cfg.scale_lo, cfg.scale_hi);

  int dx = 0, dy = 0;
  if (cfg.shift) {
    const int max_dx = static_cast<int>(cfg.shift_frac * slice.width);
    const int max_dy = static_cast<int>(cfg.shift_frac * slice.height);
    if (max_dx > 0) dx = static_cast<int>(rng.bounded(2 * max_dx + 1)) - max_dx;
    if (max_dy > 0) dy = static_cast<int>(rng.bounded(2 * max_dy + 1)) - max_dy;
  }

  float sigma = 0.0f;
  if (cfg.noise) {
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    for (float v : slice.pixels) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sigma = cfg.noise_sigma_frac * std::max(0.0f, hi - lo);
  }

  for (size_t i = 0; i < out.pixels.size(); ++i) {
    float v = slice.pixels[i] * scale;
    if (sigma > 0.0f) v += sigma * rng.normal();
    out.pixels[i] = v;
  }

  if (dx != 0 || dy != 0) {
    Slice shifted = out;
    std::fill(shifted.pixels.begin(), shifted.pixels.end(), 0.0f);
    for (int c = 0; c < out.channels; ++c) {
      for (int y = 0; y < out.height; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= out.height) continue;
        for (int x = 0; x < out.width; ++x) {
          const int sx = x - dx;
          if (sx < 0 || sx >= out.width) continue;
          shifted.at(c, y, x) = out.at(c, sy, sx);
        }
      }
    }
    out = std::move(shifted);
  }
  return out;
}

Slice replicate_channels(const Slice& slice, int channels) {
  if (slice.channels == channels) return slice;
  if (slice.channels != 1) {
    throw ShapeError("cannot replicate " + std::to_string(slice.channels) +
                     "-channel slice to " + std::to_string(channels) + " channels");
  }
  Slice out = slice;
  out.channels = channels;
  out.pixels.resize(static_cast<size_t>(channels) * slice.height * slice.width);
  const size_t plane = static_cast<size_t>(slice.height) * slice.width;
  for (int c = 1; c < channels; ++c) {
    std::copy(slice.pixels.begin(), slice.pixels.begin() + plane,
              out.pixels.begin() + c * plane);
  }
  return out;
}

}  // namespace imgops
}  // namespace orient8
