#pragma once

#include <cstdint>

#include "orient8/slice.hpp"

namespace orient8::imgops {

// Label-preserving training perturbations. Geometric members of the
// orientation set are deliberately absent: a flip here would relabel the
// sample.
struct AugmentConfig {
  bool intensity = true;
  bool noise = true;
  bool shift = true;
  float scale_lo = 0.9f;
  float scale_hi = 1.1f;
  float noise_sigma_frac = 0.05f;  // sigma as a fraction of dynamic range
  float shift_frac = 0.05f;        // max translation per axis

  static AugmentConfig off() { return {false, false, false, 0, 0, 0, 0}; }
};

// Returns the image transformed by `label`. Labels 4..7 swap the output
// extents. If the input carries true orientation t, the output carries
// compose(label, t).
Slice apply_orientation(const Slice& slice, d4::Label label);

// Corner-aligned bilinear resize; out_h/out_w must be >= 2.
Slice resize_bilinear(const Slice& slice, int out_h, int out_w);

// Center crop when larger, symmetric pad with `fill` when smaller; an odd
// remainder goes to the bottom/right.
Slice crop_or_pad(const Slice& slice, int out_h, int out_w, float fill = 0.0f);

// Per-channel z-score; a constant channel maps to all zeros.
NormalizedSlice normalize(const Slice& slice);

// Deterministic given (seed, cfg): intensity scale, additive Gaussian noise,
// small zero-filled translation. Never a flip, rotation or transposition.
Slice augment(const Slice& slice, uint64_t rng_seed, const AugmentConfig& cfg);

// Grayscale-to-n replication used to feed single-channel data to a network
// expecting more channels.
Slice replicate_channels(const Slice& slice, int channels);

}  // namespace orient8::imgops
