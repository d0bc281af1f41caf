#pragma once

#include <vector>

#include "orient8/rng.hpp"
#include "orient8/slice.hpp"

inline orient8::Slice make_random_slice(orient8::Rng& rng, int channels,
                                        int height, int width) {
  orient8::Slice s = orient8::Slice::zeros(channels, height, width);
  for (auto& v : s.pixels) v = rng.uniform(-2.0f, 2.0f);
  s.patient_id = "t000";
  s.true_orientation = 0;
  return s;
}

inline bool pixels_equal(const orient8::Slice& a, const orient8::Slice& b) {
  return a.channels == b.channels && a.height == b.height &&
         a.width == b.width && a.pixels == b.pixels;
}
