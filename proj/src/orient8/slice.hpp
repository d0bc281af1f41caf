#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orient8/d4.hpp"

namespace orient8 {

enum class Modality : uint8_t { C0 = 0, LGE = 1, T2 = 2 };

const char* to_string(Modality m);
Modality modality_from_string(std::string_view s);

// One 2D image with acquisition metadata. Pixel layout is [channel][y][x],
// row-major, 32-bit floats. true_orientation, when known, is the label of
// the transform that produced this slice from its canonical form.
struct Slice {
  int channels = 1;
  int height = 0;
  int width = 0;
  std::vector<float> pixels;
  std::string patient_id;
  Modality modality = Modality::C0;
  std::optional<d4::Label> true_orientation;

  static Slice zeros(int channels, int height, int width);

  size_t pixel_count() const {
    return static_cast<size_t>(channels) * height * width;
  }
  float at(int c, int y, int x) const {
    return pixels[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float& at(int c, int y, int x) {
    return pixels[(static_cast<size_t>(c) * height + y) * width + x];
  }

  // Enforces height/width >= 2, channels >= 1, finite pixels, valid label.
  void validate() const;
};

// Z-scored pixels ready for the network; `source` records provenance.
struct NormalizedSlice {
  int channels = 1;
  int height = 0;
  int width = 0;
  std::vector<float> pixels;
  std::string source;
};

}  // namespace orient8
