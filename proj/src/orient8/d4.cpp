#include "orient8/d4.hpp"

#include <string>
#include <vector>

#include "orient8/errors.hpp"

namespace orient8::d4 {

namespace {

void check_label(Label label) {
  if (!is_valid(label)) {
    throw ArgumentError("orientation label " + std::to_string(label) +
                        " out of range [0,7]");
  }
}

// Transforms a w x h grid of ints; used only for table derivation.
std::vector<int> transform_grid(const std::vector<int>& src, int sx, int sy,
                                Label label) {
  const int ox = swaps_extents(label) ? sy : sx;
  const int oy = swaps_extents(label) ? sx : sy;
  std::vector<int> dst(static_cast<size_t>(ox) * oy);
  for (int y = 0; y < oy; ++y) {
    for (int x = 0; x < ox; ++x) {
      auto [px, py] = coordinate_map(label, x, y, sx, sy);
      dst[static_cast<size_t>(y) * ox + x] = src[static_cast<size_t>(py) * sx + px];
    }
  }
  return dst;
}

}  // namespace

std::pair<int, int> coordinate_map(Label label, int x, int y, int sx, int sy) {
  check_label(label);
  const int bx = swaps_extents(label) ? sy : sx;  // valid target extents
  const int by = swaps_extents(label) ? sx : sy;
  if (x < 0 || x >= bx || y < 0 || y >= by) {
    throw ArgumentError("target pixel (" + std::to_string(x) + "," +
                        std::to_string(y) + ") out of range for label " +
                        std::to_string(label) + " with source " +
                        std::to_string(sx) + "x" + std::to_string(sy));
  }
  const int mx = sx - 1;
  const int my = sy - 1;
  switch (label) {
    case 0: return {x, y};                 // initial state
    case 1: return {mx - x, y};            // horizontal flip
    case 2: return {x, my - y};            // vertical flip
    case 3: return {mx - x, my - y};       // rotate 180
    case 4: return {y, x};                 // flip along main diagonal
    case 5: return {y, my - x};            // rotate 90 cw
    case 6: return {mx - y, x};            // rotate 270 cw
    case 7: return {mx - y, my - x};       // flip along anti-diagonal
    default: return {x, y};                // unreachable
  }
}

TransformTables derive_tables() {
  constexpr int kSide = 4;
  std::vector<int> probe(kSide * kSide);
  for (int i = 0; i < kSide * kSide; ++i) probe[i] = i;

  std::array<std::vector<int>, kCount> singles;
  for (Label i = 0; i < kCount; ++i) singles[i] = transform_grid(probe, kSide, kSide, i);

  TransformTables t{};
  for (Label i = 0; i < kCount; ++i) {
    for (Label j = 0; j < kCount; ++j) {
      // j first, then i.
      std::vector<int> composed = transform_grid(singles[j], kSide, kSide, i);
      int match = -1;
      for (Label k = 0; k < kCount; ++k) {
        if (composed == singles[k]) {
          if (match != -1) {
            throw InternalError("non-unique transform match for compose(" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
          }
          match = k;
        }
      }
      if (match == -1) {
        throw InternalError("no transform match for compose(" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
      t.compose[i][j] = static_cast<uint8_t>(match);
    }
  }

  for (Label i = 0; i < kCount; ++i) {
    for (Label j = 0; j < kCount; ++j) {
      t.inverse_action[i][t.compose[i][j]] = static_cast<uint8_t>(j);
    }
    t.inverse[i] = t.inverse_action[i][0];
  }
  return t;
}

const TransformTables& tables() {
  static const TransformTables t = derive_tables();
  return t;
}

Label compose(const TransformTables& t, Label i, Label j) {
  check_label(i);
  check_label(j);
  return t.compose[i][j];
}

Label invert_label(const TransformTables& t, Label i, Label k) {
  check_label(i);
  check_label(k);
  return t.inverse_action[i][k];
}

}  // namespace orient8::d4
