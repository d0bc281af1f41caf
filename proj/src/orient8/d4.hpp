#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace orient8::d4 {

// The 8 orientations of a 2D image: identity, the three flips (horizontal,
// vertical, both), and the four transforms that exchange the axes
// (transpose, rot90 cw, rot270 cw, anti-transpose). Label 0 is the identity.
using Label = int;

inline constexpr int kCount = 8;

inline constexpr bool is_valid(Label label) { return label >= 0 && label < kCount; }

// Labels 4..7 swap width and height.
inline constexpr bool swaps_extents(Label label) { return label >= 4; }

// Source-pixel coordinates read by target pixel (x, y) of transform `label`,
// where x indexes columns and y rows and (sx, sy) are the source extents.
// For labels 4..7 the target extents are (sy, sx). 0-based throughout: the
// reflection of column x is (sx-1)-x so that corners map to corners.
// Out-of-range (label, x, y) throws ArgumentError.
std::pair<int, int> coordinate_map(Label label, int x, int y, int sx, int sy);

struct TransformTables {
  // compose[i][j] = label of "transform j, then transform i".
  std::array<std::array<uint8_t, kCount>, kCount> compose;
  // inverse_action[i][k] = the j with compose[i][j] == k; this is the label
  // recovery step of majority voting.
  std::array<std::array<uint8_t, kCount>, kCount> inverse_action;
  // inverse[i] = inverse_action[i][0], the two-sided inverse of i.
  std::array<uint8_t, kCount> inverse;
};

// Builds the tables from coordinate_map by brute force: apply transform j
// then transform i to a 4x4 probe of 16 distinct values and match the result
// against the 8 single-transform images. The probe has no nontrivial
// self-symmetry, so the match is unique; a non-unique match would mean
// coordinate_map is broken and throws InternalError.
TransformTables derive_tables();

// Shared immutable instance, derived on first use.
const TransformTables& tables();

Label compose(const TransformTables& t, Label i, Label j);

// Returns j with compose(i, j) == k.
Label invert_label(const TransformTables& t, Label i, Label k);

}  // namespace orient8::d4
