#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "orient8/slice.hpp"

namespace orient8::data {

// All slices of one patient in one modality, apex to base.
struct Volume {
  std::string patient_id;
  Modality modality = Modality::C0;
  std::vector<Slice> slices;

  int slice_count() const { return static_cast<int>(slices.size()); }
};

enum class Split : uint8_t { train = 0, val = 1, test = 2 };
const char* to_string(Split s);

struct Sample {
  Slice slice;
  d4::Label label = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  Split split = Split::train;

  std::vector<std::string> patient_ids() const;  // unique, sorted
};

// Shuffles patients with `seed`, then partitions them by the three ratios
// (floor counts; the remainder goes to train). Ratios must sum to 1 and the
// patient count must cover the nonzero ratios. Slices never leave their
// patient's subset.
std::array<Dataset, 3> split_by_patient(const std::vector<Volume>& volumes,
                                        const std::array<double, 3>& ratios,
                                        uint64_t seed);

// Expands every sample into its 8 orientation variants: (transform i, label
// i) for i = 0..7. Requires all inputs to carry true orientation 0; run this
// after splitting so variants stay inside one subset.
Dataset expand_orientations(const Dataset& ds);

// Writes volumes under dir as <patient>/<modality>_<k>.ori8 plus a manifest,
// and loads them back (optionally filtered to one modality).
void save_volumes(const std::vector<Volume>& volumes, const std::string& dir);
std::vector<Volume> load_volumes(const std::string& dir);
std::vector<Volume> load_volumes(const std::string& dir, Modality modality);

}  // namespace orient8::data
