#pragma once

#include <cstdint>
#include <vector>

#include "orient8/dataset.hpp"

namespace orient8::data {

// Synthetic short-axis cardiac phantom: concentric rotated ellipses (blood
// pool, myocardium, RV crescent) on a body disc, plus one small high-value
// marker block placed off-center and off both diagonals. The marker
// guarantees that no generated slice has a nontrivial square symmetry and
// makes the applied orientation recoverable by rule alone.
struct PhantomSpec {
  int n_patients = 10;
  int slices_per_patient = 5;
  int image_size = 64;
  Modality modality = Modality::C0;
  uint64_t seed = 0;
  float noise_level = 1.0f;  // scales the per-modality noise sigma; 0 = clean

  void validate() const;
};

// One volume per patient, anatomy shared across modalities for a given
// (seed, patient), appearance and noise per modality. Deterministic given
// the spec. Every slice carries true orientation 0.
std::vector<Volume> generate_phantoms(const PhantomSpec& spec);

// Same patients across all three modalities.
std::vector<Volume> generate_phantoms_all_modalities(PhantomSpec spec);

// Rule-based orientation oracle: locates the marker (box-filtered argmax)
// and reads the label from which octant of the image it landed in. Exact on
// clean phantoms; independent of any trained model.
d4::Label detect_orientation_marker(const Slice& slice);

}  // namespace orient8::data
