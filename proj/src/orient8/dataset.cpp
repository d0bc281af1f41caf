#include "orient8/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "orient8/errors.hpp"
#include "orient8/imageio.hpp"
#include "orient8/imgops.hpp"
#include "orient8/rng.hpp"

namespace fs = std::filesystem;

namespace orient8::data {

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::vector<std::string> Dataset::patient_ids() const {
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.slice.patient_id);
  return {ids.begin(), ids.end()};
}

std::array<Dataset, 3> split_by_patient(const std::vector<Volume>& volumes,
                                        const std::array<double, 3>& ratios,
                                        uint64_t seed) {
  double sum = 0;
  int nonzero = 0;
  for (double r : ratios) {
    if (r < 0) throw ArgumentError("split ratios must be nonnegative");
    sum += r;
    if (r > 0) ++nonzero;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ArgumentError("split ratios must sum to 1, got " + std::to_string(sum));
  }

  std::set<std::string> id_set;
  for (const auto& v : volumes) id_set.insert(v.patient_id);
  std::vector<std::string> patients(id_set.begin(), id_set.end());
  const int n = static_cast<int>(patients.size());
  if (n < nonzero) {
    throw ArgumentError("cannot split " + std::to_string(n) + " patients into " +
                        std::to_string(nonzero) + " nonempty subsets");
  }

  Rng rng(seed);
  rng.shuffle(patients);

  // Floor counts per subset; the rounding remainder goes to train.
  std::array<int, 3> counts{};
  for (int k = 0; k < 3; ++k) {
    counts[k] = static_cast<int>(std::floor(ratios[k] * n));
  }
  counts[0] += n - (counts[0] + counts[1] + counts[2]);

  std::map<std::string, Split> assignment;
  int at = 0;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < counts[k]; ++i) {
      assignment[patients[at++]] = static_cast<Split>(k);
    }
  }

  std::array<Dataset, 3> out;
  for (int k = 0; k < 3; ++k) out[k].split = static_cast<Split>(k);
  for (const auto& v : volumes) {
    Dataset& ds = out[static_cast<int>(assignment.at(v.patient_id))];
    for (const auto& s : v.slices) {
      ds.samples.push_back({s, s.true_orientation.value_or(0)});
    }
  }
  return out;
}

Dataset expand_orientations(const Dataset& ds) {
  for (const auto& s : ds.samples) {
    if (s.slice.true_orientation.value_or(-1) != 0) {
      throw ArgumentError("expand_orientations requires canonical inputs "
                          "(true orientation 0); got sample of patient " +
                          s.slice.patient_id + " without one");
    }
  }
  Dataset out;
  out.split = ds.split;
  out.samples.reserve(ds.samples.size() * d4::kCount);
  for (const auto& s : ds.samples) {
    for (d4::Label i = 0; i < d4::kCount; ++i) {
      out.samples.push_back({imgops::apply_orientation(s.slice, i), i});
    }
  }
  return out;
}

void save_volumes(const std::vector<Volume>& volumes, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<io::ManifestEntry> manifest;
  for (const auto& v : volumes) {
    fs::create_directories(fs::path(dir) / v.patient_id);
    for (size_t k = 0; k < v.slices.size(); ++k) {
      const std::string rel = v.patient_id + "/" + to_string(v.modality) + "_" +
                              std::to_string(k) + ".ori8";
      io::write_ori8(v.slices[k], (fs::path(dir) / rel).string());
      manifest.push_back({rel, v.patient_id, v.modality,
                          v.slices[k].true_orientation.value_or(0)});
    }
  }
  io::write_manifest(manifest, (fs::path(dir) / "manifest.tsv").string());
}

std::vector<Volume> load_volumes(const std::string& dir) {
  const auto entries = io::read_manifest((fs::path(dir) / "manifest.tsv").string());
  // Group by (patient, modality), preserving manifest order within a volume.
  std::map<std::pair<std::string, Modality>, Volume> groups;
  for (const auto& e : entries) {
    Slice s = io::read_ori8((fs::path(dir) / e.relative_path).string());
    if (s.patient_id != e.patient_id || s.modality != e.modality) {
      throw FormatError(e.relative_path + ": metadata disagrees with manifest");
    }
    auto& vol = groups[{e.patient_id, e.modality}];
    if (vol.slices.empty()) {
      vol.patient_id = e.patient_id;
      vol.modality = e.modality;
    } else if (vol.slices.front().height != s.height ||
               vol.slices.front().width != s.width ||
               vol.slices.front().channels != s.channels) {
      throw FormatError(e.relative_path + ": slice dims differ within volume " +
                        e.patient_id);
    }
    vol.slices.push_back(std::move(s));
  }
  std::vector<Volume> out;
  out.reserve(groups.size());
  for (auto& [key, vol] : groups) out.push_back(std::move(vol));
  return out;
}

std::vector<Volume> load_volumes(const std::string& dir, Modality modality) {
  std::vector<Volume> all = load_volumes(dir);
  std::vector<Volume> out;
  for (auto& v : all) {
    if (v.modality == modality) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace orient8::data
