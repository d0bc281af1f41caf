#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "orient8/dataset.hpp"
#include "orient8/errors.hpp"
#include "orient8/imageio.hpp"
#include "orient8/imgops.hpp"
#include "orient8/phantom.hpp"
#include "testutil.hpp"

using namespace orient8;
using namespace orient8::data;

namespace fs = std::filesystem;

namespace {

PhantomSpec small_spec(Modality m = Modality::C0, float noise = 1.0f) {
  PhantomSpec spec;
  spec.n_patients = 5;
  spec.slices_per_patient = 3;
  spec.image_size = 32;
  spec.modality = m;
  spec.seed = 4242;
  spec.noise_level = noise;
  return spec;
}

double fraction_differing(const Slice& a, const Slice& b) {
  if (a.pixels.size() != b.pixels.size()) return 1.0;
  size_t diff = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    if (std::abs(a.pixels[i] - b.pixels[i]) > 1e-6f) ++diff;
  }
  return static_cast<double>(diff) / a.pixels.size();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("or8_dataio_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("phantoms: identical spec gives bit-identical volumes") {
  auto a = generate_phantoms(small_spec());
  auto b = generate_phantoms(small_spec());
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].patient_id == b[i].patient_id);
    REQUIRE(a[i].slices.size() == b[i].slices.size());
    for (size_t k = 0; k < a[i].slices.size(); ++k) {
      CHECK(a[i].slices[k].pixels == b[i].slices[k].pixels);
    }
  }
}

TEST_CASE("phantoms: distinct patient ids, canonical orientation, shared anatomy") {
  auto vols = generate_phantoms_all_modalities(small_spec());
  CHECK(vols.size() == 15);  // 5 patients x 3 modalities
  std::set<std::pair<std::string, Modality>> keys;
  for (const auto& v : vols) {
    CHECK(!v.patient_id.empty());
    keys.insert({v.patient_id, v.modality});
    for (const auto& s : v.slices) {
      REQUIRE(s.true_orientation.has_value());
      CHECK(*s.true_orientation == 0);
      s.validate();
    }
  }
  CHECK(keys.size() == 15);
}

TEST_CASE("phantoms: every nonidentity transform changes at least 1% of pixels") {
  for (float noise : {0.0f, 1.0f}) {
    CAPTURE(noise);
    for (Modality m : {Modality::C0, Modality::LGE, Modality::T2}) {
      auto vols = generate_phantoms(small_spec(m, noise));
      for (const auto& v : vols) {
        for (const auto& s : v.slices) {
          for (int i = 1; i < 8; ++i) {
            CAPTURE(v.patient_id);
            CAPTURE(i);
            CHECK(fraction_differing(s, imgops::apply_orientation(s, i)) >= 0.01);
          }
        }
      }
    }
  }
}

TEST_CASE("marker oracle: recovers every applied orientation exactly") {
  for (Modality m : {Modality::C0, Modality::LGE, Modality::T2}) {
    auto vols = generate_phantoms(small_spec(m, 0.0f));
    for (const auto& v : vols) {
      for (const auto& s : v.slices) {
        for (int i = 0; i < 8; ++i) {
          CAPTURE(v.patient_id);
          CAPTURE(i);
          CHECK(detect_orientation_marker(imgops::apply_orientation(s, i)) == i);
        }
      }
    }
  }
}

TEST_CASE("marker oracle: stays exact on noisy phantoms and under augmentation") {
  auto vols = generate_phantoms(small_spec(Modality::T2, 1.0f));
  imgops::AugmentConfig cfg;
  uint64_t seed = 0;
  for (const auto& v : vols) {
    for (const auto& s : v.slices) {
      for (int i = 0; i < 8; ++i) {
        Slice variant = imgops::apply_orientation(s, i);
        CHECK(detect_orientation_marker(variant) == i);
        Slice augmented = imgops::augment(variant, ++seed, cfg);
        CHECK(detect_orientation_marker(augmented) == i);
      }
    }
  }
}

TEST_CASE("split_by_patient: ratio arithmetic") {
  auto make_volumes = [](int n) {
    PhantomSpec spec = small_spec();
    spec.n_patients = n;
    spec.slices_per_patient = 1;
    spec.image_size = 16;
    return generate_phantoms(spec);
  };

  SUBCASE("10 patients split 5/3/2") {
    auto parts = split_by_patient(make_volumes(10), {0.5, 0.3, 0.2}, 1);
    CHECK(parts[0].patient_ids().size() == 5);
    CHECK(parts[1].patient_ids().size() == 3);
    CHECK(parts[2].patient_ids().size() == 2);
  }
  SUBCASE("45 patients split 23/13/9 with the remainder in train") {
    auto parts = split_by_patient(make_volumes(45), {0.5, 0.3, 0.2}, 1);
    CHECK(parts[0].patient_ids().size() == 23);
    CHECK(parts[1].patient_ids().size() == 13);
    CHECK(parts[2].patient_ids().size() == 9);
  }
  SUBCASE("patient sets are pairwise disjoint") {
    auto parts = split_by_patient(make_volumes(11), {0.5, 0.3, 0.2}, 7);
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        for (const auto& id : parts[a].patient_ids()) {
          const auto other = parts[b].patient_ids();
          CHECK(std::find(other.begin(), other.end(), id) == other.end());
        }
      }
    }
  }
  SUBCASE("deterministic given seed, reshuffled across seeds") {
    auto a = split_by_patient(make_volumes(12), {0.5, 0.3, 0.2}, 3);
    auto b = split_by_patient(make_volumes(12), {0.5, 0.3, 0.2}, 3);
    CHECK(a[0].patient_ids() == b[0].patient_ids());
    CHECK(a[2].patient_ids() == b[2].patient_ids());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(split_by_patient(make_volumes(2), {0.5, 0.3, 0.2}, 1),
                    ArgumentError);
    CHECK_THROWS_AS(split_by_patient(make_volumes(10), {0.5, 0.3, 0.3}, 1),
                    ArgumentError);
    CHECK_NOTHROW(split_by_patient(make_volumes(2), {0.7, 0.0, 0.3}, 1));
  }
}

TEST_CASE("expand_orientations: size, histogram and sibling round trip") {
  auto vols = generate_phantoms(small_spec());
  auto parts = split_by_patient(vols, {1.0, 0.0, 0.0}, 1);
  Dataset base = parts[0];
  Dataset expanded = expand_orientations(base);

  CHECK(expanded.samples.size() == 8 * base.samples.size());

  std::map<int, int> histogram;
  for (const auto& s : expanded.samples) ++histogram[s.label];
  REQUIRE(histogram.size() == 8);
  for (const auto& [label, count] : histogram) {
    CHECK(count == static_cast<int>(base.samples.size()));
  }

  // Sample with label i maps back to its label-0 sibling pixel for pixel.
  const auto& tb = d4::tables();
  for (size_t b = 0; b < base.samples.size(); ++b) {
    for (int i = 0; i < 8; ++i) {
      const auto& v = expanded.samples[8 * b + i];
      CHECK(v.label == i);
      Slice back = imgops::apply_orientation(v.slice, tb.inverse[i]);
      CHECK(pixels_equal(back, expanded.samples[8 * b].slice));
    }
  }

  // The full multiset is {patients} x {slice idx} x {labels}, exactly once.
  std::map<std::string, int> per_patient_label;
  for (const auto& s : expanded.samples) {
    ++per_patient_label[s.slice.patient_id + "#" + std::to_string(s.label)];
  }
  for (const auto& [key, count] : per_patient_label) {
    CHECK(count == small_spec().slices_per_patient);
  }

  // Non-canonical input is rejected.
  Dataset bad = base;
  bad.samples[0].slice.true_orientation = 3;
  CHECK_THROWS_AS(expand_orientations(bad), ArgumentError);
}

TEST_CASE("pgm: spec arithmetic on a known byte stream") {
  TempDir tmp;
  const auto path = (tmp.path / "tiny.pgm").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n2 2\n255\n";
    const char bytes[4] = {0x00, 0x01, 0x02, 0x03};
    out.write(bytes, 4);
  }
  Slice s = io::read_pgm(path);
  CHECK(s.channels == 1);
  CHECK(s.height == 2);
  CHECK(s.width == 2);
  CHECK(s.pixels[0] == 0.0f);
  CHECK(s.pixels[1] == doctest::Approx(1.0 / 255).epsilon(1e-7));
  CHECK(s.pixels[2] == doctest::Approx(2.0 / 255).epsilon(1e-7));
  CHECK(s.pixels[3] == doctest::Approx(3.0 / 255).epsilon(1e-7));
}

TEST_CASE("pgm: header errors") {
  TempDir tmp;
  SUBCASE("maxval 0") {
    const auto path = (tmp.path / "bad.pgm").string();
    std::ofstream(path, std::ios::binary) << "P5\n2 2\n0\n\0\0\0\0";
    CHECK_THROWS_WITH_AS(io::read_pgm(path), doctest::Contains("maxval"),
                         FormatError);
  }
  SUBCASE("wrong magic") {
    const auto path = (tmp.path / "bad2.pgm").string();
    std::ofstream(path, std::ios::binary) << "P6\n2 2\n255\n123412341234";
    CHECK_THROWS_WITH_AS(io::read_pgm(path), doctest::Contains("magic"),
                         FormatError);
  }
  SUBCASE("truncated data reports the offset") {
    const auto path = (tmp.path / "bad3.pgm").string();
    std::ofstream(path, std::ios::binary) << "P5\n4 4\n255\nxy";
    CHECK_THROWS_WITH_AS(io::read_pgm(path), doctest::Contains("offset"),
                         FormatError);
  }
}

TEST_CASE("pgm: 16-bit write/read round trip within quantization") {
  TempDir tmp;
  const auto path = (tmp.path / "wide.pgm").string();
  Slice s = Slice::zeros(1, 4, 4);
  for (int i = 0; i < 16; ++i) s.pixels[i] = i / 15.0f;
  io::write_pgm(s, path, 65535);
  Slice r = io::read_pgm(path);
  for (int i = 0; i < 16; ++i) {
    CHECK(r.pixels[i] == doctest::Approx(s.pixels[i]).epsilon(1e-4));
  }
}

TEST_CASE("ori8: lossless round trip including metadata") {
  TempDir tmp;
  Rng rng(61);
  Slice s = make_random_slice(rng, 3, 7, 5);
  s.patient_id = "p017";
  s.modality = Modality::LGE;
  s.true_orientation = 6;
  const auto path = (tmp.path / "x.ori8").string();
  io::write_ori8(s, path);
  Slice r = io::read_ori8(path);
  CHECK(r.pixels == s.pixels);
  CHECK(r.channels == 3);
  CHECK(r.height == 7);
  CHECK(r.width == 5);
  CHECK(r.patient_id == "p017");
  CHECK(r.modality == Modality::LGE);
  CHECK(r.true_orientation == 6);

  s.true_orientation.reset();
  io::write_ori8(s, path);
  CHECK(!io::read_ori8(path).true_orientation.has_value());
}

TEST_CASE("ori8: format errors carry byte offsets") {
  TempDir tmp;
  SUBCASE("bad magic") {
    const auto path = (tmp.path / "bad.ori8").string();
    std::ofstream(path, std::ios::binary) << "NOPE0000000000000000";
    CHECK_THROWS_WITH_AS(io::read_ori8(path), doctest::Contains("offset 0"),
                         FormatError);
  }
  SUBCASE("truncated pixels") {
    const auto path = (tmp.path / "trunc.ori8").string();
    Rng rng(67);
    io::write_ori8(make_random_slice(rng, 1, 8, 8), path);
    fs::resize_file(path, 40);
    CHECK_THROWS_WITH_AS(io::read_ori8(path), doctest::Contains("offset"),
                         FormatError);
  }
  SUBCASE("zero dims") {
    const auto path = (tmp.path / "dims.ori8").string();
    std::ofstream out(path, std::ios::binary);
    out.write("ORI8", 4);
    // version 1, channels 0, height 2, width 2
    const unsigned char rest[16] = {1, 0, 0, 0, 0, 0, 0, 0,
                                    2, 0, 0, 0, 2, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(rest), 16);
    out.close();
    CHECK_THROWS_WITH_AS(io::read_ori8(path), doctest::Contains("dimensions"),
                         FormatError);
  }
  SUBCASE("missing file is an IO error") {
    CHECK_THROWS_AS(io::read_ori8((tmp.path / "nope.ori8").string()), IoError);
  }
}

TEST_CASE("volumes: save/load round trip with manifest") {
  TempDir tmp;
  auto vols = generate_phantoms_all_modalities(small_spec());
  save_volumes(vols, tmp.path.string());
  CHECK(fs::exists(tmp.path / "manifest.tsv"));

  auto manifest = io::read_manifest((tmp.path / "manifest.tsv").string());
  CHECK(manifest.size() == 15 * 3);  // 5 patients x 3 modalities x 3 slices
  for (const auto& e : manifest) CHECK(e.label == 0);

  auto loaded = load_volumes(tmp.path.string());
  REQUIRE(loaded.size() == vols.size());
  std::map<std::pair<std::string, Modality>, const Volume*> by_key;
  for (const auto& v : loaded) by_key[{v.patient_id, v.modality}] = &v;
  for (const auto& v : vols) {
    const Volume* match = by_key.at({v.patient_id, v.modality});
    REQUIRE(match->slices.size() == v.slices.size());
    for (size_t k = 0; k < v.slices.size(); ++k) {
      CHECK(match->slices[k].pixels == v.slices[k].pixels);
    }
  }

  auto lge_only = load_volumes(tmp.path.string(), Modality::LGE);
  CHECK(lge_only.size() == 5);
  for (const auto& v : lge_only) CHECK(v.modality == Modality::LGE);
}

TEST_CASE("phantom spec validation") {
  PhantomSpec spec = small_spec();
  spec.n_patients = 0;
  CHECK_THROWS_AS(generate_phantoms(spec), ArgumentError);
  spec = small_spec();
  spec.image_size = 8;
  CHECK_THROWS_AS(generate_phantoms(spec), ArgumentError);
}
