// Exercises the public C interface against the shared library, including the
// error-code contract.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "orient8.h"

namespace fs = std::filesystem;

namespace {

struct CapiWorkspace {
  fs::path dir;
  std::string data_dir;
  std::string ckpt;

  CapiWorkspace() {
    dir = fs::temp_directory_path() / "or8_capi_fixture";
    fs::remove_all(dir);
    fs::create_directories(dir);
    data_dir = (dir / "data").string();
    ckpt = (dir / "c0.or8w").string();

    or8_phantom_spec spec{};
    REQUIRE(or8_phantom_spec_default(&spec) == OR8_OK);
    spec.n_patients = 8;
    spec.slices_per_patient = 2;
    spec.image_size = 16;
    spec.seed = 11;
    REQUIRE(or8_generate_dataset(&spec, data_dir.c_str()) == OR8_OK);

    or8_train_options opt{};
    REQUIRE(or8_train_options_default(&opt) == OR8_OK);
    opt.epochs = 6;
    opt.lr = 2e-3;
    opt.seed = 11;
    opt.input_size = 16;
    opt.conv_channels[0] = 4;
    opt.conv_channels[1] = 8;
    opt.conv_channels[2] = 16;
    opt.hidden_units = 32;
    REQUIRE(or8_train(data_dir.c_str(), "C0", &opt, nullptr, ckpt.c_str(),
                      (dir / "log.csv").string().c_str()) == OR8_OK);
  }
};

CapiWorkspace& workspace() {
  static CapiWorkspace ws;
  return ws;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(or8_version()) == "1.0.0");
  CHECK(std::string(or8_status_name(OR8_OK)) == "ok");
  CHECK(std::string(or8_status_name(OR8_ERR_FORMAT)) == "format-error");
}

TEST_CASE("tables: matrices, scalar lookups and argument errors") {
  or8_tables* tables = nullptr;
  REQUIRE(or8_tables_create(&tables) == OR8_OK);

  int compose[64], inverse_action[64];
  REQUIRE(or8_tables_compose_matrix(tables, compose) == OR8_OK);
  REQUIRE(or8_tables_inverse_action_matrix(tables, inverse_action) == OR8_OK);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(compose[i * 8 + j] == kComposeRef[i][j]);
      CHECK(inverse_action[i * 8 + j] == kInverseActionRef[i][j]);
    }
  }

  int out = -1;
  CHECK(or8_tables_compose(tables, 7, 4, &out) == OR8_OK);
  CHECK(out == 3);
  CHECK(or8_tables_invert_label(tables, 5, 0, &out) == OR8_OK);
  CHECK(out == 6);
  for (int i = 0; i < 8; ++i) {
    CHECK(or8_tables_inverse(tables, i, &out) == OR8_OK);
    CHECK(out == kInverseRef[i]);
  }

  CHECK(or8_tables_compose(tables, 9, 0, &out) == OR8_ERR_ARGUMENT);
  CHECK(std::strlen(or8_last_error()) > 0);
  CHECK(or8_tables_compose(nullptr, 0, 0, &out) == OR8_ERR_ARGUMENT);
  or8_tables_destroy(tables);
}

TEST_CASE("slices: create, transform, metadata and file round trip") {
  const std::vector<float> pixels = {1, 2, 3, 4};
  or8_slice* slice = nullptr;
  REQUIRE(or8_slice_create(1, 2, 2, pixels.data(), &slice) == OR8_OK);

  int c = 0, h = 0, w = 0;
  CHECK(or8_slice_dims(slice, &c, &h, &w) == OR8_OK);
  CHECK(c == 1);
  CHECK(h == 2);
  CHECK(w == 2);

  int label = -2;
  CHECK(or8_slice_orientation(slice, &label) == OR8_OK);
  CHECK(label == -1);
  CHECK(or8_slice_set_orientation(slice, 0) == OR8_OK);

  or8_slice* rotated = nullptr;
  REQUIRE(or8_slice_apply_orientation(slice, 5, &rotated) == OR8_OK);
  std::array<float, 4> got{};
  REQUIRE(or8_slice_pixels(rotated, got.data(), got.size()) == OR8_OK);
  CHECK(got == std::array<float, 4>{3, 1, 4, 2});
  CHECK(or8_slice_orientation(rotated, &label) == OR8_OK);
  CHECK(label == 5);

  float too_small[2];
  CHECK(or8_slice_pixels(rotated, too_small, 2) == OR8_ERR_SHAPE);

  const std::string path = (workspace().dir / "roundtrip.ori8").string();
  CHECK(or8_slice_write(rotated, path.c_str()) == OR8_OK);
  or8_slice* reread = nullptr;
  REQUIRE(or8_slice_read(path.c_str(), &reread) == OR8_OK);
  REQUIRE(or8_slice_pixels(reread, got.data(), got.size()) == OR8_OK);
  CHECK(got == std::array<float, 4>{3, 1, 4, 2});

  or8_slice_destroy(reread);
  or8_slice_destroy(rotated);
  or8_slice_destroy(slice);
}

TEST_CASE("dataset generation writes volumes plus manifest") {
  auto& ws = workspace();
  CHECK(fs::exists(fs::path(ws.data_dir) / "manifest.tsv"));
  CHECK(fs::exists(fs::path(ws.data_dir) / "p000" / "C0_0.ori8"));
  CHECK(fs::exists(fs::path(ws.data_dir) / "p007" / "T2_1.ori8"));

  std::ifstream manifest(fs::path(ws.data_dir) / "manifest.tsv");
  int lines = 0;
  std::string line;
  while (std::getline(manifest, line)) ++lines;
  CHECK(lines == 8 * 2 * 3);
}

TEST_CASE("trained checkpoint evaluates and predicts through the C surface") {
  auto& ws = workspace();
  CHECK(fs::exists(ws.ckpt));
  CHECK(!fs::exists(ws.ckpt + ".lastgood"));  // cleaned up after success

  double accuracy = 0;
  REQUIRE(or8_evaluate(ws.data_dir.c_str(), "C0", ws.ckpt.c_str(), "voting", 11,
                       nullptr, nullptr, &accuracy) == OR8_OK);
  CHECK(accuracy >= 0.9);

  or8_network* net = nullptr;
  REQUIRE(or8_network_load(ws.ckpt.c_str(), &net) == OR8_OK);
  int input_size = 0;
  CHECK(or8_network_input_size(net, &input_size) == OR8_OK);
  CHECK(input_size == 16);

  or8_slice* canonical = nullptr;
  REQUIRE(or8_slice_read(
              (fs::path(ws.data_dir) / "p000" / "C0_0.ori8").string().c_str(),
              &canonical) == OR8_OK);

  float probs[8] = {};
  REQUIRE(or8_predict_probs(net, canonical, probs) == OR8_OK);
  double sum = 0;
  for (float p : probs) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));

  for (int i = 0; i < 8; ++i) {
    CAPTURE(i);
    or8_slice* variant = nullptr;
    REQUIRE(or8_slice_apply_orientation(canonical, i, &variant) == OR8_OK);

    int label = -1;
    REQUIRE(or8_predict(net, variant, "voting", &label) == OR8_OK);
    CHECK(label == i);

    or8_slice* corrected = nullptr;
    int predicted = -1;
    REQUIRE(or8_reorient(net, variant, &corrected, &predicted) == OR8_OK);
    CHECK(predicted == i);
    int c, h, w;
    or8_slice_dims(canonical, &c, &h, &w);
    std::vector<float> a(static_cast<size_t>(c) * h * w), b(a.size());
    or8_slice_pixels(canonical, a.data(), a.size());
    or8_slice_pixels(corrected, b.data(), b.size());
    CHECK(a == b);

    or8_slice_destroy(corrected);
    or8_slice_destroy(variant);
  }

  int label = -1;
  CHECK(or8_predict(net, canonical, "nonsense", &label) == OR8_ERR_ARGUMENT);

  or8_slice_destroy(canonical);
  or8_network_destroy(net);
}

TEST_CASE("error contract: io, format and shape failures") {
  auto& ws = workspace();

  or8_network* net = nullptr;
  CHECK(or8_network_load("/definitely/missing.or8w", &net) == OR8_ERR_IO);
  CHECK(std::strlen(or8_last_error()) > 0);

  const std::string garbage = (ws.dir / "garbage.or8w").string();
  std::ofstream(garbage, std::ios::binary) << "not a checkpoint at all";
  CHECK(or8_network_load(garbage.c_str(), &net) == OR8_ERR_FORMAT);

  or8_slice* slice = nullptr;
  CHECK(or8_slice_read((ws.dir / "missing.ori8").string().c_str(), &slice) ==
        OR8_ERR_IO);
  const std::string bad_img = (ws.dir / "bad.ori8").string();
  std::ofstream(bad_img, std::ios::binary) << "XXXX00000000000000000000";
  CHECK(or8_slice_read(bad_img.c_str(), &slice) == OR8_ERR_FORMAT);

  // Incompatible init checkpoint: same data, different architecture.
  or8_train_options opt{};
  REQUIRE(or8_train_options_default(&opt) == OR8_OK);
  opt.epochs = 1;
  opt.input_size = 16;
  opt.conv_channels[0] = 4;
  opt.conv_channels[1] = 8;
  opt.conv_channels[2] = 16;
  opt.hidden_units = 24;  // differs from the pretrained 32
  const std::string out = (ws.dir / "transfer.or8w").string();
  CHECK(or8_train(ws.data_dir.c_str(), "LGE", &opt, ws.ckpt.c_str(), out.c_str(),
                  nullptr) == OR8_ERR_SHAPE);
  CHECK(std::string(or8_last_error()).find("hidden_units") != std::string::npos);

  // Unknown modality.
  CHECK(or8_train(ws.data_dir.c_str(), "XX", &opt, nullptr, out.c_str(),
                  nullptr) == OR8_ERR_ARGUMENT);
}

TEST_CASE("sweep produces the grid files through the C surface") {
  auto& ws = workspace();
  or8_train_options opt{};
  REQUIRE(or8_train_options_default(&opt) == OR8_OK);
  opt.epochs = 3;
  opt.lr = 2e-3;
  opt.seed = 11;
  opt.input_size = 16;
  opt.conv_channels[0] = 4;
  opt.conv_channels[1] = 8;
  opt.conv_channels[2] = 16;
  opt.hidden_units = 32;

  const double fractions[2] = {0.5, 0.25};
  const std::string csv = (ws.dir / "sweep.csv").string();
  const std::string jsonl = (ws.dir / "sweep.jsonl").string();
  REQUIRE(or8_sweep(ws.data_dir.c_str(), fractions, 2, &opt, csv.c_str(),
                    jsonl.c_str()) == OR8_OK);

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "fraction,voting_C0,voting_LGE,voting_T2,direct_C0,direct_LGE,direct_T2");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  std::ifstream jl(jsonl);
  int cells = 0;
  while (std::getline(jl, line)) ++cells;
  CHECK(cells == 2 * 3 * 2);
}
