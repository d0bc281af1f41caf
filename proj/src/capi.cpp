#include "orient8.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "orient8/checkpoint.hpp"
#include "orient8/d4.hpp"
#include "orient8/dataset.hpp"
#include "orient8/errors.hpp"
#include "orient8/imageio.hpp"
#include "orient8/imgops.hpp"
#include "orient8/phantom.hpp"
#include "orient8/pipeline.hpp"
#include "orient8/rng.hpp"

namespace fs = std::filesystem;

using namespace orient8;

struct or8_tables {
  d4::TransformTables t;
};

struct or8_slice {
  Slice s;
};

struct or8_network {
  nn::Network net;
};

namespace {

thread_local std::string t_last_error;

template <typename Fn>
or8_status wrap(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return OR8_OK;
  } catch (const ArgumentError& e) {
    t_last_error = e.what();
    return OR8_ERR_ARGUMENT;
  } catch (const IoError& e) {
    t_last_error = e.what();
    return OR8_ERR_IO;
  } catch (const FormatError& e) {
    t_last_error = e.what();
    return OR8_ERR_FORMAT;
  } catch (const DivergedError& e) {
    t_last_error = e.what();
    return OR8_ERR_DIVERGED;
  } catch (const ShapeError& e) {
    t_last_error = e.what();
    return OR8_ERR_SHAPE;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return OR8_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}

pipeline::TrainConfig config_from(const or8_train_options& o) {
  pipeline::TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size;
  cfg.lr = o.lr;
  cfg.seed = o.seed;
  cfg.train_fraction = o.train_fraction;
  cfg.freeze_conv = o.freeze_conv != 0;
  cfg.network.input_size = o.input_size;
  cfg.network.in_channels = o.in_channels;
  cfg.network.conv_channels = {o.conv_channels[0], o.conv_channels[1],
                               o.conv_channels[2]};
  cfg.network.hidden_units = o.hidden_units;
  cfg.network.seed = static_cast<uint32_t>(o.seed);
  if (!o.augment) cfg.augment = imgops::AugmentConfig::off();
  return cfg;
}

// Deterministic patient-level subsample of a dataset.
data::Dataset subsample_patients(const data::Dataset& ds, double fraction,
                                 uint64_t seed) {
  if (fraction >= 1.0) return ds;
  auto patients = ds.patient_ids();
  Rng rng(derive_seed(seed, 0x66726163));
  rng.shuffle(patients);
  const size_t keep = std::max<size_t>(
      1, static_cast<size_t>(std::floor(fraction * patients.size())));
  patients.resize(keep);
  data::Dataset out;
  out.split = ds.split;
  for (const auto& s : ds.samples) {
    if (std::find(patients.begin(), patients.end(), s.slice.patient_id) !=
        patients.end()) {
      out.samples.push_back(s);
    }
  }
  return out;
}

constexpr std::array<double, 3> kDefaultRatios = {0.5, 0.3, 0.2};

}  // namespace

extern "C" {

const char* or8_version(void) { return "1.0.0"; }

const char* or8_status_name(or8_status status) {
  switch (status) {
    case OR8_OK: return "ok";
    case OR8_ERR_ARGUMENT: return "argument-error";
    case OR8_ERR_IO: return "io-error";
    case OR8_ERR_FORMAT: return "format-error";
    case OR8_ERR_DIVERGED: return "diverged";
    case OR8_ERR_SHAPE: return "shape-error";
    case OR8_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* or8_last_error(void) { return t_last_error.c_str(); }

or8_status or8_tables_create(or8_tables** out) {
  return wrap([&] {
    require(out != nullptr, "out must not be null");
    *out = new or8_tables{d4::derive_tables()};
  });
}

void or8_tables_destroy(or8_tables* tables) { delete tables; }

or8_status or8_tables_compose(const or8_tables* tables, int i, int j, int* out) {
  return wrap([&] {
    require(tables && out, "tables and out must not be null");
    *out = d4::compose(tables->t, i, j);
  });
}

or8_status or8_tables_invert_label(const or8_tables* tables, int i, int k,
                                   int* out) {
  return wrap([&] {
    require(tables && out, "tables and out must not be null");
    *out = d4::invert_label(tables->t, i, k);
  });
}

or8_status or8_tables_inverse(const or8_tables* tables, int i, int* out) {
  return wrap([&] {
    require(tables && out, "tables and out must not be null");
    require(d4::is_valid(i), "label out of range [0,7]");
    *out = tables->t.inverse[i];
  });
}

or8_status or8_tables_compose_matrix(const or8_tables* tables, int out[64]) {
  return wrap([&] {
    require(tables && out, "tables and out must not be null");
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) out[i * 8 + j] = tables->t.compose[i][j];
  });
}

or8_status or8_tables_inverse_action_matrix(const or8_tables* tables, int out[64]) {
  return wrap([&] {
    require(tables && out, "tables and out must not be null");
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) out[i * 8 + j] = tables->t.inverse_action[i][j];
  });
}

or8_status or8_slice_create(int channels, int height, int width,
                            const float* pixels, or8_slice** out) {
  return wrap([&] {
    require(pixels && out, "pixels and out must not be null");
    Slice s = Slice::zeros(channels, height, width);
    std::memcpy(s.pixels.data(), pixels, s.pixel_count() * sizeof(float));
    s.validate();
    *out = new or8_slice{std::move(s)};
  });
}

or8_status or8_slice_read(const char* path, or8_slice** out) {
  return wrap([&] {
    require(path && out, "path and out must not be null");
    *out = new or8_slice{io::read_image(path)};
  });
}

or8_status or8_slice_write(const or8_slice* slice, const char* path) {
  return wrap([&] {
    require(slice && path, "slice and path must not be null");
    io::write_image(slice->s, path);
  });
}

void or8_slice_destroy(or8_slice* slice) { delete slice; }

or8_status or8_slice_dims(const or8_slice* slice, int* channels, int* height,
                          int* width) {
  return wrap([&] {
    require(slice != nullptr, "slice must not be null");
    if (channels) *channels = slice->s.channels;
    if (height) *height = slice->s.height;
    if (width) *width = slice->s.width;
  });
}

or8_status or8_slice_pixels(const or8_slice* slice, float* out, size_t capacity) {
  return wrap([&] {
    require(slice && out, "slice and out must not be null");
    const size_t n = slice->s.pixel_count();
    if (capacity < n) {
      throw ShapeError("pixel buffer capacity " + std::to_string(capacity) +
                       " below required " + std::to_string(n));
    }
    std::memcpy(out, slice->s.pixels.data(), n * sizeof(float));
  });
}

or8_status or8_slice_orientation(const or8_slice* slice, int* label) {
  return wrap([&] {
    require(slice && label, "slice and label must not be null");
    *label = slice->s.true_orientation.value_or(-1);
  });
}

or8_status or8_slice_set_orientation(or8_slice* slice, int label) {
  return wrap([&] {
    require(slice != nullptr, "slice must not be null");
    if (label == -1) {
      slice->s.true_orientation.reset();
    } else {
      require(d4::is_valid(label), "label out of range [0,7]");
      slice->s.true_orientation = label;
    }
  });
}

or8_status or8_slice_apply_orientation(const or8_slice* slice, int label,
                                       or8_slice** out) {
  return wrap([&] {
    require(slice && out, "slice and out must not be null");
    *out = new or8_slice{imgops::apply_orientation(slice->s, label)};
  });
}

or8_status or8_phantom_spec_default(or8_phantom_spec* spec) {
  return wrap([&] {
    require(spec != nullptr, "spec must not be null");
    *spec = {};
    spec->n_patients = 45;
    spec->slices_per_patient = 5;
    spec->image_size = 64;
    spec->modality = "all";
    spec->seed = 0;
    spec->noise_level = 1.0f;
  });
}

or8_status or8_generate_dataset(const or8_phantom_spec* spec, const char* out_dir) {
  return wrap([&] {
    require(spec && out_dir, "spec and out_dir must not be null");
    require(spec->modality != nullptr, "modality must not be null");
    data::PhantomSpec ps;
    ps.n_patients = spec->n_patients;
    ps.slices_per_patient = spec->slices_per_patient;
    ps.image_size = spec->image_size;
    ps.seed = spec->seed;
    ps.noise_level = spec->noise_level;
    std::vector<data::Volume> volumes;
    if (std::string_view(spec->modality) == "all") {
      volumes = data::generate_phantoms_all_modalities(ps);
    } else {
      ps.modality = modality_from_string(spec->modality);
      volumes = data::generate_phantoms(ps);
    }
    data::save_volumes(volumes, out_dir);
  });
}

or8_status or8_train_options_default(or8_train_options* options) {
  return wrap([&] {
    require(options != nullptr, "options must not be null");
    *options = {};
    options->epochs = 30;
    options->batch_size = 32;
    options->lr = 1e-3;
    options->seed = 0;
    options->train_fraction = 1.0;
    options->freeze_conv = 0;
    options->augment = 1;
    options->input_size = 64;
    options->in_channels = 3;
    options->conv_channels[0] = 8;
    options->conv_channels[1] = 16;
    options->conv_channels[2] = 32;
    options->hidden_units = 64;
  });
}

or8_status or8_train(const char* data_dir, const char* modality,
                     const or8_train_options* options, const char* init_checkpoint,
                     const char* out_checkpoint, const char* log_csv) {
  return wrap([&] {
    require(data_dir && modality && options && out_checkpoint,
            "data_dir, modality, options and out_checkpoint must not be null");
    const auto volumes = data::load_volumes(data_dir, modality_from_string(modality));
    if (volumes.empty()) {
      throw ArgumentError(std::string("no ") + modality + " volumes in " + data_dir);
    }

    pipeline::TrainConfig cfg = config_from(*options);
    auto parts = data::split_by_patient(volumes, kDefaultRatios, cfg.seed);
    data::Dataset train_base = subsample_patients(parts[0], cfg.train_fraction,
                                                  cfg.seed);
    data::Dataset train_set = data::expand_orientations(train_base);
    data::Dataset val_set = data::expand_orientations(parts[1]);

    const std::string lastgood = std::string(out_checkpoint) + ".lastgood";
    pipeline::TrainResult result =
        init_checkpoint
            ? pipeline::transfer(nn::load_checkpoint(init_checkpoint), train_set,
                                 val_set, cfg, lastgood)
            : pipeline::train(train_set, val_set, cfg, lastgood);

    nn::save_checkpoint(result.net, out_checkpoint);
    std::error_code ec;
    fs::remove(lastgood, ec);
    if (log_csv) pipeline::write_train_log(result.log, log_csv);
  });
}

or8_status or8_evaluate(const char* data_dir, const char* modality,
                        const char* checkpoint, const char* method, uint64_t seed,
                        const char* report_csv, const char* report_jsonl,
                        double* accuracy_out) {
  return wrap([&] {
    require(data_dir && modality && checkpoint && method,
            "data_dir, modality, checkpoint and method must not be null");
    const auto volumes = data::load_volumes(data_dir, modality_from_string(modality));
    if (volumes.empty()) {
      throw ArgumentError(std::string("no ") + modality + " volumes in " + data_dir);
    }
    auto parts = data::split_by_patient(volumes, kDefaultRatios, seed);
    data::Dataset test_set = data::expand_orientations(parts[2]);

    nn::Network net = nn::load_checkpoint(checkpoint);
    pipeline::EvalReport report =
        pipeline::evaluate(net, test_set, pipeline::method_from_string(method));
    if (report_csv) pipeline::write_eval_report_csv(report, modality, report_csv);
    if (report_jsonl) pipeline::write_eval_report_jsonl(report, modality, report_jsonl);
    if (accuracy_out) *accuracy_out = report.accuracy;
  });
}

or8_status or8_sweep(const char* data_dir, const double* fractions, int n_fractions,
                     const or8_train_options* options, const char* out_csv,
                     const char* out_jsonl) {
  return wrap([&] {
    require(data_dir && options, "data_dir and options must not be null");
    std::vector<double> f;
    if (fractions && n_fractions > 0) {
      f.assign(fractions, fractions + n_fractions);
    } else {
      f = {0.6, 0.5, 0.4, 0.3, 0.2};
    }
    const auto volumes = data::load_volumes(data_dir);
    const auto cells = pipeline::sensitivity_sweep(volumes, f, config_from(*options));
    if (out_csv) pipeline::write_sweep_csv(cells, out_csv);
    if (out_jsonl) pipeline::write_sweep_jsonl(cells, out_jsonl);
  });
}

or8_status or8_network_load(const char* path, or8_network** out) {
  return wrap([&] {
    require(path && out, "path and out must not be null");
    *out = new or8_network{nn::load_checkpoint(path)};
  });
}

void or8_network_destroy(or8_network* network) { delete network; }

or8_status or8_network_input_size(const or8_network* network, int* out) {
  return wrap([&] {
    require(network && out, "network and out must not be null");
    *out = network->net.config().input_size;
  });
}

or8_status or8_predict(const or8_network* network, const or8_slice* slice,
                       const char* method, int* label_out) {
  return wrap([&] {
    require(network && slice && method && label_out,
            "network, slice, method and label_out must not be null");
    switch (pipeline::method_from_string(method)) {
      case pipeline::Method::direct:
        *label_out = pipeline::predict_direct(network->net, slice->s);
        break;
      case pipeline::Method::voting:
        *label_out = pipeline::predict_voting(network->net, slice->s, d4::tables());
        break;
      case pipeline::Method::voting_sum:
        *label_out = pipeline::predict_voting_sum(network->net, slice->s, d4::tables());
        break;
    }
  });
}

or8_status or8_predict_probs(const or8_network* network, const or8_slice* slice,
                             float probs_out[8]) {
  return wrap([&] {
    require(network && slice && probs_out,
            "network, slice and probs_out must not be null");
    const auto& cfg = network->net.config();
    auto x = pipeline::make_eval_input(slice->s, cfg);
    network->net.forward_batch(x.data(), 1, cfg.in_channels, cfg.input_size,
                               cfg.input_size, probs_out);
  });
}

or8_status or8_reorient(const or8_network* network, const or8_slice* slice,
                        or8_slice** corrected_out, int* label_out) {
  return wrap([&] {
    require(network && slice && corrected_out,
            "network, slice and corrected_out must not be null");
    auto [corrected, label] =
        pipeline::reorient(network->net, slice->s, d4::tables());
    *corrected_out = new or8_slice{std::move(corrected)};
    if (label_out) *label_out = label;
  });
}

}  // extern "C"
