#include "orient8/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "orient8/adam.hpp"
#include "orient8/checkpoint.hpp"
#include "orient8/errors.hpp"
#include "orient8/rng.hpp"

namespace orient8::pipeline {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Slice to_network_geometry(const Slice& slice, const nn::NetworkConfig& cfg,
                          bool training) {
  Slice s = training
                ? imgops::crop_or_pad(slice, cfg.input_size, cfg.input_size)
                : (slice.height == cfg.input_size && slice.width == cfg.input_size
                       ? slice
                       : imgops::resize_bilinear(slice, cfg.input_size, cfg.input_size));
  return imgops::replicate_channels(s, cfg.in_channels);
}

// Accuracy of batched argmax predictions over prepared eval inputs.
double dataset_accuracy(const nn::Network& net, const data::Dataset& ds) {
  const auto& cfg = net.config();
  const size_t stride = static_cast<size_t>(cfg.in_channels) * cfg.input_size *
                        cfg.input_size;
  const int n = static_cast<int>(ds.samples.size());
  if (n == 0) return -1.0;
  const int block = 64;
  std::vector<float> input(stride * block);
  std::vector<float> probs(static_cast<size_t>(block) * 8);
  int correct = 0;
  for (int at = 0; at < n; at += block) {
    const int count = std::min(block, n - at);
    for (int i = 0; i < count; ++i) {
      auto x = make_eval_input(ds.samples[at + i].slice, cfg);
      std::copy(x.begin(), x.end(), input.begin() + i * stride);
    }
    net.forward_batch(input.data(), count, cfg.in_channels, cfg.input_size,
                      cfg.input_size, probs.data());
    for (int i = 0; i < count; ++i) {
      if (nn::argmax_label(probs.data() + i * 8, 8) == ds.samples[at + i].label) {
        ++correct;
      }
    }
  }
  return static_cast<double>(correct) / n;
}

TrainResult run_training(nn::Network net, const data::Dataset& train_ds,
                         const data::Dataset& val_ds, const TrainConfig& cfg,
                         const std::vector<bool>* frozen,
                         const std::string& lastgood_path) {
  const auto& ncfg = net.config();
  const size_t stride = static_cast<size_t>(ncfg.in_channels) * ncfg.input_size *
                        ncfg.input_size;
  const int n = static_cast<int>(train_ds.samples.size());

  nn::Adam opt(net.params(), {.lr = cfg.lr});
  nn::Gradients grads = net.make_gradients();

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::vector<float> input(stride * cfg.batch_size);
  std::vector<int> labels(cfg.batch_size);

  TrainResult result{std::move(net), {}};
  std::vector<nn::Tensor> best_params;
  double best_val = -2.0;
  std::string last_good = "none (no epoch completed)";

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, 0x65706f63, epoch));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    int seen = 0;
    for (int at = 0; at < n; at += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n - at);
      for (int i = 0; i < count; ++i) {
        const int idx = order[at + i];
        const uint64_t aug_seed = derive_seed(cfg.seed, 0x617567, epoch, idx);
        auto x = make_train_input(train_ds.samples[idx].slice, ncfg, cfg.augment,
                                  aug_seed);
        std::copy(x.begin(), x.end(), input.begin() + i * stride);
        labels[i] = train_ds.samples[idx].label;
      }
      grads.zero();
      double loss;
      try {
        loss = result.net.accumulate_gradients(input.data(), labels.data(), count,
                                               ncfg.in_channels, ncfg.input_size,
                                               ncfg.input_size, grads);
        if (!std::isfinite(loss)) {
          throw DivergedError("non-finite training loss at epoch " +
                              std::to_string(epoch));
        }
        opt.step(result.net.params(), grads, frozen);
      } catch (const DivergedError& e) {
        throw DivergedError(std::string(e.what()) +
                            "; last good checkpoint: " + last_good);
      }
      loss_sum += loss * count;
      seen += count;
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = loss_sum / std::max(1, seen);
    entry.val_accuracy = dataset_accuracy(result.net, val_ds);
    result.log.push_back(entry);

    if (!val_ds.samples.empty() && entry.val_accuracy > best_val) {
      best_val = entry.val_accuracy;
      best_params = result.net.params();
    }
    if (!lastgood_path.empty()) {
      nn::save_checkpoint(result.net, lastgood_path);
      last_good = lastgood_path;
    } else {
      last_good = "none (no lastgood path configured)";
    }
  }

  if (!best_params.empty()) result.net.params() = std::move(best_params);
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  network.validate();
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (lr <= 0) throw ArgumentError("learning rate must be positive");
  if (train_fraction <= 0 || train_fraction > 1) {
    throw ArgumentError("train_fraction must be in (0,1]");
  }
}

const char* to_string(Method m) {
  switch (m) {
    case Method::direct: return "direct";
    case Method::voting: return "voting";
    case Method::voting_sum: return "voting-sum";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "direct") return Method::direct;
  if (s == "voting") return Method::voting;
  if (s == "voting-sum") return Method::voting_sum;
  throw ArgumentError("unknown method '" + s +
                      "' (expected direct, voting or voting-sum)");
}

std::vector<float> make_train_input(const Slice& slice,
                                    const nn::NetworkConfig& net_cfg,
                                    const imgops::AugmentConfig& aug,
                                    uint64_t aug_seed) {
  Slice fitted = imgops::crop_or_pad(slice, net_cfg.input_size, net_cfg.input_size);
  fitted = imgops::augment(fitted, aug_seed, aug);
  fitted = imgops::replicate_channels(fitted, net_cfg.in_channels);
  return imgops::normalize(fitted).pixels;
}

std::vector<float> make_eval_input(const Slice& slice,
                                   const nn::NetworkConfig& net_cfg) {
  return imgops::normalize(to_network_geometry(slice, net_cfg, false)).pixels;
}

TrainResult train(const data::Dataset& train_ds, const data::Dataset& val_ds,
                  const TrainConfig& cfg, const std::string& lastgood_path) {
  cfg.validate();
  if (train_ds.samples.empty()) throw ArgumentError("training set is empty");
  nn::Network net(cfg.network);
  return run_training(std::move(net), train_ds, val_ds, cfg, nullptr, lastgood_path);
}

TrainResult transfer(const nn::Network& pretrained, const data::Dataset& train_ds,
                     const data::Dataset& val_ds, const TrainConfig& cfg,
                     const std::string& lastgood_path) {
  std::string why;
  if (!pretrained.config().compatible_with(cfg.network, &why)) {
    throw ShapeError("pretrained network incompatible: " + why);
  }
  if (cfg.epochs < 0) throw ArgumentError("epochs must be >= 0");
  if (cfg.epochs == 0) return {pretrained, {}};
  if (train_ds.samples.empty()) throw ArgumentError("training set is empty");

  std::vector<bool> frozen(pretrained.params().size(), false);
  if (cfg.freeze_conv) {
    for (size_t t = 0; t < pretrained.params().size(); ++t) {
      frozen[t] = pretrained.params()[t].name.starts_with("conv");
    }
  }
  return run_training(pretrained, train_ds, val_ds, cfg,
                      cfg.freeze_conv ? &frozen : nullptr, lastgood_path);
}

d4::Label predict_direct(const nn::Network& net, const Slice& slice) {
  const auto& cfg = net.config();
  auto x = make_eval_input(slice, cfg);
  std::array<float, 8> probs{};
  net.forward_batch(x.data(), 1, cfg.in_channels, cfg.input_size, cfg.input_size,
                    probs.data());
  return nn::argmax_label(probs.data(), 8);
}

d4::Label vote_mode(const std::array<d4::Label, 8>& recovered) {
  std::array<int, 8> counts{};
  for (d4::Label label : recovered) ++counts[label];
  int best_count = 0;
  for (int count : counts) best_count = std::max(best_count, count);
  if (counts[recovered[0]] == best_count) return recovered[0];
  for (d4::Label label = 0; label < 8; ++label) {
    if (counts[label] == best_count) return label;
  }
  return 0;  // unreachable
}

namespace {

// Runs the 8 transformed views through the network as one batch; fills
// per-view probabilities.
void voting_views(const nn::Network& net, const Slice& slice,
                  std::array<std::array<float, 8>, 8>& view_probs) {
  const auto& cfg = net.config();
  const size_t stride = static_cast<size_t>(cfg.in_channels) * cfg.input_size *
                        cfg.input_size;
  std::vector<float> input(stride * 8);
  for (d4::Label j = 0; j < 8; ++j) {
    auto x = make_eval_input(imgops::apply_orientation(slice, j), cfg);
    std::copy(x.begin(), x.end(), input.begin() + j * stride);
  }
  std::vector<float> probs(8 * 8);
  net.forward_batch(input.data(), 8, cfg.in_channels, cfg.input_size,
                    cfg.input_size, probs.data());
  for (int j = 0; j < 8; ++j) {
    std::copy(probs.begin() + j * 8, probs.begin() + (j + 1) * 8,
              view_probs[j].begin());
  }
}

}  // namespace

d4::Label predict_voting(const nn::Network& net, const Slice& slice,
                         const d4::TransformTables& tables) {
  std::array<std::array<float, 8>, 8> view_probs;
  voting_views(net, slice, view_probs);
  std::array<d4::Label, 8> recovered{};
  for (int j = 0; j < 8; ++j) {
    const d4::Label predicted = nn::argmax_label(view_probs[j].data(), 8);
    recovered[j] = d4::invert_label(tables, j, predicted);
  }
  return vote_mode(recovered);
}

d4::Label predict_voting_sum(const nn::Network& net, const Slice& slice,
                             const d4::TransformTables& tables) {
  std::array<std::array<float, 8>, 8> view_probs;
  voting_views(net, slice, view_probs);
  std::array<double, 8> summed{};
  for (int j = 0; j < 8; ++j) {
    for (int k = 0; k < 8; ++k) {
      summed[d4::invert_label(tables, j, k)] += view_probs[j][k];
    }
  }
  int best = 0;
  for (int i = 1; i < 8; ++i) {
    if (summed[i] > summed[best]) best = i;
  }
  return best;
}

EvalReport evaluate_with(const std::function<d4::Label(const Slice&)>& predict,
                         const data::Dataset& ds, Method tag) {
  if (ds.samples.empty()) throw ArgumentError("evaluation set is empty");
  EvalReport report;
  report.method = tag;
  report.total = static_cast<int>(ds.samples.size());
  int correct = 0;
  for (const auto& sample : ds.samples) {
    const d4::Label predicted = predict(sample.slice);
    ++report.confusion[sample.label][predicted];
    if (predicted == sample.label) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / report.total;
  for (int t = 0; t < 8; ++t) {
    int row = 0;
    for (int p = 0; p < 8; ++p) row += report.confusion[t][p];
    report.per_class_accuracy[t] =
        row == 0 ? 0.0 : static_cast<double>(report.confusion[t][t]) / row;
  }
  return report;
}

EvalReport evaluate(const nn::Network& net, const data::Dataset& ds, Method method) {
  const auto& tables = d4::tables();
  switch (method) {
    case Method::direct:
      return evaluate_with(
          [&](const Slice& s) { return predict_direct(net, s); }, ds, method);
    case Method::voting:
      return evaluate_with(
          [&](const Slice& s) { return predict_voting(net, s, tables); }, ds,
          method);
    case Method::voting_sum:
      return evaluate_with(
          [&](const Slice& s) { return predict_voting_sum(net, s, tables); }, ds,
          method);
  }
  throw ArgumentError("unknown evaluation method");
}

std::vector<SweepCell> sensitivity_sweep(const std::vector<data::Volume>& volumes,
                                         const std::vector<double>& fractions,
                                         const TrainConfig& cfg) {
  if (fractions.empty()) throw ArgumentError("no sweep fractions given");
  std::vector<SweepCell> cells;
  const std::array<Modality, 3> modalities = {Modality::C0, Modality::LGE,
                                              Modality::T2};
  for (size_t row = 0; row < fractions.size(); ++row) {
    const double fraction = fractions[row];
    if (fraction <= 0 || fraction >= 1) {
      throw ArgumentError("sweep fraction must be in (0,1), got " +
                          std::to_string(fraction));
    }
    for (size_t m = 0; m < modalities.size(); ++m) {
      std::vector<data::Volume> vols_m;
      for (const auto& v : volumes) {
        if (v.modality == modalities[m]) vols_m.push_back(v);
      }
      if (vols_m.empty()) continue;

      auto parts = data::split_by_patient(vols_m, {fraction, 0.0, 1.0 - fraction},
                                          derive_seed(cfg.seed, 0x726f77, row));
      data::Dataset train_set = data::expand_orientations(parts[0]);
      data::Dataset test_set = data::expand_orientations(parts[2]);
      test_set.split = data::Split::test;

      TrainConfig run_cfg = cfg;
      run_cfg.train_fraction = 1.0;  // the split already applied the fraction
      run_cfg.seed = derive_seed(cfg.seed, 0x737764, row, m);
      run_cfg.network.seed = static_cast<uint32_t>(run_cfg.seed);
      TrainResult trained = train(train_set, data::Dataset{}, run_cfg);

      for (Method method : {Method::voting, Method::direct}) {
        SweepCell cell;
        cell.fraction = fraction;
        cell.modality = modalities[m];
        cell.method = method;
        cell.report = evaluate(trained.net, test_set, method);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::pair<Slice, d4::Label> reorient(const nn::Network& net, const Slice& slice,
                                     const d4::TransformTables& tables) {
  const d4::Label predicted = predict_voting(net, slice, tables);
  Slice corrected = imgops::apply_orientation(slice, tables.inverse[predicted]);
  return {std::move(corrected), predicted};
}

void write_train_log(const std::vector<EpochLog>& log, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open log for writing: " + path);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "# orient8 train log " << stamp << "\n";
  out << "epoch,loss,val_accuracy\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << format_double(e.loss) << ',';
    if (e.val_accuracy >= 0) out << format_double(e.val_accuracy);
    out << '\n';
  }
}

void write_eval_report_csv(const EvalReport& report, const std::string& modality,
                           const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open report for writing: " + path);
  out << "modality,method,accuracy,samples\n";
  out << modality << ',' << to_string(report.method) << ','
      << format_double(report.accuracy) << ',' << report.total << '\n';
}

namespace {

json report_to_json(const EvalReport& report, const std::string& modality) {
  json j;
  j["modality"] = modality;
  j["method"] = to_string(report.method);
  j["accuracy"] = report.accuracy;
  j["samples"] = report.total;
  j["per_class_accuracy"] = report.per_class_accuracy;
  j["confusion"] = report.confusion;
  return j;
}

}  // namespace

void write_eval_report_jsonl(const EvalReport& report, const std::string& modality,
                             const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open report for writing: " + path);
  out << report_to_json(report, modality).dump() << '\n';
}

void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open report for writing: " + path);

  std::vector<double> fractions;
  std::map<std::pair<double, std::string>, double> grid;
  for (const auto& c : cells) {
    if (std::find(fractions.begin(), fractions.end(), c.fraction) == fractions.end()) {
      fractions.push_back(c.fraction);
    }
    grid[{c.fraction, std::string(to_string(c.method)) + "_" +
                          orient8::to_string(c.modality)}] = c.report.accuracy;
  }

  out << "fraction";
  const std::array<const char*, 3> mods = {"C0", "LGE", "T2"};
  for (const char* method : {"voting", "direct"}) {
    for (const char* m : mods) out << ',' << method << '_' << m;
  }
  out << '\n';
  for (double f : fractions) {
    char frac[16];
    std::snprintf(frac, sizeof(frac), "%.2f", f);
    out << frac;
    for (const char* method : {"voting", "direct"}) {
      for (const char* m : mods) {
        auto it = grid.find({f, std::string(method) + "_" + m});
        out << ',';
        if (it != grid.end()) out << format_double(it->second);
      }
    }
    out << '\n';
  }
}

void write_sweep_jsonl(const std::vector<SweepCell>& cells, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open report for writing: " + path);
  for (const auto& c : cells) {
    json j = report_to_json(c.report, orient8::to_string(c.modality));
    j["fraction"] = c.fraction;
    out << j.dump() << '\n';
  }
}

}  // namespace orient8::pipeline
