#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "orient8/dataset.hpp"
#include "orient8/imgops.hpp"
#include "orient8/network.hpp"

namespace orient8::pipeline {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double lr = 1e-3;
  uint64_t seed = 0;
  double train_fraction = 1.0;  // patient-level subsampling knob (sweep/CLI)
  bool freeze_conv = false;
  nn::NetworkConfig network;
  imgops::AugmentConfig augment;

  void validate() const;
};

enum class Method { direct, voting, voting_sum };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct EvalReport {
  double accuracy = 0.0;
  std::array<std::array<int, 8>, 8> confusion{};  // [true][predicted]
  std::array<double, 8> per_class_accuracy{};
  Method method = Method::direct;
  int total = 0;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double val_accuracy = -1.0;  // -1 when there is no validation set
};

struct TrainResult {
  nn::Network net;
  std::vector<EpochLog> log;
};

// Preprocessing for one network input. Training samples are cropped or
// padded to the network size, perturbed, then z-scored; evaluation samples
// are resized instead and never perturbed.
std::vector<float> make_train_input(const Slice& slice,
                                    const nn::NetworkConfig& net_cfg,
                                    const imgops::AugmentConfig& aug,
                                    uint64_t aug_seed);
std::vector<float> make_eval_input(const Slice& slice,
                                   const nn::NetworkConfig& net_cfg);

// Trains from random init on shuffled mini-batches. When a validation set is
// given, the weights with the best validation accuracy are returned;
// otherwise the final weights. A non-finite loss or gradient aborts with
// DivergedError that names `lastgood_path` (written after each completed
// epoch when nonempty).
TrainResult train(const data::Dataset& train_ds, const data::Dataset& val_ds,
                  const TrainConfig& cfg, const std::string& lastgood_path = "");

// Fine-tunes from pretrained weights; epochs may be 0 (returns the
// pretrained network unchanged). freeze_conv pins every conv tensor.
// Config mismatch between cfg.network and the pretrained network throws
// ShapeError naming the layer.
TrainResult transfer(const nn::Network& pretrained, const data::Dataset& train_ds,
                     const data::Dataset& val_ds, const TrainConfig& cfg,
                     const std::string& lastgood_path = "");

// Resize -> normalize -> forward -> argmax (ties to the smaller label).
d4::Label predict_direct(const nn::Network& net, const Slice& slice);

// Majority vote over the 8 transformed views: classify apply_orientation(x, j)
// for every j, pull each prediction back through the group inverse, take the
// mode. Ties prefer the untransformed view's recovery, then the smallest
// label.
d4::Label predict_voting(const nn::Network& net, const Slice& slice,
                         const d4::TransformTables& tables);

// Extension of voting that sums the 8 recovered softmax distributions
// instead of counting argmax votes.
d4::Label predict_voting_sum(const nn::Network& net, const Slice& slice,
                             const d4::TransformTables& tables);

// The voting aggregation rule alone (exposed for simulation and tests).
d4::Label vote_mode(const std::array<d4::Label, 8>& recovered);

EvalReport evaluate(const nn::Network& net, const data::Dataset& ds, Method method);

// Evaluation against an arbitrary predictor (oracles, fakes).
EvalReport evaluate_with(const std::function<d4::Label(const Slice&)>& predict,
                         const data::Dataset& ds, Method tag = Method::direct);

struct SweepCell {
  double fraction = 0.0;
  Modality modality = Modality::C0;
  Method method = Method::direct;
  EvalReport report;
};

// For each training fraction: fresh patient split (remainder to test),
// retrain from scratch per modality, evaluate both direct and voting.
std::vector<SweepCell> sensitivity_sweep(const std::vector<data::Volume>& volumes,
                                         const std::vector<double>& fractions,
                                         const TrainConfig& cfg);

// Voting-based prediction, then the inverse transform back to canonical
// orientation. Returns the corrected slice and the predicted label.
std::pair<Slice, d4::Label> reorient(const nn::Network& net, const Slice& slice,
                                     const d4::TransformTables& tables);

// Artifact writers. The train log confines its timestamp to the '#' header
// line; reports are timestamp-free.
void write_train_log(const std::vector<EpochLog>& log, const std::string& path);
void write_eval_report_csv(const EvalReport& report, const std::string& modality,
                           const std::string& path);
void write_eval_report_jsonl(const EvalReport& report, const std::string& modality,
                             const std::string& path);
void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path);
void write_sweep_jsonl(const std::vector<SweepCell>& cells, const std::string& path);

}  // namespace orient8::pipeline
