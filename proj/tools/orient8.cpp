// orient8 command line tool. Links only the public C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orient8.h"

namespace {

// Reference tables used by `orient8 tables` to self-check the derived
// matrices before printing them.
constexpr int kComposeRef[64] = {
    0, 1, 2, 3, 4, 5, 6, 7,  //
    1, 0, 3, 2, 5, 4, 7, 6,  //
    2, 3, 0, 1, 6, 7, 4, 5,  //
    3, 2, 1, 0, 7, 6, 5, 4,  //
    4, 6, 5, 7, 0, 2, 1, 3,  //
    5, 7, 4, 6, 1, 3, 0, 2,  //
    6, 4, 7, 5, 2, 0, 3, 1,  //
    7, 5, 6, 4, 3, 1, 2, 0,
};
constexpr int kInverseActionRef[64] = {
    0, 1, 2, 3, 4, 5, 6, 7,  //
    1, 0, 3, 2, 5, 4, 7, 6,  //
    2, 3, 0, 1, 6, 7, 4, 5,  //
    3, 2, 1, 0, 7, 6, 5, 4,  //
    4, 6, 5, 7, 0, 2, 1, 3,  //
    6, 4, 7, 5, 2, 0, 3, 1,  //
    5, 7, 4, 6, 1, 3, 0, 2,  //
    7, 5, 6, 4, 3, 1, 2, 0,
};

int exit_code_for(or8_status status) {
  switch (status) {
    case OR8_OK: return 0;
    case OR8_ERR_IO: return 2;
    case OR8_ERR_FORMAT: return 3;
    case OR8_ERR_DIVERGED: return 4;
    default: return 1;
  }
}

int fail(or8_status status) {
  std::fprintf(stderr, "error (%s): %s\n", or8_status_name(status),
               or8_last_error());
  return exit_code_for(status);
}

void print_matrix(const char* title, const int* m) {
  std::printf("%s\n", title);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      std::printf(j ? " %d" : "%d", m[i * 8 + j]);
    }
    std::printf("\n");
  }
}

struct TrainFlags {
  std::string data;
  std::string modality = "C0";
  std::string out = "model.or8w";
  std::string log;
  or8_train_options options{};

  void add_common(CLI::App* cmd, bool transfer) {
    or8_train_options_default(&options);
    if (transfer) {
      options.epochs = 8;   // quarter of the scratch budget
      options.lr = 1e-4;    // tenth of the scratch rate
    }
    cmd->add_option("--data", data, "dataset directory (with manifest.tsv)")
        ->required();
    cmd->add_option("--modality", modality, "C0, LGE or T2")
        ->check(CLI::IsMember({"C0", "LGE", "T2"}));
    cmd->add_option("--out", out, "output checkpoint path");
    cmd->add_option("--log", log, "training log CSV path");
    cmd->add_option("--seed", options.seed, "run seed");
    cmd->add_option("--epochs", options.epochs, "training epochs");
    cmd->add_option("--lr", options.lr, "learning rate");
    cmd->add_option("--batch", options.batch_size, "mini-batch size");
    cmd->add_option("--fraction", options.train_fraction,
                    "patient fraction of the train split to use");
    cmd->add_option("--input-size", options.input_size,
                    "network input side (multiple of 8)");
    cmd->add_option("--hidden", options.hidden_units, "dense hidden units");
    cmd->add_option("--conv-channels", conv_channels,
                    "conv channel widths, e.g. 8,16,32")
        ->delimiter(',')
        ->expected(3);
    cmd->add_flag("--no-augment", no_augment, "disable training augmentation");
  }

  void finalize() {
    if (!conv_channels.empty()) {
      for (int i = 0; i < 3; ++i) options.conv_channels[i] = conv_channels[i];
    }
    if (no_augment) options.augment = 0;
  }

  void print_config(const char* name, const char* extra = "") const {
    std::fprintf(stderr,
                 "orient8 %s: seed=%llu data=%s modality=%s out=%s epochs=%d "
                 "batch=%d lr=%g fraction=%g input=%d conv=%d,%d,%d hidden=%d "
                 "augment=%d%s\n",
                 name, static_cast<unsigned long long>(options.seed),
                 data.c_str(), modality.c_str(), out.c_str(), options.epochs,
                 options.batch_size, options.lr, options.train_fraction,
                 options.input_size, options.conv_channels[0],
                 options.conv_channels[1], options.conv_channels[2],
                 options.hidden_units, options.augment, extra);
  }

 private:
  std::vector<int> conv_channels;
  bool no_augment = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orient8 — cardiac MR slice orientation recognition toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value config file; keys scoped per subcommand, e.g.\n"
                 "[train] sections or train.epochs=8 lines");

  // ---- tables ----
  auto* cmd_tables = app.add_subcommand(
      "tables", "print the orientation composition and inverse-action tables");
  cmd_tables->fallthrough();

  // ---- gen ----
  auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic phantom dataset");
  or8_phantom_spec spec{};
  or8_phantom_spec_default(&spec);
  std::string gen_modality = "all";
  std::string gen_out;
  uint64_t gen_seed = 0;
  cmd_gen->add_option("--patients", spec.n_patients, "patients per modality");
  cmd_gen->add_option("--slices", spec.slices_per_patient, "slices per patient");
  cmd_gen->add_option("--size", spec.image_size, "square image side");
  cmd_gen->add_option("--modality", gen_modality, "C0, LGE, T2 or all")
      ->check(CLI::IsMember({"C0", "LGE", "T2", "all"}));
  cmd_gen->add_option("--noise", spec.noise_level, "noise level (0 disables)");
  cmd_gen->add_option("--out", gen_out, "output directory")->required();
  cmd_gen->add_option("--seed", gen_seed, "generation seed");
  cmd_gen->fallthrough();

  // ---- train / transfer ----
  auto* cmd_train = app.add_subcommand("train", "train a classifier from scratch");
  TrainFlags train_flags;
  train_flags.add_common(cmd_train, false);
  cmd_train->fallthrough();

  auto* cmd_transfer = app.add_subcommand(
      "transfer", "fine-tune a pretrained checkpoint on another modality");
  TrainFlags transfer_flags;
  std::string transfer_init;
  transfer_flags.add_common(cmd_transfer, true);
  cmd_transfer->add_option("--ckpt", transfer_init, "pretrained checkpoint")
      ->required();
  bool freeze_conv = false;
  cmd_transfer->add_flag("--freeze-conv", freeze_conv,
                         "keep conv layers fixed while fine-tuning");
  cmd_transfer->fallthrough();

  // ---- eval ----
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  std::string eval_data, eval_ckpt, eval_report, eval_jsonl;
  std::string eval_modality = "C0", eval_method = "voting";
  uint64_t eval_seed = 0;
  cmd_eval->add_option("--data", eval_data, "dataset directory")->required();
  cmd_eval->add_option("--ckpt", eval_ckpt, "checkpoint path")->required();
  cmd_eval->add_option("--modality", eval_modality, "C0, LGE or T2")
      ->check(CLI::IsMember({"C0", "LGE", "T2"}));
  cmd_eval->add_option("--method", eval_method, "direct, voting or voting-sum")
      ->check(CLI::IsMember({"direct", "voting", "voting-sum"}));
  cmd_eval->add_option("--seed", eval_seed, "split seed (must match training)");
  cmd_eval->add_option("--report", eval_report, "report CSV path");
  cmd_eval->add_option("--report-jsonl", eval_jsonl, "report JSONL path");
  cmd_eval->fallthrough();

  // ---- sweep ----
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "training-set-size sensitivity grid over all modalities");
  TrainFlags sweep_flags;
  sweep_flags.add_common(cmd_sweep, false);
  std::vector<double> sweep_fractions;
  std::string sweep_jsonl;
  cmd_sweep->add_option("--sweep-fractions", sweep_fractions,
                        "training fractions, e.g. 0.6,0.5,0.4,0.3,0.2")
      ->delimiter(',');
  cmd_sweep->add_option("--jsonl", sweep_jsonl, "per-cell JSONL path");
  cmd_sweep->fallthrough();

  // ---- reorient ----
  auto* cmd_reorient = app.add_subcommand(
      "reorient", "predict a file's orientation and write the corrected image");
  std::string re_ckpt, re_in, re_out;
  cmd_reorient->add_option("--ckpt", re_ckpt, "checkpoint path")->required();
  cmd_reorient->add_option("--in", re_in, "input image (.ori8 or .pgm)")->required();
  cmd_reorient->add_option("--out", re_out, "corrected output image")->required();
  cmd_reorient->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (cmd_tables->parsed()) {
    std::fprintf(stderr, "orient8 tables\n");
    or8_tables* tables = nullptr;
    if (or8_status s = or8_tables_create(&tables); s != OR8_OK) return fail(s);
    int compose[64], inverse_action[64], inverse[8];
    or8_tables_compose_matrix(tables, compose);
    or8_tables_inverse_action_matrix(tables, inverse_action);
    for (int i = 0; i < 8; ++i) or8_tables_inverse(tables, i, &inverse[i]);
    or8_tables_destroy(tables);

    print_matrix("compose:", compose);
    print_matrix("inverse-action:", inverse_action);
    std::printf("inverse:\n");
    for (int i = 0; i < 8; ++i) std::printf(i ? " %d" : "%d", inverse[i]);
    std::printf("\n");

    int mismatches = 0;
    for (int i = 0; i < 64; ++i) {
      if (compose[i] != kComposeRef[i]) {
        std::fprintf(stderr, "compose[%d][%d]=%d differs from reference %d\n",
                     i / 8, i % 8, compose[i], kComposeRef[i]);
        ++mismatches;
      }
      if (inverse_action[i] != kInverseActionRef[i]) {
        std::fprintf(stderr,
                     "inverse-action[%d][%d]=%d differs from reference %d\n",
                     i / 8, i % 8, inverse_action[i], kInverseActionRef[i]);
        ++mismatches;
      }
    }
    return mismatches == 0 ? 0 : 1;
  }

  if (cmd_gen->parsed()) {
    spec.seed = gen_seed;
    spec.modality = gen_modality.c_str();
    std::fprintf(stderr,
                 "orient8 gen: seed=%llu patients=%d slices=%d size=%d "
                 "modality=%s noise=%g out=%s\n",
                 static_cast<unsigned long long>(spec.seed), spec.n_patients,
                 spec.slices_per_patient, spec.image_size, gen_modality.c_str(),
                 spec.noise_level, gen_out.c_str());
    if (or8_status s = or8_generate_dataset(&spec, gen_out.c_str()); s != OR8_OK) {
      return fail(s);
    }
    const int n_modalities = gen_modality == "all" ? 3 : 1;
    std::printf("wrote %d volumes (%d patients x %d modalities, %d slices each) to %s\n",
                spec.n_patients * n_modalities, spec.n_patients, n_modalities,
                spec.slices_per_patient, gen_out.c_str());
    return 0;
  }

  if (cmd_train->parsed()) {
    train_flags.finalize();
    train_flags.print_config("train");
    or8_status s = or8_train(train_flags.data.c_str(), train_flags.modality.c_str(),
                             &train_flags.options, nullptr, train_flags.out.c_str(),
                             train_flags.log.empty() ? nullptr : train_flags.log.c_str());
    if (s != OR8_OK) return fail(s);
    std::printf("checkpoint=%s\n", train_flags.out.c_str());
    return 0;
  }

  if (cmd_transfer->parsed()) {
    transfer_flags.finalize();
    transfer_flags.options.freeze_conv = freeze_conv ? 1 : 0;
    transfer_flags.print_config("transfer",
                                freeze_conv ? " freeze-conv=1" : " freeze-conv=0");
    or8_status s = or8_train(transfer_flags.data.c_str(),
                             transfer_flags.modality.c_str(),
                             &transfer_flags.options, transfer_init.c_str(),
                             transfer_flags.out.c_str(),
                             transfer_flags.log.empty() ? nullptr
                                                        : transfer_flags.log.c_str());
    if (s != OR8_OK) return fail(s);
    std::printf("checkpoint=%s\n", transfer_flags.out.c_str());
    return 0;
  }

  if (cmd_eval->parsed()) {
    std::fprintf(stderr, "orient8 eval: seed=%llu data=%s modality=%s ckpt=%s method=%s\n",
                 static_cast<unsigned long long>(eval_seed), eval_data.c_str(),
                 eval_modality.c_str(), eval_ckpt.c_str(), eval_method.c_str());
    double accuracy = 0;
    or8_status s = or8_evaluate(eval_data.c_str(), eval_modality.c_str(),
                                eval_ckpt.c_str(), eval_method.c_str(), eval_seed,
                                eval_report.empty() ? nullptr : eval_report.c_str(),
                                eval_jsonl.empty() ? nullptr : eval_jsonl.c_str(),
                                &accuracy);
    if (s != OR8_OK) return fail(s);
    std::printf("accuracy=%.6f\n", accuracy);
    return 0;
  }

  if (cmd_sweep->parsed()) {
    sweep_flags.finalize();
    sweep_flags.print_config("sweep");
    if (sweep_flags.out == "model.or8w") sweep_flags.out = "sweep.csv";
    or8_status s = or8_sweep(sweep_flags.data.c_str(),
                             sweep_fractions.empty() ? nullptr : sweep_fractions.data(),
                             static_cast<int>(sweep_fractions.size()),
                             &sweep_flags.options, sweep_flags.out.c_str(),
                             sweep_jsonl.empty() ? nullptr : sweep_jsonl.c_str());
    if (s != OR8_OK) return fail(s);
    // Echo the grid so results land on stdout too.
    if (FILE* f = std::fopen(sweep_flags.out.c_str(), "r")) {
      char buf[4096];
      size_t n;
      while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) {
        std::fwrite(buf, 1, n, stdout);
      }
      std::fclose(f);
    }
    return 0;
  }

  if (cmd_reorient->parsed()) {
    std::fprintf(stderr, "orient8 reorient: ckpt=%s in=%s out=%s\n", re_ckpt.c_str(),
                 re_in.c_str(), re_out.c_str());
    or8_network* net = nullptr;
    if (or8_status s = or8_network_load(re_ckpt.c_str(), &net); s != OR8_OK) {
      return fail(s);
    }
    or8_slice* input = nullptr;
    or8_status s = or8_slice_read(re_in.c_str(), &input);
    if (s != OR8_OK) {
      or8_network_destroy(net);
      return fail(s);
    }
    or8_slice* corrected = nullptr;
    int label = -1;
    s = or8_reorient(net, input, &corrected, &label);
    if (s == OR8_OK) s = or8_slice_write(corrected, re_out.c_str());
    or8_slice_destroy(corrected);
    or8_slice_destroy(input);
    or8_network_destroy(net);
    if (s != OR8_OK) return fail(s);
    std::printf("predicted=%d\n", label);
    return 0;
  }

  return 0;
}
