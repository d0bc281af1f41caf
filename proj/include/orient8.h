/* orient8 — recognition and correction of 2D cardiac MR slice orientation.
 *
 * C interface over the orient8 core. All functions return or8_status;
 * outputs are written through pointers. On failure, or8_last_error() holds
 * a thread-local description of what went wrong. Handles are opaque and
 * freed with the matching *_destroy call.
 */

#ifndef ORIENT8_H
#define ORIENT8_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OR8_API __declspec(dllexport)
#else
#define OR8_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum or8_status {
  OR8_OK = 0,
  OR8_ERR_ARGUMENT = 1, /* bad parameter or unusable value */
  OR8_ERR_IO = 2,       /* missing or unreadable/unwritable file */
  OR8_ERR_FORMAT = 3,   /* malformed file contents */
  OR8_ERR_DIVERGED = 4, /* training produced non-finite values */
  OR8_ERR_SHAPE = 5,    /* incompatible tensor/image dimensions */
  OR8_ERR_INTERNAL = 6
} or8_status;

OR8_API const char* or8_version(void);
OR8_API const char* or8_status_name(or8_status status);
OR8_API const char* or8_last_error(void);

/* ---------- orientation label algebra ----------
 * Labels 0..7 name the 8 square orientations; 0 is the identity. The tables
 * are derived at creation from the coordinate maps and expose:
 *   compose(i, j)       = label of "apply j, then i"
 *   invert_label(i, k)  = the j with compose(i, j) == k
 *   inverse(i)          = invert_label(i, 0)
 */
typedef struct or8_tables or8_tables;

OR8_API or8_status or8_tables_create(or8_tables** out);
OR8_API void or8_tables_destroy(or8_tables* tables);
OR8_API or8_status or8_tables_compose(const or8_tables* tables, int i, int j,
                                      int* out);
OR8_API or8_status or8_tables_invert_label(const or8_tables* tables, int i,
                                           int k, int* out);
OR8_API or8_status or8_tables_inverse(const or8_tables* tables, int i, int* out);
/* Row-major 8x8 dumps. */
OR8_API or8_status or8_tables_compose_matrix(const or8_tables* tables,
                                             int out[64]);
OR8_API or8_status or8_tables_inverse_action_matrix(const or8_tables* tables,
                                                    int out[64]);

/* ---------- image slices ----------
 * Pixels are float32 in [channel][y][x] order. Supported file formats are
 * binary PGM (.pgm, single channel, lossy quantization) and the native
 * .ori8 raw tensor (lossless, carries patient/modality/orientation
 * metadata); the extension selects the format.
 */
typedef struct or8_slice or8_slice;

OR8_API or8_status or8_slice_create(int channels, int height, int width,
                                    const float* pixels, or8_slice** out);
OR8_API or8_status or8_slice_read(const char* path, or8_slice** out);
OR8_API or8_status or8_slice_write(const or8_slice* slice, const char* path);
OR8_API void or8_slice_destroy(or8_slice* slice);
OR8_API or8_status or8_slice_dims(const or8_slice* slice, int* channels,
                                  int* height, int* width);
/* Copies channels*height*width floats; capacity is checked. */
OR8_API or8_status or8_slice_pixels(const or8_slice* slice, float* out,
                                    size_t capacity);
/* *label is -1 when the orientation is unknown. */
OR8_API or8_status or8_slice_orientation(const or8_slice* slice, int* label);
OR8_API or8_status or8_slice_set_orientation(or8_slice* slice, int label);
OR8_API or8_status or8_slice_apply_orientation(const or8_slice* slice, int label,
                                               or8_slice** out);

/* ---------- synthetic phantom datasets ---------- */
typedef struct or8_phantom_spec {
  int n_patients;
  int slices_per_patient;
  int image_size;
  const char* modality; /* "C0", "LGE", "T2" or "all" */
  uint64_t seed;
  float noise_level; /* 0 disables acquisition noise */
} or8_phantom_spec;

OR8_API or8_status or8_phantom_spec_default(or8_phantom_spec* spec);
/* Writes one .ori8 file per slice under out_dir plus manifest.tsv. */
OR8_API or8_status or8_generate_dataset(const or8_phantom_spec* spec,
                                        const char* out_dir);

/* ---------- training, transfer, evaluation ----------
 * Datasets are directories produced by or8_generate_dataset (or any
 * manifest.tsv of .ori8 files). Train/val/test are split 50/30/20 by
 * patient, deterministically from the seed; evaluation with the same seed
 * therefore scores the held-out test patients. Orientation variants are
 * generated after splitting.
 */
typedef struct or8_train_options {
  int epochs;
  int batch_size;
  double lr;
  uint64_t seed;
  double train_fraction; /* patient-level subsample of the train split */
  int freeze_conv;       /* only meaningful with an init checkpoint */
  int augment;           /* 0 disables training-time perturbation */
  int input_size;        /* square network input, multiple of 8 */
  int in_channels;
  int conv_channels[3];
  int hidden_units;
} or8_train_options;

OR8_API or8_status or8_train_options_default(or8_train_options* options);

/* init_checkpoint NULL trains from scratch; otherwise fine-tunes from it
 * (freeze_conv pins the conv layers). Writes out_checkpoint, and a
 * per-epoch CSV log when log_csv is non-NULL. */
OR8_API or8_status or8_train(const char* data_dir, const char* modality,
                             const or8_train_options* options,
                             const char* init_checkpoint,
                             const char* out_checkpoint, const char* log_csv);

/* method: "direct", "voting" or "voting-sum". Reports are written when the
 * paths are non-NULL; accuracy_out may be NULL. */
OR8_API or8_status or8_evaluate(const char* data_dir, const char* modality,
                                const char* checkpoint, const char* method,
                                uint64_t seed, const char* report_csv,
                                const char* report_jsonl, double* accuracy_out);

/* Training-set-size sensitivity grid over all three modalities and both
 * prediction methods. fractions NULL / n_fractions 0 selects the default
 * {0.6, 0.5, 0.4, 0.3, 0.2}. */
OR8_API or8_status or8_sweep(const char* data_dir, const double* fractions,
                             int n_fractions, const or8_train_options* options,
                             const char* out_csv, const char* out_jsonl);

/* ---------- inference ---------- */
typedef struct or8_network or8_network;

OR8_API or8_status or8_network_load(const char* path, or8_network** out);
OR8_API void or8_network_destroy(or8_network* network);
OR8_API or8_status or8_network_input_size(const or8_network* network, int* out);
OR8_API or8_status or8_predict(const or8_network* network, const or8_slice* slice,
                               const char* method, int* label_out);
/* Softmax distribution of the direct prediction. */
OR8_API or8_status or8_predict_probs(const or8_network* network,
                                     const or8_slice* slice, float probs_out[8]);
/* Voting prediction followed by the inverse transform back to canonical
 * orientation. */
OR8_API or8_status or8_reorient(const or8_network* network, const or8_slice* slice,
                                or8_slice** corrected_out, int* label_out);

#ifdef __cplusplus
}
#endif

#endif /* ORIENT8_H */
