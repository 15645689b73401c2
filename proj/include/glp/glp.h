/* Copyright 2026 The glp Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef GLP_GLP_H_
#define GLP_GLP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GLP_BUILDING_LIBRARY)
#define GLP_API __declspec(dllexport)
#else
#define GLP_API __declspec(dllimport)
#endif
#else
#define GLP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum glp_status {
  GLP_OK = 0,
  GLP_ERR_INVALID_INPUT = 1,
  GLP_ERR_FORMAT = 2,
  GLP_ERR_IO = 3,
  GLP_ERR_NUMERIC = 4,
  GLP_ERR_DIVERGED = 5,
  GLP_ERR_CONFIG = 6,
  GLP_ERR_INTERNAL = 7
} glp_status;

typedef struct glp_dataset glp_dataset;
typedef struct glp_timeline glp_timeline;

/* Library version string, e.g. "0.1.0". */
GLP_API const char* glp_version(void);
GLP_API const char* glp_status_name(glp_status status);
/* Message of the last failure on the calling thread; "" after success. */
GLP_API const char* glp_last_error(void);
/* Frees strings returned by this library. NULL is ignored. */
GLP_API void glp_string_free(char* s);

/* Resolves a flat JSON config plus key/value overrides (values parsed as
   JSON when possible) into the complete configuration JSON. "seed" must be
   present in one of them. */
GLP_API glp_status glp_config_resolve(const char* config_json, const char* const* keys,
                                      const char* const* values, size_t n_overrides, char** out_json);

/* ---- datasets ---------------------------------------------------------- */

GLP_API glp_status glp_dataset_synth(const char* config_json, glp_dataset** out);
/* Binary records of 1 + 3*side*side bytes; label bytes 0..9 or 255. */
GLP_API glp_status glp_dataset_load(const char* path, int side, glp_dataset** out);
/* Strict CIFAR-10 batch (side 32, labels 0..9). */
GLP_API glp_status glp_dataset_load_cifar10(const char* path, glp_dataset** out);
GLP_API glp_status glp_dataset_save(const glp_dataset* d, const char* path);
GLP_API void glp_dataset_free(glp_dataset* d);

GLP_API size_t glp_dataset_size(const glp_dataset* d);
GLP_API int glp_dataset_side(const glp_dataset* d);
GLP_API int glp_dataset_num_classes(const glp_dataset* d);
GLP_API glp_status glp_dataset_label(const glp_dataset* d, size_t index, int* out);
/* Copies the 3*side*side values of one image (channel-major) into out. */
GLP_API glp_status glp_dataset_pixels(const glp_dataset* d, size_t index, double* out, size_t capacity);

/* ---- single-shot measurements ------------------------------------------ */

typedef struct glp_detect_result {
  double svm_accuracy;
  double forest_accuracy;
  size_t n_train;
  size_t n_test;
  int bins;
} glp_detect_result;

GLP_API glp_status glp_detect(const glp_dataset* real, const glp_dataset* generated, int bins, uint64_t seed,
                              glp_detect_result* out);

typedef struct glp_shift_report {
  double color_kl;
  double gauss_alpha_kl[3];
  double fcd;
  int class_coverage;
  double intra_class_variance;
  double realfake_accuracy;
} glp_shift_report;

/* Trains the reference classifier on `real` (which must be labeled) and
   measures `generated` against it. */
GLP_API glp_status glp_analyze(const glp_dataset* real, const glp_dataset* generated, const char* config_json,
                               glp_shift_report* out);
GLP_API char* glp_shift_report_json(const glp_shift_report* r);

/* ---- loop training ------------------------------------------------------ */

typedef struct glp_iteration_metrics {
  size_t iteration;
  double fcd;
  double color_kl;
  double gauss_alpha_kl;
  int class_coverage;
  double intra_class_variance;
  double realfake_svm;
  double realfake_forest;
} glp_iteration_metrics;

typedef void (*glp_progress_fn)(const glp_iteration_metrics* m, void* user);

/* control != 0 runs the long-training control instead of the loop. */
GLP_API glp_status glp_loop_run(const char* config_json, int control, glp_progress_fn progress, void* user,
                                glp_timeline** out);
GLP_API void glp_timeline_free(glp_timeline* t);

GLP_API size_t glp_timeline_length(const glp_timeline* t);
GLP_API glp_status glp_timeline_metrics(const glp_timeline* t, size_t index, glp_iteration_metrics* out);
/* Returns 1 and sets *iteration when a model diverged, else 0. */
GLP_API int glp_timeline_diverged(const glp_timeline* t, size_t* iteration);
GLP_API glp_status glp_timeline_correlate(const glp_timeline* t, double* out);
GLP_API char* glp_timeline_csv(const glp_timeline* t);

/* Writes manifest.json for a resolved config before a run starts. */
GLP_API glp_status glp_manifest_write(const char* out_dir, const char* command, const char* config_json);
/* Writes timeline.csv, per-iteration CSVs and the plot-data files. */
GLP_API glp_status glp_timeline_write(const glp_timeline* t, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif  // GLP_GLP_H_
