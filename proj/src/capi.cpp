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

#include "glp/glp.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "glp/config.hpp"
#include "glp/data.hpp"
#include "glp/detectors.hpp"
#include "glp/error.hpp"
#include "glp/loop.hpp"
#include "glp/report.hpp"

struct glp_dataset {
  glp::LabeledDataset data;
};

struct glp_timeline {
  glp::Timeline timeline;
};

namespace {

thread_local std::string g_last_error;

glp_status to_status(glp::Errc c) {
  switch (c) {
    case glp::Errc::invalid_input:
      return GLP_ERR_INVALID_INPUT;
    case glp::Errc::format:
      return GLP_ERR_FORMAT;
    case glp::Errc::io:
      return GLP_ERR_IO;
    case glp::Errc::numeric:
      return GLP_ERR_NUMERIC;
    case glp::Errc::diverged:
      return GLP_ERR_DIVERGED;
    case glp::Errc::config:
      return GLP_ERR_CONFIG;
  }
  return GLP_ERR_INTERNAL;
}

template <class F>
glp_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return GLP_OK;
  } catch (const glp::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GLP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GLP_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) glp::fail(glp::Errc::invalid_input, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

glp::LoopConfig resolve(const char* json) { return glp::parse_config(json == nullptr ? "" : json).config; }

glp_iteration_metrics to_c(const glp::IterationMetrics& m) {
  return glp_iteration_metrics{m.iteration,     m.fcd,          m.color_kl,          m.gauss_alpha_kl,
                               m.class_coverage, m.intra_class_variance, m.realfake_svm, m.realfake_forest};
}

}  // namespace

extern "C" {

GLP_API const char* glp_version(void) { return GLP_VERSION; }

GLP_API const char* glp_status_name(glp_status status) {
  switch (status) {
    case GLP_OK:
      return "ok";
    case GLP_ERR_INVALID_INPUT:
      return "invalid input";
    case GLP_ERR_FORMAT:
      return "format error";
    case GLP_ERR_IO:
      return "I/O error";
    case GLP_ERR_NUMERIC:
      return "numeric error";
    case GLP_ERR_DIVERGED:
      return "training diverged";
    case GLP_ERR_CONFIG:
      return "config error";
    case GLP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

GLP_API const char* glp_last_error(void) { return g_last_error.c_str(); }

GLP_API void glp_string_free(char* s) { std::free(s); }

GLP_API glp_status glp_config_resolve(const char* config_json, const char* const* keys, const char* const* values,
                                      size_t n_overrides, char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    if (n_overrides > 0) {
      need(keys, "keys");
      need(values, "values");
    }
    std::vector<glp::Override> ov;
    for (size_t i = 0; i < n_overrides; ++i) {
      need(keys[i], "override key");
      need(values[i], "override value");
      ov.emplace_back(keys[i], values[i]);
    }
    const auto parsed = glp::parse_config(config_json == nullptr ? "" : config_json, ov);
    *out_json = dup_string(glp::config_to_json(parsed.config));
  });
}

GLP_API glp_status glp_dataset_synth(const char* config_json, glp_dataset** out) {
  return guarded([&] {
    need(out, "out");
    const glp::LoopConfig cfg = resolve(config_json);
    glp::SynthConfig s = cfg.synth;
    s.seed = cfg.seed;
    *out = new glp_dataset{glp::synth_dataset(s)};
  });
}

GLP_API glp_status glp_dataset_load(const char* path, int side, glp_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new glp_dataset{glp::load_records(path, side)};
  });
}

GLP_API glp_status glp_dataset_load_cifar10(const char* path, glp_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new glp_dataset{glp::load_cifar10_batch(path)};
  });
}

GLP_API glp_status glp_dataset_save(const glp_dataset* d, const char* path) {
  return guarded([&] {
    need(d, "dataset");
    need(path, "path");
    glp::export_records(path, d->data.data, d->data.labels);
  });
}

GLP_API void glp_dataset_free(glp_dataset* d) { delete d; }

GLP_API size_t glp_dataset_size(const glp_dataset* d) { return d == nullptr ? 0 : d->data.size(); }

GLP_API int glp_dataset_side(const glp_dataset* d) { return d == nullptr ? 0 : d->data.data.side(); }

GLP_API int glp_dataset_num_classes(const glp_dataset* d) { return d == nullptr ? 0 : d->data.num_classes; }

GLP_API glp_status glp_dataset_label(const glp_dataset* d, size_t index, int* out) {
  return guarded([&] {
    need(d, "dataset");
    need(out, "out");
    glp::require(index < d->data.size(), "dataset index out of range");
    *out = d->data.labels[index];
  });
}

GLP_API glp_status glp_dataset_pixels(const glp_dataset* d, size_t index, double* out, size_t capacity) {
  return guarded([&] {
    need(d, "dataset");
    need(out, "out");
    glp::require(index < d->data.size(), "dataset index out of range");
    const auto px = d->data.data[index].values();
    glp::require(capacity >= px.size(), "output buffer too small");
    std::memcpy(out, px.data(), px.size() * sizeof(double));
  });
}

GLP_API glp_status glp_detect(const glp_dataset* real, const glp_dataset* generated, int bins, uint64_t seed,
                              glp_detect_result* out) {
  return guarded([&] {
    need(real, "real");
    need(generated, "generated");
    need(out, "out");
    glp::Rng rng(seed, 0x64657465);
    const auto r = glp::real_fake_experiment(real->data.data, generated->data.data, bins, rng);
    *out = glp_detect_result{r.svm_accuracy, r.forest_accuracy, r.n_train, r.n_test, bins};
  });
}

GLP_API glp_status glp_analyze(const glp_dataset* real, const glp_dataset* generated, const char* config_json,
                               glp_shift_report* out) {
  return guarded([&] {
    need(real, "real");
    need(generated, "generated");
    need(out, "out");
    glp::LoopConfig cfg = resolve(config_json);
    cfg.realfake = true;
    const glp::LoopSetup setup = glp::prepare(cfg, real->data);
    const glp::ShiftReport r = glp::shift_report(setup, cfg, generated->data.data);
    *out = glp_shift_report{r.color_kl,
                            {r.gauss_alpha_kl[0], r.gauss_alpha_kl[1], r.gauss_alpha_kl[2]},
                            r.fcd,
                            r.class_coverage,
                            r.intra_class_variance,
                            r.realfake_accuracy};
  });
}

GLP_API char* glp_shift_report_json(const glp_shift_report* r) {
  if (r == nullptr) return nullptr;
  glp::ShiftReport s;
  s.color_kl = r->color_kl;
  s.gauss_alpha_kl = {r->gauss_alpha_kl[0], r->gauss_alpha_kl[1], r->gauss_alpha_kl[2]};
  s.fcd = r->fcd;
  s.class_coverage = r->class_coverage;
  s.intra_class_variance = r->intra_class_variance;
  s.realfake_accuracy = r->realfake_accuracy;
  try {
    return dup_string(glp::shift_report_json(s));
  } catch (...) {
    return nullptr;
  }
}

GLP_API glp_status glp_loop_run(const char* config_json, int control, glp_progress_fn progress, void* user,
                                glp_timeline** out) {
  return guarded([&] {
    need(out, "out");
    const glp::LoopConfig cfg = resolve(config_json);
    glp::ProgressFn fn;
    if (progress != nullptr) {
      fn = [progress, user](const glp::IterationMetrics& m) {
        const glp_iteration_metrics c = to_c(m);
        progress(&c, user);
      };
    }
    auto* t = new glp_timeline{control != 0 ? glp::run_long_training(cfg, fn) : glp::run_loop(cfg, fn)};
    *out = t;
  });
}

GLP_API void glp_timeline_free(glp_timeline* t) { delete t; }

GLP_API size_t glp_timeline_length(const glp_timeline* t) { return t == nullptr ? 0 : t->timeline.metrics.size(); }

GLP_API glp_status glp_timeline_metrics(const glp_timeline* t, size_t index, glp_iteration_metrics* out) {
  return guarded([&] {
    need(t, "timeline");
    need(out, "out");
    glp::require(index < t->timeline.metrics.size(), "timeline index out of range");
    *out = to_c(t->timeline.metrics[index]);
  });
}

GLP_API int glp_timeline_diverged(const glp_timeline* t, size_t* iteration) {
  if (t == nullptr || !t->timeline.error_iteration) return 0;
  if (iteration != nullptr) *iteration = *t->timeline.error_iteration;
  return 1;
}

GLP_API glp_status glp_timeline_correlate(const glp_timeline* t, double* out) {
  return guarded([&] {
    need(t, "timeline");
    need(out, "out");
    *out = glp::correlate(t->timeline);
  });
}

GLP_API char* glp_timeline_csv(const glp_timeline* t) {
  if (t == nullptr) return nullptr;
  try {
    return dup_string(glp::timeline_csv(t->timeline));
  } catch (...) {
    return nullptr;
  }
}

GLP_API glp_status glp_manifest_write(const char* out_dir, const char* command, const char* config_json) {
  return guarded([&] {
    need(out_dir, "out_dir");
    need(command, "command");
    const glp::LoopConfig cfg = resolve(config_json);
    glp::ManifestInfo info{command, glp::utc_timestamp(), glp::planned_outputs(cfg)};
    glp::write_manifest(out_dir, cfg, info);
  });
}

GLP_API glp_status glp_timeline_write(const glp_timeline* t, const char* out_dir) {
  return guarded([&] {
    need(t, "timeline");
    need(out_dir, "out_dir");
    glp::write_timeline(out_dir, t->timeline);
  });
}

}  // extern "C"
