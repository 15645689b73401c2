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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glp/data.hpp"
#include "glp/detectors.hpp"
#include "glp/hist.hpp"
#include "glp/measures.hpp"
#include "glp/models.hpp"

namespace glp {

enum class ModelKind { bootstrap, gmm, gan };

const char* model_kind_name(ModelKind k) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept;

struct LoopConfig {
  std::size_t iterations = 6;
  ModelKind model = ModelKind::gmm;

  /// GAN settings; the seed field is ignored (derived from `seed` per run).
  GanConfig gan{};
  std::size_t gmm_components = 2;
  std::size_t gmm_max_iters = 100;
  double gmm_tol = 1e-6;
  double bootstrap_noise = 0.0;

  /// Synthetic real data; its seed follows `seed`. Ignored when
  /// dataset_path is set.
  SynthConfig synth{};
  std::string dataset_path;
  int dataset_side = 32;

  int bins = kDefaultBins;
  double eps = kDefaultKlEps;
  std::uint64_t seed = 1;

  ClassifierConfig classifier{};
  DetectorConfig detector{};
  bool realfake = true;
  bool clusters = true;
  std::size_t cluster_k = 10;
  /// Per-set sample count kept for the 2-D PCA plot data; 0 disables it.
  std::size_t pca_samples = 200;
};

/// Throws Error(Errc::config) naming the offending field.
void validate(const LoopConfig& cfg);

struct LossSummary {
  std::size_t records = 0;
  double final_d_loss = 0.0;
  double final_g_loss = 0.0;
};

struct IterationMetrics {
  std::size_t iteration = 0;
  std::size_t generated_size = 0;
  double fcd = 0.0;
  double color_kl = 0.0;
  std::array<double, 3> gauss_alpha_kl_channels{};
  double gauss_alpha_kl = 0.0;  // mean over channels
  int class_coverage = 0;
  ClassHistogram class_histogram;
  double intra_class_variance = 0.0;
  double realfake_svm = 0.0;
  double realfake_forest = 0.0;
  ClassHistogram cluster_frequencies;  // generated data on the frozen real centroids
  ColorHistogram mean_histogram;
  LossSummary loss;
  std::vector<LossRecord> loss_trace;
};

/// Everything computed once from the real data and never touched again.
struct LoopReferences {
  FeatureStats real_features;
  ColorHistogram real_histogram;
  std::array<double, 3> real_gauss_alpha_kl{};
  KmeansResult real_clusters;
  ClassHistogram real_cluster_frequencies;
  friend bool operator==(const LoopReferences& a, const LoopReferences& b) {
    return a.real_features == b.real_features && a.real_histogram == b.real_histogram &&
           a.real_gauss_alpha_kl == b.real_gauss_alpha_kl &&
           a.real_clusters.centroids == b.real_clusters.centroids &&
           a.real_clusters.assignments == b.real_clusters.assignments &&
           a.real_cluster_frequencies == b.real_cluster_frequencies;
  }
};

struct ProjectedPoint {
  std::string set;  // "centroid", "real" or "generated"
  long iteration = -1;
  double x = 0.0;
  double y = 0.0;
};

struct Timeline {
  LoopConfig config;
  bool long_training = false;
  std::vector<IterationMetrics> metrics;
  LoopReferences references;
  /// Set when a model diverged; metrics holds the iterations before it.
  std::optional<std::size_t> error_iteration;
  std::string error;
  std::vector<ProjectedPoint> projection;
};

/// Real data, frozen classifier and references for a configuration.
struct LoopSetup {
  LabeledDataset real;
  Classifier classifier;
  LoopReferences references;
};

LoopSetup prepare(const LoopConfig& cfg);
/// Same, with the real data supplied by the caller.
LoopSetup prepare(const LoopConfig& cfg, LabeledDataset real);

/// Called after each iteration (or checkpoint) completes.
using ProgressFn = std::function<void(const IterationMetrics&)>;

/// D0 is the real data; iteration t fits a fresh model on D_t, samples
/// D_{t+1} of size |D0| and measures it against the real references.
Timeline run_loop(const LoopConfig& cfg, const ProgressFn& progress = {});
/// One model trained on real data only, checkpointed at every per-iteration
/// budget so the result aligns index by index with run_loop.
Timeline run_long_training(const LoopConfig& cfg, const ProgressFn& progress = {});

/// Measures one generated dataset against the setup's references. Streams
/// are taken from rng.
IterationMetrics measure(const LoopSetup& setup, const LoopConfig& cfg, const Dataset& generated, Rng& rng);

/// r_squared over the (fcd, color_kl) pairs.
double correlate(const Timeline& t);

/// One-shot comparison of a stored generated dataset against real data.
ShiftReport shift_report(const LoopSetup& setup, const LoopConfig& cfg, const Dataset& generated);

}  // namespace glp
