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

#include "glp/loop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glp/error.hpp"

namespace glp {

namespace {

constexpr std::uint64_t kLoopStream = 0x6c6f6f70;
constexpr std::uint64_t kClusterStream = 0x636c7573;

void check(bool ok, const char* field, const std::string& what) {
  if (!ok) fail(Errc::config, std::string("field \"") + field + "\": " + what);
}

Rng iteration_stream(const LoopConfig& cfg, std::size_t t) { return Rng(cfg.seed, kLoopStream).split(t); }

LossSummary summarize(const std::vector<LossRecord>& trace) {
  LossSummary s;
  s.records = trace.size();
  if (!trace.empty()) {
    s.final_d_loss = trace.back().d_loss;
    s.final_g_loss = trace.back().g_loss;
  }
  return s;
}

Dataset first_n(const Dataset& d, std::size_t n) {
  n = std::min(n, d.size());
  return Dataset(std::vector<Image>(d.images().begin(), d.images().begin() + static_cast<std::ptrdiff_t>(n)));
}

Generator fit_model(const LoopConfig& cfg, const Dataset& d, Rng fit_rng) {
  switch (cfg.model) {
    case ModelKind::bootstrap:
      return bootstrap_generator(d, cfg.bootstrap_noise);
    case ModelKind::gmm:
      return gmm_fit(d, cfg.gmm_components, fit_rng, cfg.gmm_max_iters, cfg.gmm_tol);
    case ModelKind::gan: {
      GanConfig g = cfg.gan;
      g.seed = fit_rng.next_u64();
      return train_gan(d, g);
    }
  }
  fail(Errc::config, "unknown model kind");
}

class ProjectionCollector {
 public:
  ProjectionCollector(const LoopConfig& cfg, const LoopSetup& setup) : n_(cfg.pca_samples) {
    if (n_ == 0) return;
    if (cfg.clusters) {
      for (const auto& c : setup.references.real_clusters.centroids) add("centroid", -1, c);
    }
    for (auto& h : histogram_features(first_n(setup.real.data, n_), cfg.bins)) add("real", -1, std::move(h));
  }

  void add_generated(long iteration, const Dataset& d, int bins) {
    if (n_ == 0) return;
    for (auto& h : histogram_features(first_n(d, n_), bins)) add("generated", iteration, std::move(h));
  }

  std::vector<ProjectedPoint> project() const {
    if (points_.size() < 2) return {};
    const auto xy = pca_project(points_, 2);
    std::vector<ProjectedPoint> out = tags_;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].x = xy[i][0];
      out[i].y = xy[i][1];
    }
    return out;
  }

 private:
  void add(const char* set, long iteration, std::vector<double> p) {
    tags_.push_back({set, iteration, 0.0, 0.0});
    points_.push_back(std::move(p));
  }

  std::size_t n_;
  std::vector<std::vector<double>> points_;
  std::vector<ProjectedPoint> tags_;
};

Timeline start_timeline(const LoopConfig& cfg, const LoopSetup& setup, bool long_training) {
  Timeline tl;
  tl.config = cfg;
  tl.long_training = long_training;
  tl.references = setup.references;
  return tl;
}

}  // namespace

const char* model_kind_name(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::bootstrap:
      return "bootstrap";
    case ModelKind::gmm:
      return "gmm";
    case ModelKind::gan:
      return "gan";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept {
  if (s == "bootstrap") return ModelKind::bootstrap;
  if (s == "gmm") return ModelKind::gmm;
  if (s == "gan") return ModelKind::gan;
  return std::nullopt;
}

void validate(const LoopConfig& cfg) {
  check(cfg.iterations >= 1, "iterations", "must be >= 1");
  check(cfg.bins >= 2, "bins", "must be >= 2");
  check(cfg.eps > 0.0, "eps", "must be > 0");
  check(cfg.gan.steps >= 1, "gan_steps", "must be >= 1");
  check(cfg.gan.batch_size >= 1, "gan_batch_size", "must be >= 1");
  check(cfg.gan.latent_dim >= 1, "gan_latent_dim", "must be >= 1");
  check(cfg.gan.hidden >= 1, "gan_hidden", "must be >= 1");
  check(cfg.gan.gp_lambda >= 0.0, "gan_gp_lambda", "must be >= 0");
  check(cfg.gan.adam.lr > 0.0, "gan_lr", "must be > 0");
  check(cfg.gmm_components >= 1, "gmm_components", "must be >= 1");
  check(cfg.gmm_max_iters >= 1, "gmm_max_iters", "must be >= 1");
  check(cfg.bootstrap_noise >= 0.0, "bootstrap_noise", "must be >= 0");
  if (cfg.dataset_path.empty()) {
    check(cfg.synth.num_classes >= 2, "num_classes", "must be >= 2");
    check(cfg.synth.images_per_class >= 1, "images_per_class", "must be >= 1");
    check(cfg.synth.side >= 4, "side", "must be >= 4");
    check(cfg.synth.pixel_noise_sigma >= 0.0, "pixel_noise_sigma", "must be >= 0");
  } else {
    check(cfg.dataset_side >= 1, "dataset_side", "must be >= 1");
  }
  check(cfg.classifier.hidden >= 1, "classifier_hidden", "must be >= 1");
  check(cfg.classifier.batch_size >= 1, "classifier_batch_size", "must be >= 1");
  check(cfg.detector.train_frac > 0.0 && cfg.detector.train_frac < 1.0, "train_frac", "must be in (0, 1)");
  check(cfg.detector.svm_lambda > 0.0, "svm_lambda", "must be > 0");
  check(cfg.detector.svm_epochs >= 1, "svm_epochs", "must be >= 1");
  check(cfg.detector.forest.n_trees >= 1, "forest_trees", "must be >= 1");
  check(cfg.cluster_k >= 1, "cluster_k", "must be >= 1");
}

LoopSetup prepare(const LoopConfig& cfg) {
  validate(cfg);
  LabeledDataset real;
  if (cfg.dataset_path.empty()) {
    SynthConfig s = cfg.synth;
    s.seed = cfg.seed;
    real = synth_dataset(s);
  } else {
    real = load_cifar10_batch(cfg.dataset_path, cfg.dataset_side);
  }
  return prepare(cfg, std::move(real));
}

LoopSetup prepare(const LoopConfig& cfg, LabeledDataset real) {
  validate(cfg);
  ClassifierConfig cc = cfg.classifier;
  cc.seed = cfg.seed;
  Classifier classifier = train_classifier(real, cc);

  LoopReferences ref;
  ref.real_features = feature_stats(classifier.features(real.data));
  ref.real_histogram = mean_color_histogram(real.data, cfg.bins);
  for (int c = 0; c < kChannels; ++c) ref.real_gauss_alpha_kl[c] = gauss_alpha_kl(ref.real_histogram.channel(c), cfg.eps);
  if (cfg.clusters) {
    const auto feats = histogram_features(real.data, cfg.bins);
    Rng krng(cfg.seed, kClusterStream);
    ref.real_clusters = kmeans(feats, std::min(cfg.cluster_k, feats.size()), krng);
    ref.real_cluster_frequencies =
        class_histogram(ref.real_clusters.assignments, static_cast<int>(ref.real_clusters.centroids.size()));
  }
  return LoopSetup{std::move(real), std::move(classifier), std::move(ref)};
}

IterationMetrics measure(const LoopSetup& setup, const LoopConfig& cfg, const Dataset& generated, Rng& rng) {
  require(generated.side() == setup.real.data.side(), "measure: image side differs from the real data");
  IterationMetrics m;
  m.generated_size = generated.size();
  const auto feats = setup.classifier.features(generated);
  m.fcd = frechet(setup.references.real_features, feature_stats(feats));

  m.mean_histogram = mean_color_histogram(generated, cfg.bins);
  m.color_kl = color_kl(m.mean_histogram, setup.references.real_histogram, cfg.eps);
  double sum = 0.0;
  for (int c = 0; c < kChannels; ++c) {
    m.gauss_alpha_kl_channels[c] = gauss_alpha_kl(m.mean_histogram.channel(c), cfg.eps);
    sum += m.gauss_alpha_kl_channels[c];
  }
  m.gauss_alpha_kl = sum / kChannels;

  std::vector<int> predicted = setup.classifier.predict(generated);
  m.class_histogram = class_histogram(predicted, setup.classifier.num_classes());
  m.class_coverage = class_coverage(m.class_histogram);
  m.intra_class_variance =
      intra_class_variance(LabeledDataset(generated, std::move(predicted), setup.classifier.num_classes()), cfg.bins);

  if (cfg.realfake) {
    Rng rf = rng.split(0);
    const RealFakeResult r = real_fake_experiment(setup.real.data, generated, cfg.bins, rf, cfg.detector);
    m.realfake_svm = r.svm_accuracy;
    m.realfake_forest = r.forest_accuracy;
  }
  if (cfg.clusters) {
    m.cluster_frequencies = cluster_frequencies(setup.references.real_clusters, histogram_features(generated, cfg.bins)).second;
  }
  return m;
}

Timeline run_loop(const LoopConfig& cfg, const ProgressFn& progress) {
  const LoopSetup setup = prepare(cfg);
  Timeline tl = start_timeline(cfg, setup, false);
  ProjectionCollector proj(cfg, setup);

  Dataset current = setup.real.data;
  const std::size_t n = current.size();
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    Rng it = iteration_stream(cfg, t);
    try {
      const Generator g = fit_model(cfg, current, it.split(0));
      Rng srng = it.split(1);
      Dataset next = sample(g, n, srng);
      Rng mrng = it.split(2);
      IterationMetrics m = measure(setup, cfg, next, mrng);
      m.iteration = t;
      m.loss_trace = g.loss_trace();
      m.loss = summarize(m.loss_trace);
      proj.add_generated(static_cast<long>(t), next, cfg.bins);
      tl.metrics.push_back(std::move(m));
      if (progress) progress(tl.metrics.back());
      current = std::move(next);
    } catch (const TrainingDiverged& e) {
      tl.error_iteration = t;
      tl.error = e.what();
      break;
    }
  }
  tl.projection = proj.project();
  return tl;
}

Timeline run_long_training(const LoopConfig& cfg, const ProgressFn& progress) {
  const LoopSetup setup = prepare(cfg);
  Timeline tl = start_timeline(cfg, setup, true);
  ProjectionCollector proj(cfg, setup);

  const Dataset& real = setup.real.data;
  const std::size_t n = real.size();
  std::optional<Generator> fixed;
  std::optional<GanTrainer> trainer;
  Eigen::MatrixXd x;
  std::size_t trace_start = 0;

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    Rng it = iteration_stream(cfg, t);
    try {
      std::optional<Generator> g;
      if (cfg.model == ModelKind::gan) {
        if (!trainer) {
          GanConfig gc = cfg.gan;
          gc.seed = it.split(0).next_u64();
          trainer.emplace(real[0].size(), gc);
          x = to_matrix(real);
        }
        trainer->train(x, cfg.gan.steps);
        g = make_generator(*trainer, real.side());
      } else {
        if (!fixed) fixed = fit_model(cfg, real, it.split(0));
        g = *fixed;
      }
      Rng srng = it.split(1);
      const Dataset next = sample(*g, n, srng);
      Rng mrng = it.split(2);
      IterationMetrics m = measure(setup, cfg, next, mrng);
      m.iteration = t;
      const auto& trace = g->loss_trace();
      if (cfg.model == ModelKind::gan) {
        m.loss_trace.assign(trace.begin() + static_cast<std::ptrdiff_t>(trace_start), trace.end());
        trace_start = trace.size();
      } else if (t == 0) {
        m.loss_trace = trace;
      }
      m.loss = summarize(m.loss_trace);
      proj.add_generated(static_cast<long>(t), next, cfg.bins);
      tl.metrics.push_back(std::move(m));
      if (progress) progress(tl.metrics.back());
    } catch (const TrainingDiverged& e) {
      tl.error_iteration = t;
      tl.error = e.what();
      break;
    }
  }
  tl.projection = proj.project();
  return tl;
}

double correlate(const Timeline& t) {
  require(t.metrics.size() >= 2, "correlate: need at least 2 iterations");
  std::vector<double> fcd, kl_values;
  for (const auto& m : t.metrics) {
    fcd.push_back(m.fcd);
    kl_values.push_back(m.color_kl);
  }
  return r_squared(fcd, kl_values);
}

ShiftReport shift_report(const LoopSetup& setup, const LoopConfig& cfg, const Dataset& generated) {
  Rng rng(cfg.seed, kLoopStream);
  const IterationMetrics m = measure(setup, cfg, generated, rng);
  ShiftReport r;
  r.color_kl = m.color_kl;
  r.gauss_alpha_kl = m.gauss_alpha_kl_channels;
  r.fcd = m.fcd;
  r.class_coverage = m.class_coverage;
  r.intra_class_variance = m.intra_class_variance;
  r.realfake_accuracy = m.realfake_forest;
  return r;
}

}  // namespace glp
