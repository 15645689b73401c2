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

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "glp/data.hpp"
#include "glp/mlp.hpp"
#include "glp/numkit.hpp"

namespace glp {

/// Flattens images into the columns of a (3*side*side) x n matrix.
Eigen::MatrixXd to_matrix(const Dataset& d);
/// Inverse of to_matrix; values are clamped to [0, 1].
Dataset from_matrix(const Eigen::MatrixXd& m, int side);

// ---------------------------------------------------------------------------
// GAN

enum class GanLoss { non_saturating, wasserstein_gp };

struct GanConfig {
  std::size_t latent_dim = 32;
  std::size_t hidden = 128;
  GanLoss loss = GanLoss::non_saturating;
  double gp_lambda = 10.0;
  bool spectral_norm = false;
  std::size_t steps = 5000;
  std::size_t batch_size = 64;
  AdamConfig adam{};
  /// 0 selects the loss default: 1 for non-saturating, 5 for WGAN-GP.
  std::size_t d_steps_per_g = 0;
  std::uint64_t seed = 1;

  std::size_t resolved_d_steps() const noexcept {
    if (d_steps_per_g > 0) return d_steps_per_g;
    return loss == GanLoss::wasserstein_gp ? 5 : 1;
  }
};

struct LossRecord {
  std::size_t step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
};

struct PenaltyResult {
  double value = 0.0;
  MlpGradients grads;             // d value / d raw parameters
  std::vector<double> grad_norms;  // |grad_x D(x_hat)| per sample
};

/// Gradient penalty mean((|grad_x D(x_hat)| - 1)^2) at fixed interpolates
/// (columns of x_hat), with its exact parameter gradient (double backprop).
PenaltyResult gradient_penalty_at(const Mlp& disc, const Eigen::MatrixXd& x_hat);

/// Draws eps ~ U(0,1) per sample, x_hat = eps*real + (1-eps)*fake.
PenaltyResult gradient_penalty(const Mlp& disc, const Eigen::MatrixXd& x_real,
                               const Eigen::MatrixXd& x_fake, Rng& rng);

/// Resumable GAN training state; train_gan is a thin wrapper.
class GanTrainer {
 public:
  GanTrainer(std::size_t data_dim, const GanConfig& cfg);

  /// Runs n generator steps (each preceded by d_steps_per_g critic steps).
  void train(const Eigen::MatrixXd& data, std::size_t n);

  const Mlp& generator() const noexcept { return gen_; }
  const Mlp& discriminator() const noexcept { return disc_; }
  const std::vector<LossRecord>& trace() const noexcept { return trace_; }
  std::size_t steps_done() const noexcept { return step_; }
  const GanConfig& config() const noexcept { return cfg_; }

  /// Called after every generator step with the step count so far.
  std::function<void(const GanTrainer&)> on_step;

 private:
  void discriminator_step(const Eigen::MatrixXd& data, double& d_loss);
  double generator_step();
  Eigen::MatrixXd latent_batch();
  Eigen::MatrixXd data_batch(const Eigen::MatrixXd& data);

  GanConfig cfg_;
  Mlp gen_;
  Mlp disc_;
  AdamState g_opt_;
  AdamState d_opt_;
  Rng rng_;
  std::size_t step_ = 0;
  std::vector<LossRecord> trace_;
};

// ---------------------------------------------------------------------------
// Generators

struct BootstrapModel {
  Dataset data;
  double noise_sigma = 0.0;
};

struct Gmm {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;
  std::vector<double> log_likelihood;  // mean per-sample log-likelihood after each E-step
};

inline constexpr double kGmmVarianceFloor = 1e-6;

struct GanModel {
  Mlp net;
  std::size_t latent_dim = 0;
};

enum class GeneratorKind { bootstrap, gmm, gan };

class Generator {
 public:
  using Payload = std::variant<BootstrapModel, Gmm, GanModel>;

  Generator(Payload payload, int side, std::vector<LossRecord> trace = {});

  GeneratorKind kind() const noexcept { return static_cast<GeneratorKind>(payload_.index()); }
  int side() const noexcept { return side_; }
  const Payload& payload() const noexcept { return payload_; }
  const std::vector<LossRecord>& loss_trace() const noexcept { return trace_; }

 private:
  Payload payload_;
  int side_;
  std::vector<LossRecord> trace_;
};

Generator train_gan(const Dataset& d, const GanConfig& cfg);
Generator make_generator(const GanTrainer& trainer, int side);
/// Resamples the data in shuffled passes (no repeats within a pass), plus
/// optional clamped Gaussian pixel noise.
Generator bootstrap_generator(const Dataset& d, double noise_sigma);
/// Diagonal-covariance EM with k-means++ initialized means.
Generator gmm_fit(const Dataset& d, std::size_t k, Rng& rng, std::size_t max_iters = 100, double tol = 1e-6);

/// n i.i.d. draws, clamped to [0, 1].
Dataset sample(const Generator& g, std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// Classifier

struct ClassifierConfig {
  std::size_t hidden = 64;
  std::size_t epochs = 15;
  std::size_t min_steps = 200;  // small datasets keep training past `epochs`
  std::size_t batch_size = 64;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
  std::uint64_t seed = 1;
};

/// MLP 3m -> hidden -> C trained with softmax cross-entropy. The hidden layer
/// activations are the feature space of the Frechet distance surrogate.
class Classifier {
 public:
  Classifier(Mlp net, int num_classes) : net_(std::move(net)), num_classes_(num_classes) {}

  int num_classes() const noexcept { return num_classes_; }
  std::size_t feature_dim() const noexcept { return net_.layers().front().weight.rows(); }
  const Mlp& network() const noexcept { return net_; }

  int predict(const Image& x) const;
  std::vector<int> predict(const Dataset& d) const;
  std::vector<double> features(const Image& x) const;
  std::vector<std::vector<double>> features(const Dataset& d) const;

 private:
  Mlp net_;
  int num_classes_;
};

Classifier train_classifier(const LabeledDataset& d, const ClassifierConfig& cfg);

}  // namespace glp
