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
#include <filesystem>
#include <span>
#include <vector>

#include "glp/numkit.hpp"

namespace glp {

enum class Activation : std::uint8_t { leaky_relu = 0, tanh = 1, sigmoid = 2, identity = 3 };

inline constexpr double kLeakySlope = 0.2;

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Activation activation = Activation::identity;
};

/// Power-iteration state of one spectrally normalized weight matrix.
struct SpectralState {
  Eigen::VectorXd u;  // left singular estimate (out)
  Eigen::VectorXd v;  // right singular estimate (in)
  double sigma = 1.0;
};

/// One power-iteration step on W; returns W / sigma_hat with sigma_hat = u^T W v.
Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& w, SpectralState& state);

/// Fully connected network. Batched inputs are column-major: one column per
/// sample.
class Mlp {
 public:
  Mlp() = default;
  /// sizes has one more entry than activations. Parameters start at zero.
  Mlp(std::vector<std::size_t> sizes, std::vector<Activation> activations);

  /// He-style initialization: N(0, gain / fan_in), zero biases.
  static Mlp random(std::vector<std::size_t> sizes, std::vector<Activation> activations, Rng& rng);

  std::size_t input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().weight.cols(); }
  std::size_t output_dim() const noexcept { return layers_.empty() ? 0 : layers_.back().weight.rows(); }
  std::size_t num_layers() const noexcept { return layers_.size(); }
  std::vector<std::size_t> sizes() const;

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }

  bool spectral_norm() const noexcept { return !spectral_.empty(); }
  /// Seeds u, v randomly and runs warmup power iterations.
  void enable_spectral_norm(Rng& rng, int warmup = 5);
  const std::vector<SpectralState>& spectral_states() const noexcept { return spectral_; }
  void set_spectral_states(std::vector<SpectralState> states);
  /// One power iteration on every layer.
  void power_iterate();
  /// Weight used in the forward pass (W / sigma when spectrally normalized).
  Eigen::MatrixXd effective_weight(std::size_t layer) const;

  std::size_t parameter_count() const noexcept;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> params);

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<Layer> layers_;
  std::vector<SpectralState> spectral_;
};

struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  std::vector<Eigen::MatrixXd> pre;     // pre-activations of each layer
  Eigen::MatrixXd output;
};

ForwardCache mlp_forward(const Mlp& net, const Eigen::MatrixXd& x);
Eigen::VectorXd mlp_predict(const Mlp& net, const Eigen::VectorXd& x);
/// Output only, without keeping the cache.
Eigen::MatrixXd mlp_predict(const Mlp& net, const Eigen::MatrixXd& x);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
  Eigen::MatrixXd input;

  static MlpGradients zeros_like(const Mlp& net);
  std::vector<double> flat() const;  // same order as Mlp::flat_parameters
  MlpGradients& operator+=(const MlpGradients& other);
  MlpGradients& operator*=(double s);
};

/// Reverse-mode gradients of sum(upstream .* output), summed over the batch,
/// with respect to the raw parameters and the input.
MlpGradients mlp_grad(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& upstream);

/// Converts gradients taken with respect to effective (normalized) weights
/// into gradients with respect to the raw weights.
void chain_spectral_norm(const Mlp& net, MlpGradients& grads);

double activate(Activation a, double x) noexcept;
double activate_grad(Activation a, double x) noexcept;
double activate_grad2(Activation a, double x) noexcept;

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

/// Bias-corrected Adam update, in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg);
void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state, const AdamConfig& cfg);

/// Binary checkpoint: "GLP1", format version, layer sizes and activations,
/// then little-endian float64 parameters.
std::vector<std::uint8_t> encode_checkpoint(const Mlp& net);
Mlp decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Mlp& net);
Mlp load_checkpoint(const std::filesystem::path& path);

}  // namespace glp
