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
#include <span>
#include <vector>

#include "glp/data.hpp"
#include "glp/hist.hpp"
#include "glp/numkit.hpp"

namespace glp {

inline constexpr double kDefaultKlEps = 1e-6;
inline constexpr double kAlphaMax = 10.0;
/// Upper bound on the fitted sigma (the width of the value range).
inline constexpr double kSigmaMax = 1.0;

/// KL(p || q) in nats after adding eps to every entry and renormalizing.
double kl(std::span<const double> p, std::span<const double> q, double eps = kDefaultKlEps);

/// Sum of the three per-channel KLs.
double color_kl(const ColorHistogram& pg, const ColorHistogram& pr, double eps = kDefaultKlEps);

struct GaussianFit {
  double amplitude = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double area_fraction = 1.0;  // mass of N(mu, sigma^2) inside [0, 1]
  double alpha = 1.0;          // min(1 / area_fraction, kAlphaMax)
  double residual = 0.0;       // final sum of squared errors
  double initial_residual = 0.0;
  int iterations = 0;
};

/// Least-squares fit of A*exp(-(t-mu)^2 / (2 sigma^2)) at bin centers.
///
/// Starts from the histogram moments and takes damped Gauss-Newton steps,
/// accepting a step only when it lowers the residual. sigma never drops below
/// 1/(4b).
GaussianFit gaussian_fit(std::span<const double> channel_hist);

/// Renormalized Gaussian density evaluated at the b bin centers.
std::vector<double> discretized_gaussian(double mu, double sigma, int bins);

/// alpha * KL(hist || fitted Gaussian): distance from Gaussianity, penalized
/// when the fit only covers a tail of its curve inside [0, 1].
double gauss_alpha_kl(std::span<const double> channel_hist, double eps = kDefaultKlEps);

struct FeatureStats {
  std::vector<double> mean;
  SymMatrix cov;

  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

FeatureStats feature_stats(const std::vector<std::vector<double>>& features);

/// Frechet distance between Gaussians:
/// |mu1-mu2|^2 + tr(C1 + C2 - 2 (C1^1/2 C2 C1^1/2)^1/2).
double frechet(const FeatureStats& a, const FeatureStats& b);

/// Squared Pearson correlation; 0 when either side has zero variance.
double r_squared(std::span<const double> xs, std::span<const double> ys);

int class_coverage(const ClassHistogram& h, double tau);
/// Uses tau = 0.1 / C.
int class_coverage(const ClassHistogram& h);

/// Mean over classes (with at least two members) of the trace of the
/// covariance of member color histograms.
double intra_class_variance(const LabeledDataset& d, int bins);

struct ShiftReport {
  double color_kl = 0.0;
  std::array<double, 3> gauss_alpha_kl{};
  double fcd = 0.0;
  int class_coverage = 0;
  double intra_class_variance = 0.0;
  double realfake_accuracy = 0.5;
};

}  // namespace glp
