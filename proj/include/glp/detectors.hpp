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

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "glp/data.hpp"
#include "glp/hist.hpp"
#include "glp/numkit.hpp"

namespace glp {

using Points = std::vector<std::vector<double>>;

struct KmeansResult {
  Points centroids;
  std::vector<int> assignments;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // after each assignment pass
};

/// Index of the nearest centroid; ties resolve to the lowest index.
int nearest_centroid(const Points& centroids, std::span<const double> x);

/// k-means++ seeding followed by Lloyd iterations. An emptied cluster is
/// reseeded at the point farthest from its centroid.
KmeansResult kmeans(const Points& points, std::size_t k, Rng& rng, std::size_t max_iters = 100);

/// Frequencies of the fit's own assignments and of extra points assigned to
/// the frozen centroids.
std::pair<ClassHistogram, ClassHistogram> cluster_frequencies(const KmeansResult& result,
                                                              const Points& extra_points);

/// Labels: 0 = real, 1 = generated.
struct LinearSvm {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 / (std * sqrt(dim)); 0 for constant dims
  std::vector<double> weights;
  double bias = 0.0;

  double margin(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return margin(x) > 0.0 ? 1 : 0; }
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int vote = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int predict(std::span<const double> x) const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  /// Majority vote; ties go to class 0.
  int predict(std::span<const double> x) const;
};

struct BinaryClassifier {
  std::variant<LinearSvm, RandomForest> model;
  int predict(std::span<const double> x) const;
  double accuracy(const Points& x, std::span<const int> y) const;
};

/// Pegasos-style stochastic subgradient descent on the L2-regularized hinge
/// loss with step 1/(lambda t). Features are standardized and scaled by
/// 1/sqrt(dim); a constant feature carries the bias.
BinaryClassifier train_linear_svm(const Points& x, std::span<const int> y, std::size_t epochs,
                                  double lambda, Rng& rng);

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 8;
  std::size_t min_samples_split = 2;
};

/// Bootstrap-aggregated Gini trees, sqrt(dim) candidate features per node.
/// Tree t draws from stream t of rng, so results do not depend on build order.
BinaryClassifier train_random_forest(const Points& x, std::span<const int> y, const ForestConfig& cfg,
                                     Rng& rng);

struct DetectorConfig {
  std::size_t svm_epochs = 20;
  double svm_lambda = 1e-3;
  ForestConfig forest{};
  double train_frac = 0.8;
};

struct RealFakeResult {
  double svm_accuracy = 0.0;
  double forest_accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// Per-image color histograms labeled real/generated, 80/20 split, held-out
/// accuracies of both detectors.
RealFakeResult real_fake_experiment(const Dataset& real, const Dataset& generated, int bins, Rng& rng,
                                    const DetectorConfig& cfg = {});

}  // namespace glp
