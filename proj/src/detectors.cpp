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

#include "glp/detectors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "glp/error.hpp"

namespace glp {

int nearest_centroid(const Points& centroids, std::span<const double> x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(centroids[c], x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

KmeansResult kmeans(const Points& points, std::size_t k, Rng& rng, std::size_t max_iters) {
  require(!points.empty(), "kmeans: no points");
  require(k >= 1, "kmeans: k must be >= 1");
  require(k <= points.size(), "kmeans: k exceeds the number of points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) require(p.size() == dim, "kmeans: ragged points");

  KmeansResult res;
  for (std::size_t idx : kmeanspp_seeds(points, k, rng)) res.centroids.push_back(points[idx]);
  res.assignments.assign(points.size(), -1);

  auto assign = [&]() {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int c = nearest_centroid(res.centroids, points[i]);
      changed = changed || c != res.assignments[i];
      res.assignments[i] = c;
      inertia += squared_distance(points[i], res.centroids[c]);
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    return changed;
  };

  assign();
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    Points sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(res.assignments[i]);
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] += points[i][j];
    }
    std::vector<char> used(points.size(), 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < dim; ++j) res.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (used[i]) continue;
        const double d = squared_distance(points[i], res.centroids[static_cast<std::size_t>(res.assignments[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      used[far] = 1;
      res.centroids[c] = points[far];
    }
    if (!assign()) break;
  }
  return res;
}

std::pair<ClassHistogram, ClassHistogram> cluster_frequencies(const KmeansResult& result,
                                                              const Points& extra_points) {
  const int k = static_cast<int>(result.centroids.size());
  require(k >= 1, "cluster_frequencies: empty clustering");
  const std::size_t dim = result.centroids.front().size();
  std::vector<int> extra;
  extra.reserve(extra_points.size());
  for (const auto& p : extra_points) {
    require(p.size() == dim, "cluster_frequencies: dimension mismatch");
    extra.push_back(nearest_centroid(result.centroids, p));
  }
  return {class_histogram(result.assignments, k), class_histogram(extra, k)};
}

// ---------------------------------------------------------------------------

double LinearSvm::margin(std::span<const double> x) const {
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * (x[j] - mean[j]) * scale[j];
  return s;
}

int DecisionTree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes[n].feature >= 0) n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
  return nodes[n].vote;
}

int RandomForest::predict(std::span<const double> x) const {
  std::size_t ones = 0;
  for (const auto& t : trees) ones += t.predict(x) == 1;
  return 2 * ones > trees.size() ? 1 : 0;
}

int BinaryClassifier::predict(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

double BinaryClassifier::accuracy(const Points& x, std::span<const int> y) const {
  require(x.size() == y.size() && !x.empty(), "accuracy: size mismatch");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ok += predict(x[i]) == y[i];
  return static_cast<double>(ok) / static_cast<double>(x.size());
}

namespace {

std::size_t check_binary(const Points& x, std::span<const int> y) {
  require(!x.empty() && x.size() == y.size(), "detector: features and labels differ in length");
  const std::size_t dim = x.front().size();
  require(dim >= 1, "detector: empty feature vectors");
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i].size() == dim, "detector: ragged features");
    require(y[i] == 0 || y[i] == 1, "detector: labels must be 0 or 1");
    has0 = has0 || y[i] == 0;
    has1 = has1 || y[i] == 1;
  }
  require(has0 && has1, "detector: both classes must be present");
  return dim;
}

}  // namespace

BinaryClassifier train_linear_svm(const Points& x, std::span<const int> y, std::size_t epochs,
                                  double lambda, Rng& rng) {
  const std::size_t dim = check_binary(x, y);
  require(lambda > 0.0, "svm: lambda must be positive");
  require(epochs >= 1, "svm: epochs must be >= 1");
  const double n = static_cast<double>(x.size());

  LinearSvm svm;
  svm.mean.assign(dim, 0.0);
  svm.scale.assign(dim, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < dim; ++j) svm.mean[j] += row[j];
  for (double& m : svm.mean) m /= n;
  for (std::size_t j = 0; j < dim; ++j) {
    double ss = 0.0;
    for (const auto& row : x) ss += (row[j] - svm.mean[j]) * (row[j] - svm.mean[j]);
    const double sd = std::sqrt(ss / n);
    svm.scale[j] = sd > 1e-12 ? 1.0 / (sd * std::sqrt(static_cast<double>(dim))) : 0.0;
  }

  Points z(x.size(), std::vector<double>(dim));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) z[i][j] = (x[i][j] - svm.mean[j]) * svm.scale[j];

  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;
  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      double m = b;
      for (std::size_t j = 0; j < dim; ++j) m += w[j] * z[i][j];
      m *= yi;
      const double shrink = 1.0 - eta * lambda;
      for (double& wj : w) wj *= shrink;
      b *= shrink;
      if (m < 1.0) {
        for (std::size_t j = 0; j < dim; ++j) w[j] += eta * yi * z[i][j];
        b += eta * yi;
      }
    }
  }
  svm.weights = std::move(w);
  svm.bias = b;
  return BinaryClassifier{std::move(svm)};
}

namespace {

struct TreeBuilder {
  const Points& x;
  std::span<const int> y;
  const ForestConfig& cfg;
  Rng& rng;
  std::size_t mtry;
  DecisionTree tree;

  static double gini(std::size_t n0, std::size_t n1) {
    const double n = static_cast<double>(n0 + n1);
    if (n == 0.0) return 0.0;
    const double p0 = n0 / n, p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
  }

  int build(std::vector<std::size_t>& idx, std::size_t depth) {
    std::size_t n1 = 0;
    for (std::size_t i : idx) n1 += y[i] == 1;
    const std::size_t n0 = idx.size() - n1;
    const int node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, n1 > n0 ? 1 : 0});
    if (depth >= cfg.max_depth || n0 == 0 || n1 == 0 || idx.size() < cfg.min_samples_split) return node;

    const std::size_t dim = x.front().size();
    std::vector<std::size_t> dims(dim);
    std::iota(dims.begin(), dims.end(), 0);
    for (std::size_t k = 0; k < mtry; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(dim - k));
      std::swap(dims[k], dims[j]);
    }

    const double parent = gini(n0, n1) * static_cast<double>(idx.size());
    double best_score = parent - 1e-12;
    int best_feature = -1;
    double best_thr = 0.0;
    std::vector<std::pair<double, int>> col(idx.size());
    for (std::size_t k = 0; k < mtry; ++k) {
      const std::size_t f = dims[k];
      for (std::size_t i = 0; i < idx.size(); ++i) col[i] = {x[idx[i]][f], y[idx[i]]};
      std::sort(col.begin(), col.end());
      std::size_t l0 = 0, l1 = 0;
      for (std::size_t i = 0; i + 1 < col.size(); ++i) {
        (col[i].second == 1 ? l1 : l0) += 1;
        if (col[i].first == col[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = col.size() - nl;
        const double score = gini(l0, l1) * static_cast<double>(nl) + gini(n0 - l0, n1 - l1) * static_cast<double>(nr);
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_thr = 0.5 * (col[i].first + col[i + 1].first);
        }
      }
    }
    if (best_feature < 0) return node;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) (x[i][best_feature] <= best_thr ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    tree.nodes[node].feature = best_feature;
    tree.nodes[node].threshold = best_thr;
    const int l = build(left, depth + 1);
    tree.nodes[node].left = l;
    const int r = build(right, depth + 1);
    tree.nodes[node].right = r;
    return node;
  }
};

}  // namespace

BinaryClassifier train_random_forest(const Points& x, std::span<const int> y, const ForestConfig& cfg,
                                     Rng& rng) {
  const std::size_t dim = check_binary(x, y);
  require(cfg.n_trees >= 1, "forest: n_trees must be >= 1");
  const std::size_t mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dim))));

  RandomForest forest;
  forest.trees.resize(cfg.n_trees);
  auto grow = [&](std::size_t t) {
    Rng tree_rng = rng.split(t);
    std::vector<std::size_t> idx(x.size());
    for (auto& i : idx) i = static_cast<std::size_t>(tree_rng.below(x.size()));
    TreeBuilder builder{x, y, cfg, tree_rng, mtry, {}};
    builder.build(idx, 0);
    forest.trees[t] = std::move(builder.tree);
  };

  const std::size_t workers = std::min<std::size_t>(cfg.n_trees, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t t = 0; t < cfg.n_trees; ++t) grow(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < cfg.n_trees; t = next++) grow(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  (void)rng.next_u64();  // advance the parent so consecutive forests differ
  return BinaryClassifier{std::move(forest)};
}

RealFakeResult real_fake_experiment(const Dataset& real, const Dataset& generated, int bins, Rng& rng,
                                    const DetectorConfig& cfg) {
  require(!real.empty() && !generated.empty(), "real_fake: both datasets must be non-empty");
  require(real.side() == generated.side(), "real_fake: image sides differ");

  Points features = histogram_features(real, bins);
  auto gen_features = histogram_features(generated, bins);
  std::vector<int> labels(features.size(), 0);
  labels.resize(features.size() + gen_features.size(), 1);
  features.insert(features.end(), std::make_move_iterator(gen_features.begin()),
                  std::make_move_iterator(gen_features.end()));

  const std::size_t n = features.size();
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_frac * static_cast<double>(n)));
  require(n_train >= 1 && n_train < n, "real_fake: split would leave one side empty");

  // Identical feature vectors form one group and stay on one side of the split.
  std::map<std::vector<double>, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] = group_of.emplace(features[i], groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng = rng.split(0);
  split_rng.shuffle(order);

  Points x_train, x_test;
  std::vector<int> y_train, y_test;
  for (std::size_t g : order) {
    const bool train = x_train.size() < n_train;
    for (std::size_t i : groups[g]) {
      (train ? x_train : x_test).push_back(features[i]);
      (train ? y_train : y_test).push_back(labels[i]);
    }
  }
  require(!x_test.empty(), "real_fake: split would leave one side empty");

  RealFakeResult out;
  out.n_train = x_train.size();
  out.n_test = x_test.size();
  Rng svm_rng = rng.split(1);
  Rng forest_rng = rng.split(2);
  out.svm_accuracy = train_linear_svm(x_train, y_train, cfg.svm_epochs, cfg.svm_lambda, svm_rng).accuracy(x_test, y_test);
  out.forest_accuracy = train_random_forest(x_train, y_train, cfg.forest, forest_rng).accuracy(x_test, y_test);
  return out;
}

}  // namespace glp
