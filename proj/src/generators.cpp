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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "glp/error.hpp"
#include "glp/models.hpp"

namespace glp {

Generator::Generator(Payload payload, int side, std::vector<LossRecord> trace)
    : payload_(std::move(payload)), side_(side), trace_(std::move(trace)) {
  require(side >= 1, "Generator: invalid side");
}

Generator bootstrap_generator(const Dataset& d, double noise_sigma) {
  require(!d.empty(), "bootstrap: empty dataset");
  require(noise_sigma >= 0.0, "bootstrap: noise must be >= 0");
  return Generator(BootstrapModel{d, noise_sigma}, d.side());
}

namespace {

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

Generator gmm_fit(const Dataset& d, std::size_t k, Rng& rng, std::size_t max_iters, double tol) {
  require(!d.empty(), "gmm_fit: empty dataset");
  require(k >= 1, "gmm_fit: K must be >= 1");
  require(k <= d.size(), "gmm_fit: K exceeds the number of samples");
  require(max_iters >= 1, "gmm_fit: max_iters must be >= 1");

  std::vector<std::vector<double>> x;
  x.reserve(d.size());
  for (const auto& img : d.images()) x.emplace_back(img.values().begin(), img.values().end());
  const std::size_t n = x.size();
  const std::size_t dim = x.front().size();
  const double nd = static_cast<double>(n);

  Gmm gmm;
  std::vector<double> global_mean(dim, 0.0), global_var(dim, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < dim; ++j) global_mean[j] += row[j];
  for (double& m : global_mean) m /= nd;
  for (const auto& row : x)
    for (std::size_t j = 0; j < dim; ++j) global_var[j] += (row[j] - global_mean[j]) * (row[j] - global_mean[j]);
  for (double& v : global_var) v = std::max(v / nd, kGmmVarianceFloor);

  for (std::size_t idx : kmeanspp_seeds(x, k, rng)) gmm.means.push_back(x[idx]);
  gmm.variances.assign(k, global_var);
  gmm.weights.assign(k, 1.0 / static_cast<double>(k));

  std::vector<std::vector<double>> resp(n, std::vector<double>(k));
  std::vector<double> logp(k);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // E-step
    std::vector<double> log_norm(k);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (double v : gmm.variances[c]) s += std::log(v);
      log_norm[c] = std::log(gmm.weights[c]) - 0.5 * (static_cast<double>(dim) * log2pi + s);
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        double q = 0.0;
        const auto& mu = gmm.means[c];
        const auto& var = gmm.variances[c];
        for (std::size_t j = 0; j < dim; ++j) {
          const double diff = x[i][j] - mu[j];
          q += diff * diff / var[j];
        }
        logp[c] = gmm.weights[c] > 0.0 ? log_norm[c] - 0.5 * q : -std::numeric_limits<double>::infinity();
      }
      const double lse = log_sum_exp(logp);
      ll += lse;
      for (std::size_t c = 0; c < k; ++c) resp[i][c] = std::exp(logp[c] - lse);
    }
    ll /= nd;
    if (!std::isfinite(ll)) throw TrainingDiverged(iter, "GMM log-likelihood is not finite");
    const bool converged = !gmm.log_likelihood.empty() && ll - gmm.log_likelihood.back() < tol;
    gmm.log_likelihood.push_back(ll);
    if (converged) break;

    // M-step
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp[i][c];
      gmm.weights[c] = nk / nd;
      if (nk < 1e-12) continue;
      std::vector<double> mu(dim, 0.0), var(dim, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i][c];
        if (r == 0.0) continue;
        for (std::size_t j = 0; j < dim; ++j) mu[j] += r * x[i][j];
      }
      for (double& m : mu) m /= nk;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i][c];
        if (r == 0.0) continue;
        for (std::size_t j = 0; j < dim; ++j) var[j] += r * (x[i][j] - mu[j]) * (x[i][j] - mu[j]);
      }
      for (double& v : var) v = std::max(v / nk, kGmmVarianceFloor);
      gmm.means[c] = std::move(mu);
      gmm.variances[c] = std::move(var);
    }
  }

  std::vector<LossRecord> trace;
  for (std::size_t i = 0; i < gmm.log_likelihood.size(); ++i) {
    trace.push_back({i + 1, 0.0, -gmm.log_likelihood[i]});
  }
  return Generator(std::move(gmm), d.side(), std::move(trace));
}

Dataset sample(const Generator& g, std::size_t n, Rng& rng) {
  require(n >= 1, "sample: n must be >= 1");
  const int side = g.side();
  const std::size_t dim = static_cast<std::size_t>(kChannels) * side * side;

  if (const auto* boot = std::get_if<BootstrapModel>(&g.payload())) {
    // Shuffled passes over the data: n = |data| returns a permutation of it.
    std::vector<std::size_t> order(boot->data.size());
    std::vector<Image> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = i % order.size();
      if (pos == 0) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
      }
      const Image& src = boot->data[order[pos]];
      if (boot->noise_sigma == 0.0) {
        out.push_back(src);
        continue;
      }
      std::vector<double> px(src.values().begin(), src.values().end());
      for (double& v : px) v = std::clamp(v + boot->noise_sigma * rng.normal(), 0.0, 1.0);
      out.emplace_back(side, std::move(px));
    }
    return Dataset(std::move(out));
  }

  if (const auto* gmm = std::get_if<Gmm>(&g.payload())) {
    std::vector<double> cdf(gmm->weights.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < cdf.size(); ++c) cdf[c] = (acc += gmm->weights[c]);
    std::vector<Image> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * acc;
      std::size_t c = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      c = std::min(c, cdf.size() - 1);
      std::vector<double> px(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        px[j] = std::clamp(gmm->means[c][j] + std::sqrt(gmm->variances[c][j]) * rng.normal(), 0.0, 1.0);
      }
      out.emplace_back(side, std::move(px));
    }
    return Dataset(std::move(out));
  }

  const auto& gan = std::get<GanModel>(g.payload());
  Eigen::MatrixXd z(static_cast<Eigen::Index>(gan.latent_dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = rng.normal();
  return from_matrix(mlp_predict(gan.net, z), side);
}

// ---------------------------------------------------------------------------

Classifier train_classifier(const LabeledDataset& d, const ClassifierConfig& cfg) {
  require(d.size() >= 2, "train_classifier: need at least 2 samples");
  std::vector<char> present(d.num_classes, 0);
  for (int y : d.labels) present[y] = 1;
  require(std::count(present.begin(), present.end(), 1) >= 2, "train_classifier: need at least 2 classes");
  require(cfg.hidden >= 1 && cfg.batch_size >= 1, "train_classifier: invalid sizes");

  Rng init(cfg.seed, 11);
  Rng order_rng(cfg.seed, 12);
  const Eigen::MatrixXd x = to_matrix(d.data);
  const auto c = static_cast<std::size_t>(d.num_classes);
  Mlp net = Mlp::random({static_cast<std::size_t>(x.rows()), cfg.hidden, c},
                        {Activation::leaky_relu, Activation::identity}, init);
  AdamState opt;

  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t steps = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs || steps < cfg.min_steps; ++epoch) {
    order_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const auto b = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(x.rows(), b);
      for (Eigen::Index j = 0; j < b; ++j) xb.col(j) = x.col(static_cast<Eigen::Index>(order[start + j]));
      const ForwardCache fwd = mlp_forward(net, xb);
      Eigen::MatrixXd up(fwd.output.rows(), b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const auto logits = fwd.output.col(j);
        const double m = logits.maxCoeff();
        Eigen::VectorXd p = (logits.array() - m).exp().matrix();
        p /= p.sum();
        p[d.labels[order[start + j]]] -= 1.0;
        up.col(j) = p / static_cast<double>(b);
      }
      adam_step(net, mlp_grad(net, fwd, up), opt, cfg.adam);
      ++steps;
    }
  }
  return Classifier(std::move(net), d.num_classes);
}

int Classifier::predict(const Image& x) const {
  const Eigen::VectorXd in = Eigen::Map<const Eigen::VectorXd>(x.values().data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd logits = mlp_predict(net_, in);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return static_cast<int>(best);
}

std::vector<int> Classifier::predict(const Dataset& d) const {
  const Eigen::MatrixXd logits = mlp_predict(net_, to_matrix(d));
  std::vector<int> out(d.size());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < logits.rows(); ++i)
      if (logits(i, c) > logits(best, c)) best = i;
    out[static_cast<std::size_t>(c)] = static_cast<int>(best);
  }
  return out;
}

std::vector<double> Classifier::features(const Image& x) const {
  const auto& first = net_.layers().front();
  const Eigen::VectorXd in = Eigen::Map<const Eigen::VectorXd>(x.values().data(), static_cast<Eigen::Index>(x.size()));
  require(in.size() == first.weight.cols(), "Classifier: image size does not match the network");
  const Eigen::VectorXd pre = first.weight * in + first.bias;
  std::vector<double> out(static_cast<std::size_t>(pre.size()));
  for (Eigen::Index i = 0; i < pre.size(); ++i) out[static_cast<std::size_t>(i)] = activate(first.activation, pre[i]);
  return out;
}

std::vector<std::vector<double>> Classifier::features(const Dataset& d) const {
  const auto& first = net_.layers().front();
  const Eigen::MatrixXd x = to_matrix(d);
  require(x.rows() == first.weight.cols(), "Classifier: image size does not match the network");
  Eigen::MatrixXd pre = first.weight * x;
  pre.colwise() += first.bias;
  std::vector<std::vector<double>> out(d.size(), std::vector<double>(static_cast<std::size_t>(pre.rows())));
  for (Eigen::Index c = 0; c < pre.cols(); ++c)
    for (Eigen::Index r = 0; r < pre.rows(); ++r)
      out[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] = activate(first.activation, pre(r, c));
  return out;
}

}  // namespace glp
