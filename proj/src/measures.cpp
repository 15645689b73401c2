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

#include "glp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "glp/error.hpp"

namespace glp {

double kl(std::span<const double> p, std::span<const double> q, double eps) {
  require(p.size() == q.size(), "kl: length mismatch");
  require(!p.empty(), "kl: empty input");
  require(eps > 0.0, "kl: eps must be positive");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0 && q[i] >= 0.0, "kl: negative entry");
    sp += p[i] + eps;
    sq += q[i] + eps;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] + eps) / sp;
    const double qi = (q[i] + eps) / sq;
    if (pi != qi) s += pi * std::log(pi / qi);
  }
  return std::max(s, 0.0);
}

double color_kl(const ColorHistogram& pg, const ColorHistogram& pr, double eps) {
  require(pg.bins == pr.bins && pg.values.size() == pr.values.size(), "color_kl: bin-count mismatch");
  double s = 0.0;
  for (int c = 0; c < kChannels; ++c) s += kl(pg.channel(c), pr.channel(c), eps);
  return s;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct FitParams {
  double a, mu, sigma;
};

double fit_residual(std::span<const double> h, const FitParams& p) {
  const double b = static_cast<double>(h.size());
  double sse = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double t = (static_cast<double>(i) + 0.5) / b;
    const double d = t - p.mu;
    const double r = p.a * std::exp(-d * d / (2.0 * p.sigma * p.sigma)) - h[i];
    sse += r * r;
  }
  return sse;
}

// Solves the 3x3 system m * x = rhs by Gaussian elimination with partial
// pivoting; returns false when singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) return false;
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[r][k] -= f * m[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < 3; ++k) s -= m[r][k] * x[k];
    x[r] = s / m[r][r];
  }
  return true;
}

}  // namespace

GaussianFit gaussian_fit(std::span<const double> h) {
  const std::size_t nb = h.size();
  require(nb >= 4, "gaussian_fit: need at least 4 bins");
  double total = 0.0;
  for (double v : h) {
    require(std::isfinite(v) && v >= 0.0, "gaussian_fit: invalid histogram entry");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-6, "gaussian_fit: histogram is not normalized");

  const double b = static_cast<double>(nb);
  const double sigma_floor = 1.0 / (4.0 * b);
  auto center = [b](std::size_t i) { return (static_cast<double>(i) + 0.5) / b; };

  double mean = 0.0;
  for (std::size_t i = 0; i < nb; ++i) mean += center(i) * h[i];
  double var = 0.0;
  for (std::size_t i = 0; i < nb; ++i) var += (center(i) - mean) * (center(i) - mean) * h[i];
  FitParams p{*std::max_element(h.begin(), h.end()), mean, std::clamp(std::sqrt(var), sigma_floor, kSigmaMax)};

  GaussianFit fit;
  double sse = fit_residual(h, p);
  fit.initial_residual = sse;
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < 200; ++iter) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (std::size_t i = 0; i < nb; ++i) {
      const double d = center(i) - p.mu;
      const double e = std::exp(-d * d / (2.0 * p.sigma * p.sigma));
      const double r = p.a * e - h[i];
      const std::array<double, 3> j{e, p.a * e * d / (p.sigma * p.sigma),
                                    p.a * e * d * d / (p.sigma * p.sigma * p.sigma)};
      for (int u = 0; u < 3; ++u) {
        jtr[u] += j[u] * r;
        for (int v = 0; v < 3; ++v) jtj[u][v] += j[u] * j[v];
      }
    }

    bool accepted = false;
    double step_norm = 0.0;
    while (lambda < 1e12) {
      auto damped = jtj;
      for (int u = 0; u < 3; ++u) damped[u][u] += lambda * std::max(jtj[u][u], 1e-300);
      std::array<double, 3> delta{};
      if (!solve3(damped, {-jtr[0], -jtr[1], -jtr[2]}, delta)) {
        lambda *= 10.0;
        continue;
      }
      FitParams cand{std::max(p.a + delta[0], 1e-12), p.mu + delta[1],
                     std::clamp(p.sigma + delta[2], sigma_floor, kSigmaMax)};
      const double cand_sse = fit_residual(h, cand);
      if (std::isfinite(cand_sse) && cand_sse < sse) {
        step_norm = std::sqrt((cand.a - p.a) * (cand.a - p.a) + (cand.mu - p.mu) * (cand.mu - p.mu) +
                              (cand.sigma - p.sigma) * (cand.sigma - p.sigma));
        p = cand;
        sse = cand_sse;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || step_norm < 1e-8) {
      ++iter;
      break;
    }
  }

  fit.amplitude = p.a;
  fit.mu = p.mu;
  fit.sigma = p.sigma;
  fit.residual = sse;
  fit.iterations = iter;
  const double area = normal_cdf((1.0 - p.mu) / p.sigma) - normal_cdf((0.0 - p.mu) / p.sigma);
  fit.area_fraction = std::clamp(area, std::numeric_limits<double>::min(), 1.0);
  fit.alpha = std::min(1.0 / fit.area_fraction, kAlphaMax);
  return fit;
}

std::vector<double> discretized_gaussian(double mu, double sigma, int bins) {
  require(bins >= 1 && sigma > 0.0, "discretized_gaussian: invalid arguments");
  std::vector<double> q(bins);
  double s = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double d = (i + 0.5) / bins - mu;
    q[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    s += q[i];
  }
  if (s > 0.0)
    for (double& v : q) v /= s;
  return q;
}

double gauss_alpha_kl(std::span<const double> channel_hist, double eps) {
  const auto fit = gaussian_fit(channel_hist);
  const auto q = discretized_gaussian(fit.mu, fit.sigma, static_cast<int>(channel_hist.size()));
  return fit.alpha * kl(channel_hist, q, eps);
}

FeatureStats feature_stats(const std::vector<std::vector<double>>& features) {
  require(features.size() >= 2, "feature_stats: need at least 2 vectors");
  const std::size_t d = features.front().size();
  require(d >= 1, "feature_stats: empty feature vectors");
  for (const auto& f : features) require(f.size() == d, "feature_stats: ragged feature vectors");

  const double n = static_cast<double>(features.size());
  std::vector<double> mean(d, 0.0);
  for (const auto& f : features)
    for (std::size_t j = 0; j < d; ++j) mean[j] += f[j];
  for (double& m : mean) m /= n;

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (const auto& f : features) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = f[j] - mean[j];
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = centered[i];
      if (ci == 0.0) continue;
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += ci * centered[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] /= (n - 1.0);
      cov[j * d + i] = cov[i * d + j];
    }
  }
  return FeatureStats{std::move(mean), SymMatrix::from_dense(d, cov)};
}

double frechet(const FeatureStats& a, const FeatureStats& b) {
  const std::size_t d = a.mean.size();
  require(d == b.mean.size() && a.cov.dim() == d && b.cov.dim() == d, "frechet: dimension mismatch");

  double mean_term = 0.0;
  for (std::size_t i = 0; i < d; ++i) mean_term += (a.mean[i] - b.mean[i]) * (a.mean[i] - b.mean[i]);

  // Validates b.cov against the same near-PSD tolerance as a.cov.
  (void)sqrtm_psd(b.cov);
  const SymMatrix root_a = sqrtm_psd(a.cov);
  const auto tmp = matmul(root_a.values(), b.cov.values(), d);
  const auto inner = matmul(tmp, root_a.values(), d);
  const SymMatrix cross = sqrtm_psd(SymMatrix::from_dense(d, inner));

  const double value = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross.trace();
  return std::max(value, 0.0);
}

double r_squared(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size(), "r_squared: length mismatch");
  require(xs.size() >= 2, "r_squared: need at least 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

int class_coverage(const ClassHistogram& h, double tau) {
  require(tau >= 0.0 && tau < 1.0, "class_coverage: tau must be in [0,1)");
  return static_cast<int>(
      std::count_if(h.frequencies.begin(), h.frequencies.end(), [tau](double f) { return f > tau; }));
}

int class_coverage(const ClassHistogram& h) {
  require(h.num_classes >= 1, "class_coverage: empty histogram");
  return class_coverage(h, 0.1 / h.num_classes);
}

double intra_class_variance(const LabeledDataset& d, int bins) {
  require(d.num_classes >= 1, "intra_class_variance: no classes");
  std::vector<std::vector<std::size_t>> members(d.num_classes);
  for (std::size_t i = 0; i < d.size(); ++i) members[d.labels[i]].push_back(i);

  double total = 0.0;
  int counted = 0;
  std::vector<std::vector<double>> hists;
  for (const auto& idx : members) {
    if (idx.size() < 2) continue;
    hists.clear();
    for (std::size_t i : idx) hists.push_back(color_histogram(d.data[i], bins).values);
    const std::size_t dim = hists.front().size();
    const double n = static_cast<double>(hists.size());
    double trace = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      double mean = 0.0;
      for (const auto& h : hists) mean += h[j];
      mean /= n;
      double ss = 0.0;
      for (const auto& h : hists) ss += (h[j] - mean) * (h[j] - mean);
      trace += ss / (n - 1.0);
    }
    total += trace;
    ++counted;
  }
  require(counted > 0, "intra_class_variance: no class has at least two members");
  return total / counted;
}

}  // namespace glp
