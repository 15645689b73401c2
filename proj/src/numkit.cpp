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

#include "glp/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "glp/error.hpp"

namespace glp {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> Rng::philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t Rng::next_u64() noexcept {
  if (buffered_ == 0) {
    const std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                           static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32_10(ctr, key);
    ++counter_;
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Rng Rng::split(std::uint64_t child) const noexcept {
  return Rng(seed_, mix64(stream_ * 0x9E3779B97F4A7C15ull + child + 1));
}

// ---------------------------------------------------------------------------

SymMatrix SymMatrix::from_dense(std::size_t dim, std::span<const double> values) {
  require(values.size() == dim * dim, "from_dense: expected dim*dim values");
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.a_[i * dim + i] = values[i * dim + i];
    for (std::size_t j = i + 1; j < dim; ++j) {
      m.set(i, j, 0.5 * (values[i * dim + j] + values[j * dim + i]));
    }
  }
  return m;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.a_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.a_[i * diag.size() + i] = diag[i];
  return m;
}

double SymMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += a_[i * dim_ + i];
  return t;
}

double SymMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

EigenDecomposition sym_eigen(const SymMatrix& input) {
  const std::size_t n = input.dim();
  require(n >= 1, "sym_eigen: empty matrix");
  for (double v : input.values()) {
    require(std::isfinite(v), "sym_eigen: non-finite entry");
  }

  std::vector<double> a(input.values().begin(), input.values().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double fro2 = 0.0;
  for (double x : a) fro2 += x * x;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off <= 1e-32 * fro2 || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });

  EigenDecomposition out;
  out.dim = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + k] = v[r * n + order[k]];
  }
  return out;
}

SymMatrix sqrtm_psd(const SymMatrix& a) {
  const auto eig = sym_eigen(a);
  const std::size_t n = eig.dim;
  double lam_max = 0.0;
  for (double l : eig.values) lam_max = std::max(lam_max, std::abs(l));
  std::vector<double> root(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.values[k] < -1e-8 * lam_max) {
      fail(Errc::numeric, "sqrtm_psd: matrix is not positive semidefinite (eigenvalue " +
                              std::to_string(eig.values[k]) + ")");
    }
    root[k] = std::sqrt(std::max(eig.values[k], 0.0));
  }
  std::vector<double> b(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        s += eig.vector_component(i, k) * root[k] * eig.vector_component(j, k);
      }
      b[i * n + j] = s;
      b[j * n + i] = s;
    }
  }
  return SymMatrix::from_dense(n, b);
}

std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& points,
                                             std::size_t out_dim) {
  require(points.size() >= 2, "pca_project: need at least 2 points");
  const std::size_t dim = points.front().size();
  require(out_dim >= 1 && out_dim <= dim, "pca_project: out_dim must be in [1, dim]");
  for (const auto& p : points) require(p.size() == dim, "pca_project: ragged input");

  std::vector<double> mean(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += p[j];
  for (double& m : mean) m /= static_cast<double>(points.size());

  std::vector<double> cov(dim * dim, 0.0);
  for (const auto& p : points) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double di = p[i] - mean[i];
      for (std::size_t j = i; j < dim; ++j) cov[i * dim + j] += di * (p[j] - mean[j]);
    }
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) cov[j * dim + i] = cov[i * dim + j];

  const auto eig = sym_eigen(SymMatrix::from_dense(dim, cov));

  std::vector<std::vector<double>> axes(out_dim, std::vector<double>(dim));
  for (std::size_t k = 0; k < out_dim; ++k) {
    for (std::size_t r = 0; r < dim; ++r) axes[k][r] = eig.vector_component(r, k);
    for (double c : axes[k]) {
      if (std::abs(c) > 1e-12) {
        if (c < 0)
          for (double& x : axes[k]) x = -x;
        break;
      }
    }
  }

  std::vector<std::vector<double>> out(points.size(), std::vector<double>(out_dim));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < out_dim; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += (points[i][j] - mean[j]) * axes[k][j];
      out[i][k] = s;
    }
  }
  return out;
}

std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n) {
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  return c;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<std::size_t> kmeanspp_seeds(const std::vector<std::vector<double>>& points,
                                        std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  require(k >= 1 && k <= n, "kmeans++: k must be in [1, n]");
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::vector<char> taken(n, 0);
  chosen.push_back(static_cast<std::size_t>(rng.below(n)));
  taken[chosen.back()] = 1;

  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto& last = points[chosen.back()];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], last));
      if (!taken[i]) total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || d2[i] == 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    }
    if (pick == n) {
      // Remaining points all coincide with chosen centers.
      std::size_t skip = static_cast<std::size_t>(rng.below(n - chosen.size()));
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (skip-- == 0) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = 1;
    chosen.push_back(pick);
  }
  return chosen;
}

}  // namespace glp
