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
#include <span>
#include <utility>
#include <vector>

namespace glp {

/// Counter-based Philox4x32-10 generator.
///
/// The 64-bit seed is the cipher key and the stream id occupies the upper
/// half of the 128-bit counter, so distinct streams of one seed never share a
/// block. Draws are produced without platform-dependent standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// Unbiased integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Child generator on a derived stream. The parent is unaffected.
  Rng split(std::uint64_t child) const noexcept;

  template <class T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                    std::array<std::uint32_t, 2> key) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Dense symmetric matrix, row-major, stored exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

  /// Builds from row-major values, averaging (i,j) and (j,i).
  static SymMatrix from_dense(std::size_t dim, std::span<const double> values);
  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * dim_ + j]; }
  /// Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) noexcept {
    a_[i * dim_ + j] = v;
    a_[j * dim_ + i] = v;
  }
  std::span<const double> values() const noexcept { return a_; }
  double trace() const noexcept;
  double max_abs() const noexcept;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

struct EigenDecomposition {
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // row-major dim x dim, column k is eigenvector k
  std::size_t dim = 0;

  double vector_component(std::size_t row, std::size_t k) const noexcept {
    return vectors[row * dim + k];
  }
};

/// Cyclic Jacobi eigensolver.
EigenDecomposition sym_eigen(const SymMatrix& a);

/// Principal square root of a (near) positive semidefinite matrix. Eigenvalues
/// down to -1e-8 * max|lambda| are clamped to zero; anything more negative is a
/// numeric error.
SymMatrix sqrtm_psd(const SymMatrix& a);

/// Projection onto the leading principal axes of the centered cloud. Each axis
/// is oriented so its first nonzero component is positive.
std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& points,
                                             std::size_t out_dim);

/// Dense row-major product helpers for small matrices.
std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n);

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// k-means++ seeding; returns indices of the chosen points.
std::vector<std::size_t> kmeanspp_seeds(const std::vector<std::vector<double>>& points,
                                        std::size_t k, Rng& rng);

}  // namespace glp
