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
#include <span>
#include <string>
#include <vector>

#include "glp/data.hpp"

namespace glp {

inline constexpr int kDefaultBins = 32;

/// Per-channel value histograms concatenated as R, G, B; each channel segment
/// is a probability vector over b bins.
struct ColorHistogram {
  int bins = 0;
  std::vector<double> values;  // 3 * bins

  std::span<const double> channel(int c) const noexcept {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(c) * bins, bins);
  }
  /// "b,v0,v1,...,v_{3b-1}"
  std::string to_csv_row() const;

  friend bool operator==(const ColorHistogram&, const ColorHistogram&) = default;
};

struct ClassHistogram {
  int num_classes = 0;
  std::vector<double> frequencies;

  friend bool operator==(const ClassHistogram&, const ClassHistogram&) = default;
};

inline int bin_index(double v, int bins) noexcept {
  const int i = static_cast<int>(v * bins);
  return i < bins ? (i < 0 ? 0 : i) : bins - 1;
}

ColorHistogram color_histogram(const Image& x, int bins);
ColorHistogram mean_color_histogram(const Dataset& d, int bins);
/// Per-image histograms, one row of 3b values per image.
std::vector<std::vector<double>> histogram_features(const Dataset& d, int bins);

ClassHistogram class_histogram(std::span<const int> labels, int num_classes);

}  // namespace glp
