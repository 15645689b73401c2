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

#include "glp/hist.hpp"

#include <cstdio>

#include "glp/error.hpp"

namespace glp {

std::string ColorHistogram::to_csv_row() const {
  std::string row = std::to_string(bins);
  char buf[32];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    row += buf;
  }
  return row;
}

namespace {

void count_bins(const Image& x, int bins, std::vector<double>& out) {
  for (int c = 0; c < kChannels; ++c) {
    double* seg = out.data() + static_cast<std::size_t>(c) * bins;
    for (double v : x.channel(c)) seg[bin_index(v, bins)] += 1.0;
  }
}

}  // namespace

ColorHistogram color_histogram(const Image& x, int bins) {
  require(bins >= 2, "color_histogram: bins must be >= 2");
  require(x.side() >= 1, "color_histogram: invalid image");
  ColorHistogram h{bins, std::vector<double>(static_cast<std::size_t>(kChannels) * bins, 0.0)};
  count_bins(x, bins, h.values);
  const double m = static_cast<double>(x.pixel_count());
  for (double& v : h.values) v /= m;
  return h;
}

ColorHistogram mean_color_histogram(const Dataset& d, int bins) {
  require(!d.empty(), "mean_color_histogram: empty dataset");
  require(bins >= 2, "mean_color_histogram: bins must be >= 2");
  ColorHistogram mean{bins, std::vector<double>(static_cast<std::size_t>(kChannels) * bins, 0.0)};
  const double n = static_cast<double>(d.size());
  for (const auto& img : d.images()) {
    const auto h = color_histogram(img, bins);
    for (std::size_t i = 0; i < h.values.size(); ++i) mean.values[i] += h.values[i];
  }
  for (double& v : mean.values) v /= n;
  return mean;
}

std::vector<std::vector<double>> histogram_features(const Dataset& d, int bins) {
  std::vector<std::vector<double>> rows;
  rows.reserve(d.size());
  for (const auto& img : d.images()) rows.push_back(color_histogram(img, bins).values);
  return rows;
}

ClassHistogram class_histogram(std::span<const int> labels, int num_classes) {
  require(!labels.empty(), "class_histogram: no labels");
  require(num_classes >= 1, "class_histogram: num_classes must be positive");
  ClassHistogram h{num_classes, std::vector<double>(num_classes, 0.0)};
  for (int y : labels) {
    require(y >= 0 && y < num_classes, "class_histogram: label " + std::to_string(y) + " out of range");
    h.frequencies[y] += 1.0;
  }
  for (double& f : h.frequencies) f /= static_cast<double>(labels.size());
  return h;
}

}  // namespace glp
