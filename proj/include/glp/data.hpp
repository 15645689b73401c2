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
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "glp/numkit.hpp"

namespace glp {

inline constexpr int kChannels = 3;

/// Square color raster with values in [0, 1]. Layout is channel-major, then
/// row-major inside each channel (the CIFAR-10 record layout).
class Image {
 public:
  Image() = default;
  explicit Image(int side, double fill = 0.0);
  Image(int side, std::vector<double> pixels);

  int side() const noexcept { return side_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(side_) * side_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(int channel, int row, int col) const noexcept {
    return values_[index(channel, row, col)];
  }
  void set(int channel, int row, int col, double v) noexcept { values_[index(channel, row, col)] = v; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> channel(int c) const noexcept {
    return std::span<const double>(values_).subspan(c * pixel_count(), pixel_count());
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int c, int r, int col) const noexcept {
    return (static_cast<std::size_t>(c) * side_ + r) * side_ + col;
  }

  int side_ = 0;
  std::vector<double> values_;
};

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Image> images);

  int side() const noexcept { return side_; }
  std::size_t size() const noexcept { return images_.size(); }
  bool empty() const noexcept { return images_.empty(); }
  const Image& operator[](std::size_t i) const noexcept { return images_[i]; }
  const std::vector<Image>& images() const noexcept { return images_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  int side_ = 0;
  std::vector<Image> images_;
};

struct LabeledDataset {
  Dataset data;
  std::vector<int> labels;
  int num_classes = 0;

  LabeledDataset() = default;
  LabeledDataset(Dataset d, std::vector<int> l, int classes);

  std::size_t size() const noexcept { return data.size(); }
  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

struct SynthConfig {
  int num_classes = 4;
  int images_per_class = 500;
  int side = 8;
  double pixel_noise_sigma = 0.05;
  std::uint64_t seed = 1;
};

/// Two-color vertical-split pattern per class plus Gaussian pixel noise.
LabeledDataset synth_dataset(const SynthConfig& cfg);

/// Record size of the binary image format for a given side: 1 label byte plus
/// 3*side*side pixel bytes. side 32 is the CIFAR-10 layout (3073 bytes).
std::size_t record_size(int side) noexcept;

/// Label byte written for unlabeled (generated) images.
inline constexpr std::uint8_t kUnlabeled = 255;

LabeledDataset load_cifar10_batch(const std::filesystem::path& path, int side = 32);

/// Parses records already in memory; labels must be 0..9 (or 255 when
/// allow_unlabeled is set).
LabeledDataset parse_records(std::span<const std::uint8_t> bytes, int side, bool allow_unlabeled);

std::vector<std::uint8_t> encode_records(const Dataset& d, std::span<const int> labels);
void export_records(const std::filesystem::path& path, const Dataset& d,
                    std::span<const int> labels = {});

/// Loads files written by export_records: labels 0..9 or 255.
LabeledDataset load_records(const std::filesystem::path& path, int side);

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& d, double train_frac, Rng& rng);

LabeledDataset subset(const LabeledDataset& d, std::span<const std::size_t> indices);

}  // namespace glp
