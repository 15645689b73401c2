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

#include "glp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "glp/error.hpp"

namespace glp {

Image::Image(int side, double fill)
    : side_(side), values_(static_cast<std::size_t>(kChannels) * side * side, fill) {
  require(side >= 1, "Image: side must be positive");
  require(fill >= 0.0 && fill <= 1.0, "Image: fill outside [0,1]");
}

Image::Image(int side, std::vector<double> pixels) : side_(side), values_(std::move(pixels)) {
  require(side >= 1, "Image: side must be positive");
  require(values_.size() == static_cast<std::size_t>(kChannels) * side * side,
          "Image: pixel count does not match side");
  for (double v : values_) {
    require(v >= 0.0 && v <= 1.0, "Image: pixel value outside [0,1]");
  }
}

Dataset::Dataset(std::vector<Image> images) : images_(std::move(images)) {
  require(!images_.empty(), "Dataset: needs at least one image");
  side_ = images_.front().side();
  for (const auto& im : images_) require(im.side() == side_, "Dataset: images differ in side");
}

LabeledDataset::LabeledDataset(Dataset d, std::vector<int> l, int classes)
    : data(std::move(d)), labels(std::move(l)), num_classes(classes) {
  require(labels.size() == data.size(), "LabeledDataset: label count != image count");
  require(num_classes >= 1, "LabeledDataset: num_classes must be positive");
  for (int y : labels) require(y >= 0 && y < num_classes, "LabeledDataset: label out of range");
}

LabeledDataset synth_dataset(const SynthConfig& cfg) {
  require(cfg.num_classes >= 2, "synth: num_classes must be >= 2");
  require(cfg.side >= 4, "synth: side must be >= 4");
  require(cfg.images_per_class >= 1, "synth: images_per_class must be >= 1");
  require(cfg.pixel_noise_sigma >= 0.0, "synth: pixel_noise_sigma must be >= 0");

  Rng palette_rng(cfg.seed, 0);
  Rng image_rng(cfg.seed, 1);

  struct Palette {
    double left[kChannels];
    double right[kChannels];
  };
  std::vector<Palette> palettes(cfg.num_classes);
  for (auto& p : palettes) {
    for (double& c : p.left) c = palette_rng.uniform();
    for (double& c : p.right) c = palette_rng.uniform();
  }

  const int s = cfg.side;
  std::vector<Image> images;
  std::vector<int> labels;
  images.reserve(static_cast<std::size_t>(cfg.num_classes) * cfg.images_per_class);
  for (int c = 0; c < cfg.num_classes; ++c) {
    for (int k = 0; k < cfg.images_per_class; ++k) {
      const int split_col = 1 + static_cast<int>(image_rng.below(static_cast<std::uint64_t>(s - 1)));
      std::vector<double> px(static_cast<std::size_t>(kChannels) * s * s);
      std::size_t idx = 0;
      for (int ch = 0; ch < kChannels; ++ch) {
        for (int r = 0; r < s; ++r) {
          for (int col = 0; col < s; ++col) {
            double v = col < split_col ? palettes[c].left[ch] : palettes[c].right[ch];
            if (cfg.pixel_noise_sigma > 0.0) v += cfg.pixel_noise_sigma * image_rng.normal();
            px[idx++] = std::clamp(v, 0.0, 1.0);
          }
        }
      }
      images.emplace_back(s, std::move(px));
      labels.push_back(c);
    }
  }
  return LabeledDataset(Dataset(std::move(images)), std::move(labels), cfg.num_classes);
}

std::size_t record_size(int side) noexcept {
  return 1 + static_cast<std::size_t>(kChannels) * side * side;
}

LabeledDataset parse_records(std::span<const std::uint8_t> bytes, int side, bool allow_unlabeled) {
  require(side >= 1, "records: side must be positive");
  const std::size_t rec = record_size(side);
  if (bytes.empty() || bytes.size() % rec != 0) {
    fail(Errc::format, "records: byte length " + std::to_string(bytes.size()) +
                           " is not a positive multiple of " + std::to_string(rec));
  }
  const std::size_t n = bytes.size() / rec;
  std::vector<Image> images;
  std::vector<int> labels;
  images.reserve(n);
  labels.reserve(n);
  bool any_unlabeled = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto record = bytes.subspan(i * rec, rec);
    const int label = record[0];
    if (label > 9 && !(allow_unlabeled && label == kUnlabeled)) {
      fail(Errc::format, "records: invalid label byte " + std::to_string(label) + " in record " +
                             std::to_string(i));
    }
    any_unlabeled = any_unlabeled || label == kUnlabeled;
    std::vector<double> px(rec - 1);
    for (std::size_t j = 1; j < rec; ++j) px[j - 1] = record[j] / 255.0;
    images.emplace_back(side, std::move(px));
    labels.push_back(label);
  }
  if (any_unlabeled) {
    // Unlabeled records come from generators; the label column is meaningless.
    std::fill(labels.begin(), labels.end(), 0);
    return LabeledDataset(Dataset(std::move(images)), std::move(labels), 1);
  }
  return LabeledDataset(Dataset(std::move(images)), std::move(labels), 10);
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

LabeledDataset load_cifar10_batch(const std::filesystem::path& path, int side) {
  return parse_records(read_file(path), side, false);
}

LabeledDataset load_records(const std::filesystem::path& path, int side) {
  return parse_records(read_file(path), side, true);
}

std::vector<std::uint8_t> encode_records(const Dataset& d, std::span<const int> labels) {
  require(labels.empty() || labels.size() == d.size(), "export: label count mismatch");
  const std::size_t rec = record_size(d.side());
  std::vector<std::uint8_t> out(rec * d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint8_t* r = out.data() + i * rec;
    if (labels.empty()) {
      r[0] = kUnlabeled;
    } else {
      require(labels[i] >= 0 && labels[i] <= 9, "export: label must be in 0..9");
      r[0] = static_cast<std::uint8_t>(labels[i]);
    }
    const auto px = d[i].values();
    for (std::size_t j = 0; j < px.size(); ++j) {
      r[j + 1] = static_cast<std::uint8_t>(std::lround(px[j] * 255.0));
    }
  }
  return out;
}

void export_records(const std::filesystem::path& path, const Dataset& d, std::span<const int> labels) {
  const auto bytes = encode_records(d, labels);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io, "write failed for " + path.string());
}

LabeledDataset subset(const LabeledDataset& d, std::span<const std::size_t> indices) {
  std::vector<Image> images;
  std::vector<int> labels;
  images.reserve(indices.size());
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    images.push_back(d.data[i]);
    labels.push_back(d.labels[i]);
  }
  return LabeledDataset(Dataset(std::move(images)), std::move(labels), d.num_classes);
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& d, double train_frac, Rng& rng) {
  require(train_frac > 0.0 && train_frac < 1.0, "split: train_frac must be in (0,1)");
  const std::size_t n = d.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(n)));
  require(n_train >= 1 && n_train < n, "split: one side of the split would be empty");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const std::span<const std::size_t> all(order);
  return {subset(d, all.first(n_train)), subset(d, all.subspan(n_train))};
}

}  // namespace glp
