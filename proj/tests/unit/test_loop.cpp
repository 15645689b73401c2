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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "glp/loop.hpp"
#include "glp/measures.hpp"
#include "glp/report.hpp"
#include "test_util.hpp"

using namespace glp;
namespace fs = std::filesystem;

namespace {

LoopConfig small_config(ModelKind model, std::uint64_t seed = 1) {
  LoopConfig cfg;
  cfg.model = model;
  cfg.seed = seed;
  cfg.iterations = 3;
  cfg.synth.images_per_class = 100;
  cfg.gan.steps = 40;
  cfg.gan.hidden = 32;
  cfg.detector.forest.n_trees = 20;
  cfg.cluster_k = 4;
  cfg.pca_samples = 20;
  return cfg;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void check_same_metrics(const IterationMetrics& a, const IterationMetrics& b) {
  CHECK(a.fcd == b.fcd);
  CHECK(a.color_kl == b.color_kl);
  CHECK(a.gauss_alpha_kl == b.gauss_alpha_kl);
  CHECK(a.class_coverage == b.class_coverage);
  CHECK(a.class_histogram == b.class_histogram);
  CHECK(a.intra_class_variance == b.intra_class_variance);
  CHECK(a.realfake_svm == b.realfake_svm);
  CHECK(a.realfake_forest == b.realfake_forest);
  CHECK(a.mean_histogram == b.mean_histogram);
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "glp_test_loop" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("model kind names") {
  for (ModelKind k : {ModelKind::bootstrap, ModelKind::gmm, ModelKind::gan})
    CHECK(parse_model_kind(model_kind_name(k)) == k);
  CHECK(!parse_model_kind("vae").has_value());
}

TEST_CASE("validate rejects bad configs") {
  LoopConfig cfg;
  cfg.iterations = 0;
  CHECK_ERRC(validate(cfg), Errc::config);
  cfg = LoopConfig{};
  cfg.bins = 1;
  CHECK_ERRC(validate(cfg), Errc::config);
  cfg = LoopConfig{};
  cfg.gan.steps = 0;
  cfg.model = ModelKind::gan;
  CHECK_ERRC(validate(cfg), Errc::config);
  CHECK_NOTHROW(validate(LoopConfig{}));
}

TEST_CASE("copying generator shows no shift") {
  LoopConfig cfg = small_config(ModelKind::bootstrap);
  cfg.iterations = 1;
  const Timeline t = run_loop(cfg);
  REQUIRE(t.metrics.size() == 1);
  CHECK(t.metrics[0].color_kl < 1e-3);
  CHECK(std::abs(t.metrics[0].realfake_svm - 0.5) <= 0.1);
  CHECK(std::abs(t.metrics[0].realfake_forest - 0.5) <= 0.1);
}

TEST_CASE("under-capacity gmm does not gain classes") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    LoopConfig cfg;
    cfg.seed = seed;
    cfg.realfake = false;
    cfg.clusters = false;
    const Timeline t = run_loop(cfg);
    REQUIRE(t.metrics.size() == 6);
    CHECK_MESSAGE(t.metrics[5].class_coverage <= t.metrics[0].class_coverage, "seed " << seed);
  }
}

TEST_CASE("loops are deterministic and keep sizes and references fixed") {
  for (ModelKind model : {ModelKind::gmm, ModelKind::gan}) {
    const LoopConfig cfg = small_config(model, 3);
    const Timeline a = run_loop(cfg), b = run_loop(cfg);
    REQUIRE(a.metrics.size() == 3);
    REQUIRE(b.metrics.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      check_same_metrics(a.metrics[i], b.metrics[i]);
      CHECK(a.metrics[i].iteration == i);
      CHECK(a.metrics[i].generated_size == 400);
    }
    CHECK(timeline_csv(a) == timeline_csv(b));
    CHECK(a.references == b.references);
    // the references equal a fresh computation from the real data alone
    CHECK(prepare(cfg).references == a.references);
  }
}

TEST_CASE("each gan iteration starts a fresh model") {
  const Timeline t = run_loop(small_config(ModelKind::gan, 2));
  for (const auto& m : t.metrics) {
    REQUIRE(m.loss_trace.size() == 40);
    CHECK(m.loss_trace.front().step == 1);
    CHECK(m.loss.records == 40);
  }
}

TEST_CASE("long training aligns with the loop") {
  for (ModelKind model : {ModelKind::gmm, ModelKind::gan}) {
    const LoopConfig cfg = small_config(model, 4);
    const Timeline loop = run_loop(cfg);
    const Timeline ctrl = run_long_training(cfg);
    CHECK(ctrl.long_training);
    REQUIRE(ctrl.metrics.size() == loop.metrics.size());
    check_same_metrics(ctrl.metrics[0], loop.metrics[0]);
    CHECK(ctrl.references == loop.references);
    if (model == ModelKind::gan) {
      // one continued run: the step counter keeps growing across checkpoints
      CHECK(ctrl.metrics[2].loss_trace.back().step == 120);
    }
  }
}

TEST_CASE("correlate") {
  Timeline t;
  for (int i = 0; i < 4; ++i) {
    IterationMetrics m;
    m.fcd = 2.0 * i + 1;
    m.color_kl = 0.5 * i + 0.25;
    t.metrics.push_back(m);
  }
  CHECK(correlate(t) == doctest::Approx(1.0).epsilon(1e-12));
  for (auto& m : t.metrics) m.color_kl = 3.0;
  CHECK(correlate(t) == 0.0);
  t.metrics.resize(1);
  CHECK_ERRC(correlate(t), Errc::invalid_input);
}

TEST_CASE("correlate matches the exported csv") {
  LoopConfig cfg;
  cfg.seed = 1;
  const Timeline t = run_loop(cfg);
  const fs::path dir = temp_dir("corr");
  write_timeline(dir, t);
  const auto rows = read_csv(dir / "timeline.csv");
  REQUIRE(rows.size() == 7);
  CHECK(rows[0][1] == "fcd");
  CHECK(rows[0][2] == "color_kl");
  std::vector<double> fcd, kl;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    fcd.push_back(std::stod(rows[r][1]));
    kl.push_back(std::stod(rows[r][2]));
  }
  const double r2 = correlate(t);
  CHECK(std::isfinite(r2));
  CHECK(std::abs(r2 - r_squared(fcd, kl)) <= 1e-12);
  const auto corr = read_csv(dir / "correlation.csv");
  REQUIRE(corr.size() == 2);
  CHECK(std::stod(corr[1][0]) == r2);
}

TEST_CASE("timeline files") {
  const Timeline t = run_loop(small_config(ModelKind::gmm));
  const fs::path dir = temp_dir("files");
  write_timeline(dir, t);
  for (const char* f : {"timeline.csv", "class_hist_0.csv", "class_hist_2.csv", "fcd_curve.csv", "kl_vs_fcd.csv",
                        "alpha_kl_curve.csv", "mean_hist.csv", "correlation.csv", "cluster_freq.csv",
                        "pca_projection.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  CHECK(!fs::exists(dir / "error.txt"));
  const auto rows = read_csv(dir / "timeline.csv");
  CHECK(rows.size() == 4);
  CHECK(rows[0].size() == 8);
  const auto hist = read_csv(dir / "class_hist_1.csv");
  CHECK(hist.size() == 5);
  double s = 0.0;
  for (std::size_t r = 1; r < hist.size(); ++r) s += std::stod(hist[r][1]);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a diverging model truncates the timeline") {
  LoopConfig cfg = small_config(ModelKind::gan);
  cfg.gan.adam.lr = 1e300;
  const Timeline t = run_loop(cfg);
  REQUIRE(t.error_iteration.has_value());
  CHECK(*t.error_iteration == 0);
  CHECK(t.metrics.empty());
  CHECK(!t.error.empty());
  const fs::path dir = temp_dir("diverged");
  write_timeline(dir, t);
  CHECK(fs::exists(dir / "error.txt"));
  CHECK(read_csv(dir / "timeline.csv").size() == 1);
}

TEST_CASE("shift report") {
  const LoopConfig cfg = small_config(ModelKind::gmm);
  const LoopSetup setup = prepare(cfg);
  const ShiftReport same = shift_report(setup, cfg, setup.real.data);
  CHECK(same.color_kl == 0.0);
  CHECK(same.fcd <= 1e-9);
  CHECK(same.class_coverage == 4);
  Rng rng(3);
  const ShiftReport noise = shift_report(setup, cfg, glp::test::random_dataset(400, 8, rng));
  CHECK(noise.color_kl > 1.0);
  CHECK(noise.realfake_accuracy > 0.95);
}
