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

// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is non-zero when a criterion outside kKnownFailures fails or
// the harness itself breaks. Known failures are still printed as FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "glp/config.hpp"
#include "glp/data.hpp"
#include "glp/hist.hpp"
#include "glp/loop.hpp"
#include "glp/measures.hpp"
#include "glp/mlp.hpp"
#include "glp/numkit.hpp"
#include "glp/report.hpp"

namespace fs = std::filesystem;
using namespace glp;

namespace {

// ---- pinned tolerances and budgets ----------------------------------------
constexpr double kEigenTol = 1e-9;
constexpr double kSqrtmRelTol = 1e-7;
constexpr double kFrechetTol = 1e-9;
constexpr double kGradRelTol = 1e-4;
constexpr double kKlZeroTol = 1e-12;
constexpr double kGaussKlTol = 1e-3;
constexpr double kAlphaLo = 1.0;
constexpr double kAlphaHi = 10.0;
constexpr double kDetectMin = 0.60;
constexpr double kCopyCenter = 0.5;
constexpr double kCopyHalfWidth = 0.1;
constexpr double kCorrelateTol = 1e-12;
constexpr double kBudget1 = 10.0, kBudget2 = 30.0, kBudget3 = 10.0;
constexpr double kBudgetGmm = 60.0;
constexpr double kBudgetGan = 15.0 * 60.0;
constexpr std::array<std::uint64_t, 5> kSeeds = {1, 2, 3, 4, 5};
constexpr std::size_t kLastIteration = 5;

// Criteria that fail on this implementation; the analysis is in the README.
const std::set<int> kKnownFailures = {6, 8};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_unexpected = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass && !kKnownFailures.contains(id)) ++g_unexpected;
  if (pass && kKnownFailures.contains(id)) std::printf("  note: criterion %d is listed as a known failure but passed\n", id);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string count_str(int hits, std::size_t of) { return std::to_string(hits) + "/" + std::to_string(of); }

// ---- 1. numerical kernels --------------------------------------------------

SymMatrix random_symmetric(std::size_t n, Rng& rng) {
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.normal());
  return a;
}

void criterion_1() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double eig_err = 0.0, sqrt_err = 0.0, fr_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 15);
    const SymMatrix a = random_symmetric(n, rng);
    const auto e = sym_eigen(a);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += e.vector_component(i, k) * e.values[k] * e.vector_component(j, k);
        eig_err = std::max(eig_err, std::abs(s - a(i, j)) / std::max(1.0, a.max_abs()));
      }

    // M^T M is positive semidefinite
    std::vector<double> m(n * n), psd(n * n, 0.0);
    for (double& v : m) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) psd[i * n + j] += m[k * n + i] * m[k * n + j];
    const SymMatrix p = SymMatrix::from_dense(n, psd);
    const SymMatrix r = sqrtm_psd(p);
    const auto sq = matmul(r.values(), r.values(), n);
    double diff = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) diff = std::max(diff, std::abs(sq[i] - p.values()[i]));
    sqrt_err = std::max(sqrt_err, diff / p.max_abs());
  }
  for (int c = 0; c < 100; ++c) {
    const double m1 = rng.normal(), m2 = rng.normal();
    const double s1 = 0.1 + rng.uniform() * 3.0, s2 = 0.1 + rng.uniform() * 3.0;
    const std::vector<double> v1 = {s1 * s1}, v2 = {s2 * s2};
    const FeatureStats a{{m1}, SymMatrix::diagonal(v1)};
    const FeatureStats b{{m2}, SymMatrix::diagonal(v2)};
    const double expect = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
    fr_err = std::max(fr_err, std::abs(frechet(a, b) - expect) / std::max(1.0, expect));
  }
  const double t = seconds_since(t0);
  report(1, eig_err <= kEigenTol && sqrt_err <= kSqrtmRelTol && fr_err <= kFrechetTol && t < kBudget1,
         "eigen " + fmt("%.2e", eig_err) + ", sqrtm " + fmt("%.2e", sqrt_err) + ", frechet-1d " +
             fmt("%.2e", fr_err) + ", " + fmt("%.2f", t) + " s");
}

// ---- 2. gradients ------------------------------------------------------------

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)}); }

void criterion_2() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::vector<std::size_t>, std::vector<Activation>>> archs = {
      {{4, 16, 3}, {Activation::leaky_relu, Activation::identity}},
      {{6, 8, 8, 1}, {Activation::tanh, Activation::leaky_relu, Activation::sigmoid}},
      {{3, 12, 5}, {Activation::sigmoid, Activation::tanh}},
  };
  double worst = 0.0;
  for (const auto& [sizes, acts] : archs) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      Rng rng(seed);
      Mlp net = Mlp::random(sizes, acts, rng);
      const auto x = random_matrix(static_cast<Eigen::Index>(sizes.front()), 4, rng);
      const auto u = random_matrix(static_cast<Eigen::Index>(sizes.back()), 4, rng);
      auto value = [&](const Eigen::MatrixXd& in) { return mlp_forward(net, in).output.cwiseProduct(u).sum(); };
      const auto g = mlp_grad(net, mlp_forward(net, x), u);
      const auto analytic = g.flat();
      auto params = net.flat_parameters();
      const double h = 1e-5;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + h;
        net.set_flat_parameters(params);
        const double fp = value(x);
        params[i] = orig - h;
        net.set_flat_parameters(params);
        const double fm = value(x);
        params[i] = orig;
        net.set_flat_parameters(params);
        worst = std::max(worst, rel_err((fp - fm) / (2 * h), analytic[i]));
      }
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::MatrixXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        worst = std::max(worst, rel_err((value(xp) - value(xm)) / (2 * h), g.input(i)));
      }
    }
  }
  const double t = seconds_since(t0);
  report(2, worst < kGradRelTol && t < kBudget2,
         "max relative error " + fmt("%.2e", worst) + " over 3 architectures x 3 seeds, " + fmt("%.2f", t) + " s");
}

// ---- 3. measure properties -------------------------------------------------

std::vector<double> random_histogram(Rng& rng, int bins) {
  std::vector<double> h(static_cast<std::size_t>(bins));
  double s = 0.0;
  for (double& v : h) {
    v = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    s += v;
  }
  if (s == 0.0) h[0] = s = 1.0;
  for (double& v : h) v /= s;
  return h;
}

void criterion_3() {
  const auto t0 = Clock::now();
  Rng rng(303);
  int kl_bad = 0;
  double alpha_lo = 1e300, alpha_hi = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_histogram(rng, kDefaultBins);
    const auto q = random_histogram(rng, kDefaultBins);
    const double d = kl(p, q);
    if (!(d >= 0.0)) ++kl_bad;
    if (p != q && !(d > 0.0)) ++kl_bad;
    if (std::abs(kl(p, p)) > kKlZeroTol) ++kl_bad;
    const auto fit = gaussian_fit(p);
    alpha_lo = std::min(alpha_lo, fit.alpha);
    alpha_hi = std::max(alpha_hi, fit.alpha);
  }
  double gauss_worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mu = 0.1 + 0.8 * rng.uniform();
    const double sigma = 0.04 + 0.2 * rng.uniform();
    const auto h = discretized_gaussian(mu, sigma, kDefaultBins);
    gauss_worst = std::max(gauss_worst, gauss_alpha_kl(h));
    const auto fit = gaussian_fit(h);
    alpha_lo = std::min(alpha_lo, fit.alpha);
    alpha_hi = std::max(alpha_hi, fit.alpha);
  }
  const double t = seconds_since(t0);
  const bool ok = kl_bad == 0 && alpha_lo >= kAlphaLo && alpha_hi <= kAlphaHi && gauss_worst < kGaussKlTol && t < kBudget3;
  report(3, ok,
         "kl violations " + std::to_string(kl_bad) + "/1000 pairs, alpha in [" + fmt("%.3f", alpha_lo) + ", " +
             fmt("%.3f", alpha_hi) + "], max gauss_alpha_kl on gaussians " + fmt("%.2e", gauss_worst) + ", " +
             fmt("%.2f", t) + " s");
}

// ---- loop runs shared by 4-9 -------------------------------------------------

LoopConfig run_config(ModelKind model, std::uint64_t seed) {
  LoopConfig cfg;
  cfg.seed = seed;
  cfg.model = model;
  return cfg;
}

Timeline run_logged(const LoopConfig& cfg, bool long_run) {
  const std::string tag = std::string(model_kind_name(cfg.model)) + (long_run ? " long" : " loop") + " seed " +
                          std::to_string(cfg.seed);
  const auto t0 = Clock::now();
  auto progress = [&](const IterationMetrics& m) {
    std::printf("  %s iter %zu: fcd %.4f color_kl %.4f gauss_alpha_kl %.4f coverage %d icv %.5f svm %.3f forest %.3f "
                "(%.0f s)\n",
                tag.c_str(), m.iteration, m.fcd, m.color_kl, m.gauss_alpha_kl, m.class_coverage,
                m.intra_class_variance, m.realfake_svm, m.realfake_forest, seconds_since(t0));
    std::fflush(stdout);
  };
  Timeline t = long_run ? run_long_training(cfg, progress) : run_loop(cfg, progress);
  if (t.error_iteration) std::printf("  %s diverged at iteration %zu: %s\n", tag.c_str(), *t.error_iteration, t.error.c_str());
  return t;
}

bool complete(const Timeline& t) { return !t.error_iteration && t.metrics.size() > kLastIteration; }

std::string join(const std::vector<double>& v, const char* f) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(f, x);
  return s;
}

// ---- 9. correlation ----------------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

// r_squared(fcd, color_kl) recomputed from timeline.csv
double csv_r_squared(const fs::path& timeline_csv) {
  const auto rows = read_csv(timeline_csv);
  if (rows.size() < 3) throw std::runtime_error("timeline.csv has too few rows");
  std::size_t ci_fcd = 0, ci_kl = 0;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (rows[0][i] == "fcd") ci_fcd = i;
    if (rows[0][i] == "color_kl") ci_kl = i;
  }
  std::vector<double> xs, ys;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    xs.push_back(std::stod(rows[r][ci_fcd]));
    ys.push_back(std::stod(rows[r][ci_kl]));
  }
  return r_squared(xs, ys);
}

// ---- 10. formats -------------------------------------------------------------

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_10(const fs::path& work) {
  Rng rng(1010);
  std::vector<std::uint8_t> bytes(200 * record_size(32));
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(rng.below(256));
  for (std::size_t r = 0; r < 200; ++r) bytes[r * record_size(32)] = static_cast<std::uint8_t>(r % 10);
  const fs::path src = work / "batch_src.bin", once = work / "batch_once.bin", twice = work / "batch_twice.bin";
  std::ofstream(src, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                             static_cast<std::streamsize>(bytes.size()));
  const auto a = load_cifar10_batch(src);
  export_records(once, a.data, a.labels);
  const auto b = load_cifar10_batch(once);
  export_records(twice, b.data, b.labels);
  const bool identical = read_bytes(once) == bytes && read_bytes(twice) == bytes && a == b;

  std::string official = "official batch absent, skipped";
  bool official_ok = true;
  const char* env = std::getenv("GLP_CIFAR10_BATCH");
  const fs::path batch = env != nullptr ? fs::path(env) : fs::path("data/cifar-10-batches-bin/data_batch_1.bin");
  if (fs::exists(batch)) {
    const auto d = load_cifar10_batch(batch);
    std::vector<int> counts(10, 0);
    for (int y : d.labels) ++counts[static_cast<std::size_t>(y)];
    official_ok = d.size() == 10000;
    for (int c : counts) official_ok = official_ok && c == 1000;
    official = std::string("official batch ") + (official_ok ? "has 1000 images per class" : "has unexpected counts");
  }
  report(10, identical && official_ok,
         std::string("round trip ") + (identical ? "bit-identical" : "differs") + ", " + official);
}

// ---- 11. determinism through the CLI ---------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GLP_CLI_PATH + "\" " + args;
  const int status = std::system(cmd.c_str());
  return status;
}

void criterion_11(const fs::path& work) {
  const fs::path first = work / "cli_first", a = work / "cli_a", b = work / "cli_b";
  const std::string cfg = (fs::path(GLP_CONFIG_DIR) / "loop_gmm.json").string();
  int rc = run_cli("loop -q -c \"" + cfg + "\" --seed 7 -o \"" + first.string() + "\"");
  const fs::path manifest = first / "manifest.json";
  rc |= run_cli("loop -q --from-manifest \"" + manifest.string() + "\" -o \"" + a.string() + "\"");
  rc |= run_cli("loop -q --from-manifest \"" + manifest.string() + "\" -o \"" + b.string() + "\"");
  const auto ta = read_bytes(a / "timeline.csv"), tb = read_bytes(b / "timeline.csv");
  const bool same = rc == 0 && !ta.empty() && ta == tb && ta == read_bytes(first / "timeline.csv");
  report(11, same,
         std::string("two runs from one manifest: timeline.csv ") + (same ? "byte-identical" : "differs") + " (" +
             std::to_string(ta.size()) + " bytes, exit " + std::to_string(rc) + ")");
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "glp_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  try {
    criterion_1();
    criterion_2();
    criterion_3();

    // GMM(K=2) loops: GMM variant of 4, then 6 and 9
    const auto tg = Clock::now();
    std::vector<Timeline> gmm;
    for (auto s : kSeeds) gmm.push_back(run_logged(run_config(ModelKind::gmm, s), false));
    const double gmm_time = seconds_since(tg);

    // TinyGAN loops and long-training controls
    const auto tl = Clock::now();
    std::vector<Timeline> gan;
    for (auto s : kSeeds) gan.push_back(run_logged(run_config(ModelKind::gan, s), false));
    const double gan_time = seconds_since(tl);
    std::vector<Timeline> longrun;
    for (auto s : kSeeds) longrun.push_back(run_logged(run_config(ModelKind::gan, s), true));

    // bootstrap-copy control for 7
    std::vector<Timeline> copies;
    for (auto s : kSeeds) {
      LoopConfig cfg = run_config(ModelKind::bootstrap, s);
      cfg.iterations = 1;
      copies.push_back(run_logged(cfg, false));
    }

    // 4
    auto demotes = [](const Timeline& t) {
      return complete(t) && t.metrics[kLastIteration].fcd > t.metrics[0].fcd &&
             t.metrics[kLastIteration].color_kl > t.metrics[0].color_kl;
    };
    int gan_hits = 0, gmm_hits = 0;
    for (const auto& t : gan) gan_hits += demotes(t) ? 1 : 0;
    for (const auto& t : gmm) gmm_hits += demotes(t) ? 1 : 0;
    report(4, gan_hits >= 4 && gmm_hits >= 4 && gan_time < kBudgetGan && gmm_time < kBudgetGmm,
           "TinyGAN fcd and color_kl rise in " + count_str(gan_hits, kSeeds.size()) + " seeds (" +
               fmt("%.0f", gan_time) + " s), GMM in " + count_str(gmm_hits, kSeeds.size()) + " (" +
               fmt("%.1f", gmm_time) + " s)");

    // 5
    int long_hits = 0;
    std::vector<double> long_final, loop_final;
    for (std::size_t i = 0; i < kSeeds.size(); ++i) {
      if (!complete(longrun[i]) || !complete(gan[i])) continue;
      long_final.push_back(longrun[i].metrics[kLastIteration].fcd);
      loop_final.push_back(gan[i].metrics[kLastIteration].fcd);
      if (long_final.back() <= loop_final.back()) ++long_hits;
    }
    report(5, long_hits >= 4,
           "long-run final fcd <= loop iteration-5 fcd in " + count_str(long_hits, kSeeds.size()) +
               " seeds (long " + join(long_final, "%.2f") + " vs loop " + join(loop_final, "%.2f") + ")");
    int stable = 0;
    for (const auto& t : longrun)
      if (complete(t) && t.metrics[kLastIteration].fcd <= 2.0 * t.metrics[0].fcd) ++stable;
    std::printf("  info: long-run final fcd within 2x of checkpoint 0 in %d/%zu seeds\n", stable, kSeeds.size());

    // 6
    int cov_hits = 0, icv_hits = 0;
    std::vector<double> icv0, icv5;
    for (const auto& t : gmm) {
      if (!complete(t)) continue;
      const auto& first = t.metrics[0];
      const auto& last = t.metrics[kLastIteration];
      cov_hits += last.class_coverage <= first.class_coverage ? 1 : 0;
      icv_hits += last.intra_class_variance < first.intra_class_variance ? 1 : 0;
      icv0.push_back(first.intra_class_variance);
      icv5.push_back(last.intra_class_variance);
    }
    report(6, cov_hits >= 4 && icv_hits >= 4,
           "GMM(K=2) coverage non-increasing in " + count_str(cov_hits, kSeeds.size()) +
               " seeds, intra_class_variance falls in " + count_str(icv_hits, kSeeds.size()) + " (iter 0: " +
               join(icv0, "%.4f") + "; iter 5: " + join(icv5, "%.4f") + ")");

    // 7
    int det_hits = 0, copy_ok = 0;
    std::string det, cp;
    for (const auto& t : gan) {
      if (t.metrics.empty()) continue;
      const auto& m = t.metrics[0];
      det_hits += (m.realfake_svm >= kDetectMin && m.realfake_forest >= kDetectMin) ? 1 : 0;
      det += (det.empty() ? "" : " ") + fmt("%.3f", m.realfake_svm) + "/" + fmt("%.3f", m.realfake_forest);
    }
    for (const auto& t : copies) {
      if (t.metrics.empty()) continue;
      const auto& m = t.metrics[0];
      const bool ok = std::abs(m.realfake_svm - kCopyCenter) <= kCopyHalfWidth &&
                      std::abs(m.realfake_forest - kCopyCenter) <= kCopyHalfWidth;
      copy_ok += ok ? 1 : 0;
      cp += (cp.empty() ? "" : " ") + fmt("%.3f", m.realfake_svm) + "/" + fmt("%.3f", m.realfake_forest);
    }
    report(7, det_hits >= 4 && copy_ok == static_cast<int>(kSeeds.size()),
           "iteration-0 TinyGAN svm/forest >= 0.60 in " + count_str(det_hits, kSeeds.size()) + " seeds (" + det +
               "), bootstrap copy within 0.5 +- 0.1 in " + count_str(copy_ok, kSeeds.size()) + " (" + cp + ")");

    // 8
    int gauss_hits = 0;
    for (const auto& t : gan)
      if (complete(t) && t.metrics[kLastIteration].gauss_alpha_kl < t.metrics[0].gauss_alpha_kl) ++gauss_hits;
    report(8, gauss_hits >= 3,
           "mean gauss_alpha_kl falls from iteration 0 to 5 in " + count_str(gauss_hits, kSeeds.size()) + " seeds");
    for (const auto& t : gan) {
      std::vector<double> curve;
      for (const auto& m : t.metrics) curve.push_back(m.gauss_alpha_kl);
      std::printf("  gauss_alpha_kl curve, seed %llu: %s (real %s)\n", static_cast<unsigned long long>(t.config.seed),
                  join(curve, "%.4f").c_str(),
                  join({t.references.real_gauss_alpha_kl.begin(), t.references.real_gauss_alpha_kl.end()}, "%.4f")
                      .c_str());
    }

    // 9
    double corr_err = 0.0;
    bool finite = true;
    std::vector<double> r2s;
    for (const auto* set : {&gmm, &gan}) {
      for (const auto& t : *set) {
        if (t.metrics.size() < 2) continue;
        const fs::path dir = work / ("timeline_" + std::string(model_kind_name(t.config.model)) + "_" +
                                     std::to_string(t.config.seed));
        write_timeline(dir, t);
        const double r2 = correlate(t);
        corr_err = std::max(corr_err, std::abs(r2 - csv_r_squared(dir / "timeline.csv")));
        if (set == &gmm) {
          finite = finite && std::isfinite(r2);
          r2s.push_back(r2);
        }
      }
    }
    report(9, corr_err <= kCorrelateTol && finite && r2s.size() == kSeeds.size(),
           "correlate vs CSV max difference " + fmt("%.1e", corr_err) + ", GMM R^2 " + join(r2s, "%.4f"));

    criterion_10(work);
    criterion_11(work);
  } catch (const std::exception& e) {
    std::printf("acceptance harness error: %s\n", e.what());
    return 2;
  }

  std::printf("known failures (reported, not fatal): 6, 8\n");
  return g_unexpected == 0 ? 0 : 1;
}
