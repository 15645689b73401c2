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

#include "glp/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "glp/error.hpp"

#ifndef GLP_VERSION
#define GLP_VERSION "0.0.0"
#endif

namespace glp {

namespace {

using json = nlohmann::json;

std::string fmt(double v) { return format_real(v); }

std::string join_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timeline_csv(const Timeline& t) {
  std::string out = std::string(kTimelineHeader) + '\n';
  for (const auto& m : t.metrics) {
    out += join_row({std::to_string(m.iteration), fmt(m.fcd), fmt(m.color_kl), fmt(m.gauss_alpha_kl),
                     std::to_string(m.class_coverage), fmt(m.intra_class_variance), fmt(m.realfake_svm),
                     fmt(m.realfake_forest)});
  }
  return out;
}

std::string class_histogram_csv(const ClassHistogram& h) {
  std::string out = "class,frequency\n";
  for (int c = 0; c < h.num_classes; ++c) out += join_row({std::to_string(c), fmt(h.frequencies[c])});
  return out;
}

std::string loss_csv(const std::vector<LossRecord>& trace) {
  std::string out = "step,d_loss,g_loss\n";
  for (const auto& r : trace) out += join_row({std::to_string(r.step), fmt(r.d_loss), fmt(r.g_loss)});
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const LoopConfig& cfg, const ManifestInfo& info) {
  json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["command"] = info.command;
  doc["config"] = json::parse(config_to_json(cfg));
  doc["seed"] = cfg.seed;
  doc["timestamp"] = info.timestamp;
  doc["version"] = GLP_VERSION;
  doc["outputs"] = info.outputs;
  return doc.dump(2) + '\n';
}

std::vector<std::string> planned_outputs(const LoopConfig& cfg) {
  std::vector<std::string> out = {"manifest.json", "timeline.csv"};
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    out.push_back("class_hist_" + std::to_string(t) + ".csv");
    out.push_back("loss_" + std::to_string(t) + ".csv");
  }
  for (const char* f : {"fcd_curve.csv", "kl_vs_fcd.csv", "correlation.csv", "alpha_kl_curve.csv", "mean_hist.csv"})
    out.emplace_back(f);
  if (cfg.clusters) out.emplace_back("cluster_freq.csv");
  if (cfg.pca_samples > 0) out.emplace_back("pca_projection.csv");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(Errc::io, "write failed for " + path.string());
}

void write_manifest(const std::filesystem::path& out_dir, const LoopConfig& cfg, const ManifestInfo& info) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, "cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "manifest.json", manifest_json(cfg, info));
}

void write_timeline(const std::filesystem::path& out_dir, const Timeline& t) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, "cannot create " + out_dir.string() + ": " + ec.message());

  write_text(out_dir / "timeline.csv", timeline_csv(t));
  for (const auto& m : t.metrics) {
    write_text(out_dir / ("class_hist_" + std::to_string(m.iteration) + ".csv"), class_histogram_csv(m.class_histogram));
    write_text(out_dir / ("loss_" + std::to_string(m.iteration) + ".csv"), loss_csv(m.loss_trace));
  }

  std::string fcd = "iteration,fcd\n", kvf = "iteration,color_kl,fcd\n";
  std::string alpha = "iteration,gauss_alpha_kl_r,gauss_alpha_kl_g,gauss_alpha_kl_b,gauss_alpha_kl\n";
  const auto& ra = t.references.real_gauss_alpha_kl;
  alpha += join_row({"-1", fmt(ra[0]), fmt(ra[1]), fmt(ra[2]), fmt((ra[0] + ra[1] + ra[2]) / 3.0)});
  std::string hist = "set,iteration," + std::string("bins,values") + '\n';
  hist += "real,-1," + t.references.real_histogram.to_csv_row() + '\n';
  for (const auto& m : t.metrics) {
    const std::string it = std::to_string(m.iteration);
    fcd += join_row({it, fmt(m.fcd)});
    kvf += join_row({it, fmt(m.color_kl), fmt(m.fcd)});
    const auto& a = m.gauss_alpha_kl_channels;
    alpha += join_row({it, fmt(a[0]), fmt(a[1]), fmt(a[2]), fmt(m.gauss_alpha_kl)});
    hist += "generated," + it + ',' + m.mean_histogram.to_csv_row() + '\n';
  }
  write_text(out_dir / "fcd_curve.csv", fcd);
  write_text(out_dir / "kl_vs_fcd.csv", kvf);
  write_text(out_dir / "alpha_kl_curve.csv", alpha);
  write_text(out_dir / "mean_hist.csv", hist);

  std::string corr = "r_squared,points\n";
  if (t.metrics.size() >= 2) corr += join_row({fmt(correlate(t)), std::to_string(t.metrics.size())});
  write_text(out_dir / "correlation.csv", corr);

  if (t.config.clusters) {
    std::string cf = "set,iteration,cluster,frequency\n";
    const auto& own = t.references.real_cluster_frequencies;
    for (int c = 0; c < own.num_classes; ++c) cf += join_row({"real", "-1", std::to_string(c), fmt(own.frequencies[c])});
    for (const auto& m : t.metrics) {
      const auto& h = m.cluster_frequencies;
      for (int c = 0; c < h.num_classes; ++c)
        cf += join_row({"generated", std::to_string(m.iteration), std::to_string(c), fmt(h.frequencies[c])});
    }
    write_text(out_dir / "cluster_freq.csv", cf);
  }
  if (t.config.pca_samples > 0) {
    std::string pca = "set,iteration,x,y\n";
    for (const auto& p : t.projection) pca += join_row({p.set, std::to_string(p.iteration), fmt(p.x), fmt(p.y)});
    write_text(out_dir / "pca_projection.csv", pca);
  }
  const auto err_path = out_dir / "error.txt";
  if (t.error_iteration) {
    write_text(err_path, "iteration " + std::to_string(*t.error_iteration) + ": " + t.error + '\n');
  } else {
    std::filesystem::remove(err_path, ec);
  }
}

std::string detect_json(const RealFakeResult& r, int bins) {
  json doc;
  doc["svm_accuracy"] = r.svm_accuracy;
  doc["forest_accuracy"] = r.forest_accuracy;
  doc["n_train"] = r.n_train;
  doc["n_test"] = r.n_test;
  doc["bins"] = bins;
  return doc.dump(2) + '\n';
}

std::string shift_report_json(const ShiftReport& r) {
  json doc;
  doc["color_kl"] = r.color_kl;
  doc["gauss_alpha_kl"] = {r.gauss_alpha_kl[0], r.gauss_alpha_kl[1], r.gauss_alpha_kl[2]};
  doc["fcd"] = r.fcd;
  doc["class_coverage"] = r.class_coverage;
  doc["intra_class_variance"] = r.intra_class_variance;
  doc["realfake_accuracy"] = r.realfake_accuracy;
  return doc.dump(2) + '\n';
}

std::string shift_report_csv_header() {
  return "color_kl,gauss_alpha_kl_r,gauss_alpha_kl_g,gauss_alpha_kl_b,fcd,class_coverage,intra_class_variance,"
         "realfake_accuracy\n";
}

std::string shift_report_csv_row(const ShiftReport& r) {
  return join_row({fmt(r.color_kl), fmt(r.gauss_alpha_kl[0]), fmt(r.gauss_alpha_kl[1]), fmt(r.gauss_alpha_kl[2]),
                   fmt(r.fcd), std::to_string(r.class_coverage), fmt(r.intra_class_variance),
                   fmt(r.realfake_accuracy)});
}

}  // namespace glp
