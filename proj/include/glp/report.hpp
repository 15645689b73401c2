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

#include <filesystem>
#include <string>
#include <vector>

#include "glp/config.hpp"
#include "glp/detectors.hpp"
#include "glp/loop.hpp"
#include "glp/measures.hpp"

namespace glp {

inline constexpr int kManifestSchemaVersion = 1;

/// Column order of timeline.csv.
inline constexpr const char* kTimelineHeader =
    "iteration,fcd,color_kl,gauss_alpha_kl,class_coverage,intra_class_var,realfake_svm,realfake_forest";

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_real(double v);

std::string timeline_csv(const Timeline& t);
std::string class_histogram_csv(const ClassHistogram& h);
std::string loss_csv(const std::vector<LossRecord>& trace);

struct ManifestInfo {
  std::string command;
  std::string timestamp;  // ISO-8601 UTC
  std::vector<std::string> outputs;
};

std::string manifest_json(const LoopConfig& cfg, const ManifestInfo& info);
std::string utc_timestamp();

/// Writes the manifest first, then timeline.csv, class_hist_<t>.csv,
/// loss_<t>.csv and the plot-data CSVs. Returns the files written, relative
/// to out_dir.
std::vector<std::string> planned_outputs(const LoopConfig& cfg);
void write_manifest(const std::filesystem::path& out_dir, const LoopConfig& cfg, const ManifestInfo& info);
void write_timeline(const std::filesystem::path& out_dir, const Timeline& t);

std::string detect_json(const RealFakeResult& r, int bins);
std::string shift_report_json(const ShiftReport& r);
std::string shift_report_csv_header();
std::string shift_report_csv_row(const ShiftReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace glp
