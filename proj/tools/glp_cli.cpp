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

// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "glp/glp.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw CliError{kExitUsage, msg}; }

void check(glp_status s) {
  if (s == GLP_OK) return;
  const int code = s == GLP_ERR_CONFIG ? kExitUsage : kExitRuntime;
  throw CliError{code, std::string(glp_status_name(s)) + ": " + glp_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { glp_string_free(p); }
  std::string str() const { return p == nullptr ? std::string() : std::string(p); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitUsage, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{kExitRuntime, "cannot write " + path};
  out << text;
}

/// "--some-key value" and "--some_key=value" pairs left over by CLI11.
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() <= 2) usage_error("unexpected argument '" + tok + "'");
    std::string key = tok.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) usage_error("missing value for --" + key);
      value = extras[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    out.emplace_back(key, value);
  }
  return out;
}

std::string resolve_config(const std::string& text, const std::vector<std::pair<std::string, std::string>>& ov) {
  std::vector<const char*> keys, values;
  for (const auto& [k, v] : ov) {
    keys.push_back(k.c_str());
    values.push_back(v.c_str());
  }
  CString out;
  check(glp_config_resolve(text.c_str(), keys.data(), values.data(), ov.size(), &out.p));
  return out.str();
}

struct DatasetHandle {
  glp_dataset* p = nullptr;
  ~DatasetHandle() { glp_dataset_free(p); }
};

struct TimelineHandle {
  glp_timeline* p = nullptr;
  ~TimelineHandle() { glp_timeline_free(p); }
};

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string config, out, seed;
};

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& extras) {
  const std::string text = a.config.empty() ? std::string() : read_file(a.config);
  auto ov = parse_overrides(extras);
  if (!a.seed.empty()) ov.emplace_back("seed", a.seed);
  // Files default to the 32x32 CIFAR-10 record layout.
  bool has_side = std::any_of(ov.begin(), ov.end(), [](const auto& kv) { return kv.first == "side"; });
  if (!text.empty()) {
    try {
      const json doc = json::parse(text);
      has_side = has_side || (doc.is_object() && doc.contains("side"));
    } catch (const json::parse_error&) {
      // reported by the resolver below
    }
  }
  if (!has_side) ov.insert(ov.begin(), {"side", "32"});
  const std::string cfg = resolve_config(text, ov);

  DatasetHandle d;
  check(glp_dataset_synth(cfg.c_str(), &d.p));
  check(glp_dataset_save(d.p, a.out.c_str()));
  std::cout << "wrote " << glp_dataset_size(d.p) << " images (side " << glp_dataset_side(d.p) << ") to " << a.out
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct LoopArgs {
  std::string config, out, seed, manifest, seeds;
  bool control = false;
  bool quiet = false;
  unsigned jobs = 1;
};

void progress_cb(const glp_iteration_metrics* m, void* user) {
  auto* prefix = static_cast<std::string*>(user);
  std::fprintf(stderr, "%siteration %zu: fcd=%.6g color_kl=%.6g gauss_alpha_kl=%.6g coverage=%d\n", prefix->c_str(),
               m->iteration, m->fcd, m->color_kl, m->gauss_alpha_kl, m->class_coverage);
}

int run_one_loop(const std::string& cfg, const std::string& out_dir, bool control, bool quiet, std::string prefix) {
  const std::string command = control ? "loop --control" : "loop";
  check(glp_manifest_write(out_dir.c_str(), command.c_str(), cfg.c_str()));
  TimelineHandle t;
  check(glp_loop_run(cfg.c_str(), control ? 1 : 0, quiet ? nullptr : progress_cb, &prefix, &t.p));
  check(glp_timeline_write(t.p, out_dir.c_str()));
  size_t bad = 0;
  if (glp_timeline_diverged(t.p, &bad)) {
    std::fprintf(stderr, "%straining diverged at iteration %zu; timeline truncated (see error.txt)\n", prefix.c_str(),
                 bad);
  }
  return kExitOk;
}

int cmd_loop(LoopArgs a, const std::vector<std::string>& extras) {
  std::string text;
  auto ov = parse_overrides(extras);
  if (!a.manifest.empty()) {
    json m;
    try {
      m = json::parse(read_file(a.manifest));
    } catch (const json::parse_error& e) {
      usage_error(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.is_object() || !m.contains("config") || !m.contains("command")) usage_error("manifest lacks config/command");
    text = m["config"].dump();
    a.control = a.control || m["command"].get<std::string>().find("--control") != std::string::npos;
  } else if (!a.config.empty()) {
    text = read_file(a.config);
  }
  if (!a.seed.empty()) ov.emplace_back("seed", a.seed);

  if (a.seeds.empty()) {
    const std::string cfg = resolve_config(text, ov);
    return run_one_loop(cfg, a.out, a.control, a.quiet, "");
  }

  std::vector<std::string> seeds;
  std::stringstream ss(a.seeds);
  for (std::string s; std::getline(ss, s, ',');)
    if (!s.empty()) seeds.push_back(s);
  if (seeds.empty()) usage_error("--seeds needs a comma-separated list");
  std::vector<std::string> configs;
  for (const auto& s : seeds) {
    auto o = ov;
    o.emplace_back("seed", s);
    configs.push_back(resolve_config(text, o));
  }

  std::mutex mu;
  std::vector<CliError> errors;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= configs.size()) return;
        i = next++;
      }
      const std::string dir = (std::filesystem::path(a.out) / ("seed_" + seeds[i])).string();
      try {
        run_one_loop(configs[i], dir, a.control, a.quiet, "[seed " + seeds[i] + "] ");
      } catch (const CliError& e) {
        std::lock_guard<std::mutex> lock(mu);
        errors.push_back({e.code, "seed " + seeds[i] + ": " + e.message});
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (!errors.empty()) {
    int code = kExitOk;
    for (const auto& e : errors) {
      std::cerr << "error: " << e.message << "\n";
      code = std::max(code, e.code);
    }
    return code;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PairArgs {
  std::string real, generated, out, config, seed = "1";
  int side = 32;
  int bins = 32;
  bool csv = false;
};

void load_pair(const PairArgs& a, DatasetHandle& real, DatasetHandle& gen) {
  check(glp_dataset_load(a.real.c_str(), a.side, &real.p));
  check(glp_dataset_load(a.generated.c_str(), a.side, &gen.p));
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    usage_error("--seed expects a non-negative integer");
  }
}

int cmd_detect(const PairArgs& a) {
  DatasetHandle real, gen;
  load_pair(a, real, gen);
  glp_detect_result r{};
  check(glp_detect(real.p, gen.p, a.bins, parse_seed(a.seed), &r));
  json doc;
  doc["svm_accuracy"] = r.svm_accuracy;
  doc["forest_accuracy"] = r.forest_accuracy;
  doc["n_train"] = r.n_train;
  doc["n_test"] = r.n_test;
  doc["bins"] = r.bins;
  const std::string text = doc.dump(2) + "\n";
  if (!a.out.empty()) write_file(a.out, text);
  std::cout << text;
  return kExitOk;
}

int cmd_analyze(const PairArgs& a, const std::vector<std::string>& extras) {
  const std::string text = a.config.empty() ? std::string() : read_file(a.config);
  auto ov = parse_overrides(extras);
  ov.emplace_back("seed", a.seed);
  const std::string cfg = resolve_config(text, ov);
  DatasetHandle real, gen;
  load_pair(a, real, gen);
  glp_shift_report r{};
  check(glp_analyze(real.p, gen.p, cfg.c_str(), &r));
  std::string out;
  if (a.csv) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n", r.color_kl, r.gauss_alpha_kl[0],
                  r.gauss_alpha_kl[1], r.gauss_alpha_kl[2], r.fcd, r.class_coverage, r.intra_class_variance,
                  r.realfake_accuracy);
    out = "color_kl,gauss_alpha_kl_r,gauss_alpha_kl_g,gauss_alpha_kl_b,fcd,class_coverage,intra_class_variance,"
          "realfake_accuracy\n" +
          std::string(buf);
  } else {
    CString js;
    js.p = glp_shift_report_json(&r);
    out = js.str();
  }
  if (!a.out.empty()) write_file(a.out, out);
  std::cout << out;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-training laboratory for generative models and distribution-shift measures"};
  app.set_version_flag("--version", std::string(glp_version()));
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic labeled dataset file");
  s->add_option("-c,--config", synth.config, "JSON config file");
  s->add_option("-o,--out", synth.out, "Output dataset file")->required();
  s->add_option("--seed", synth.seed, "Random seed");
  s->allow_extras();

  LoopArgs loop;
  auto* l = app.add_subcommand("loop", "Run loop training (or the long-training control)");
  l->add_option("-c,--config", loop.config, "JSON config file");
  l->add_option("-o,--out", loop.out, "Output directory")->required();
  l->add_option("--seed", loop.seed, "Random seed");
  l->add_option("--seeds", loop.seeds, "Comma-separated seeds; one sub-directory per seed");
  l->add_option("--jobs", loop.jobs, "Concurrent runs when --seeds is given")->check(CLI::PositiveNumber);
  l->add_option("--from-manifest", loop.manifest, "Re-run the configuration stored in a manifest.json");
  l->add_flag("--control", loop.control, "Long-training control instead of loop training");
  l->add_flag("-q,--quiet", loop.quiet, "No progress output");
  l->allow_extras();

  PairArgs detect;
  auto* d = app.add_subcommand("detect", "Real/fake detectability of a generated dataset");
  d->add_option("--real", detect.real, "Real dataset file")->required();
  d->add_option("--generated", detect.generated, "Generated dataset file")->required();
  d->add_option("--side", detect.side, "Image side of both files")->check(CLI::PositiveNumber);
  d->add_option("--bins", detect.bins, "Histogram bins")->check(CLI::Range(2, 1 << 20));
  d->add_option("--seed", detect.seed, "Random seed");
  d->add_option("-o,--out", detect.out, "Also write the JSON report here");

  PairArgs analyze;
  auto* a = app.add_subcommand("analyze", "Recompute shift measures for stored datasets");
  a->add_option("--real", analyze.real, "Real labeled dataset file")->required();
  a->add_option("--generated", analyze.generated, "Generated dataset file")->required();
  a->add_option("--side", analyze.side, "Image side of both files")->check(CLI::PositiveNumber);
  a->add_option("-c,--config", analyze.config, "JSON config file");
  a->add_option("--seed", analyze.seed, "Random seed");
  a->add_option("-o,--out", analyze.out, "Also write the report here");
  a->add_flag("--csv", analyze.csv, "CSV instead of JSON");
  a->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_synth(synth, s->remaining());
    if (*l) return cmd_loop(loop, l->remaining());
    if (*d) return cmd_detect(detect);
    if (*a) return cmd_analyze(analyze, a->remaining());
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
