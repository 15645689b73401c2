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

#include "glp/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "glp/error.hpp"

namespace glp {

namespace {

using json = nlohmann::json;

struct Field {
  std::string name;
  std::function<json(const LoopConfig&)> get;
  std::function<void(LoopConfig&, const json&)> set;
};

[[noreturn]] void bad_field(const std::string& name, const std::string& what) {
  fail(Errc::config, "field \"" + name + "\": " + what);
}

template <class T>
T as_unsigned(const std::string& name, const json& v) {
  if (!v.is_number_unsigned()) {
    bad_field(name, "expected a non-negative integer");
  }
  return v.get<T>();
}

int as_int(const std::string& name, const json& v) {
  if (!v.is_number_integer()) bad_field(name, "expected an integer");
  return v.get<int>();
}

double as_double(const std::string& name, const json& v) {
  if (!v.is_number()) bad_field(name, "expected a number");
  return v.get<double>();
}

bool as_bool(const std::string& name, const json& v) {
  if (!v.is_boolean()) bad_field(name, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& name, const json& v) {
  if (!v.is_string()) bad_field(name, "expected a string");
  return v.get<std::string>();
}

#define GLP_SIZE(key, member) \
  Field { key, [](const LoopConfig& c) { return json(c.member); }, \
          [](LoopConfig& c, const json& v) { c.member = as_unsigned<std::size_t>(key, v); } }
#define GLP_INT(key, member) \
  Field { key, [](const LoopConfig& c) { return json(c.member); }, \
          [](LoopConfig& c, const json& v) { c.member = as_int(key, v); } }
#define GLP_REAL(key, member) \
  Field { key, [](const LoopConfig& c) { return json(c.member); }, \
          [](LoopConfig& c, const json& v) { c.member = as_double(key, v); } }
#define GLP_BOOL(key, member) \
  Field { key, [](const LoopConfig& c) { return json(c.member); }, \
          [](LoopConfig& c, const json& v) { c.member = as_bool(key, v); } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"seed", [](const LoopConfig& c) { return json(c.seed); },
            [](LoopConfig& c, const json& v) { c.seed = as_unsigned<std::uint64_t>("seed", v); }},
      GLP_SIZE("iterations", iterations),
      Field{"model", [](const LoopConfig& c) { return json(model_kind_name(c.model)); },
            [](LoopConfig& c, const json& v) {
              const auto k = parse_model_kind(as_string("model", v));
              if (!k) bad_field("model", "expected \"bootstrap\", \"gmm\" or \"gan\"");
              c.model = *k;
            }},
      GLP_SIZE("gan_steps", gan.steps),
      GLP_SIZE("gan_batch_size", gan.batch_size),
      GLP_SIZE("gan_latent_dim", gan.latent_dim),
      GLP_SIZE("gan_hidden", gan.hidden),
      Field{"gan_loss",
            [](const LoopConfig& c) {
              return json(c.gan.loss == GanLoss::non_saturating ? "non_saturating" : "wasserstein_gp");
            },
            [](LoopConfig& c, const json& v) {
              const std::string s = as_string("gan_loss", v);
              if (s == "non_saturating" || s == "ns") {
                c.gan.loss = GanLoss::non_saturating;
              } else if (s == "wasserstein_gp" || s == "wgan-gp") {
                c.gan.loss = GanLoss::wasserstein_gp;
              } else {
                bad_field("gan_loss", "expected \"non_saturating\" or \"wasserstein_gp\"");
              }
            }},
      GLP_REAL("gan_gp_lambda", gan.gp_lambda),
      GLP_BOOL("gan_spectral_norm", gan.spectral_norm),
      GLP_REAL("gan_lr", gan.adam.lr),
      GLP_REAL("gan_beta1", gan.adam.beta1),
      GLP_REAL("gan_beta2", gan.adam.beta2),
      GLP_REAL("gan_adam_eps", gan.adam.eps),
      GLP_SIZE("gan_d_steps", gan.d_steps_per_g),
      GLP_SIZE("gmm_components", gmm_components),
      GLP_SIZE("gmm_max_iters", gmm_max_iters),
      GLP_REAL("gmm_tol", gmm_tol),
      GLP_REAL("bootstrap_noise", bootstrap_noise),
      GLP_INT("num_classes", synth.num_classes),
      GLP_INT("images_per_class", synth.images_per_class),
      GLP_INT("side", synth.side),
      GLP_REAL("pixel_noise_sigma", synth.pixel_noise_sigma),
      Field{"dataset_path", [](const LoopConfig& c) { return json(c.dataset_path); },
            [](LoopConfig& c, const json& v) { c.dataset_path = as_string("dataset_path", v); }},
      GLP_INT("dataset_side", dataset_side),
      GLP_INT("bins", bins),
      GLP_REAL("eps", eps),
      GLP_SIZE("classifier_hidden", classifier.hidden),
      GLP_SIZE("classifier_epochs", classifier.epochs),
      GLP_SIZE("classifier_min_steps", classifier.min_steps),
      GLP_SIZE("classifier_batch_size", classifier.batch_size),
      GLP_REAL("classifier_lr", classifier.adam.lr),
      GLP_SIZE("svm_epochs", detector.svm_epochs),
      GLP_REAL("svm_lambda", detector.svm_lambda),
      GLP_SIZE("forest_trees", detector.forest.n_trees),
      GLP_SIZE("forest_max_depth", detector.forest.max_depth),
      GLP_SIZE("forest_min_samples_split", detector.forest.min_samples_split),
      GLP_REAL("train_frac", detector.train_frac),
      GLP_BOOL("realfake", realfake),
      GLP_BOOL("clusters", clusters),
      GLP_SIZE("cluster_k", cluster_k),
      GLP_SIZE("pca_samples", pca_samples),
  };
  return table;
}

#undef GLP_SIZE
#undef GLP_INT
#undef GLP_REAL
#undef GLP_BOOL

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.name == key) return &f;
  return nullptr;
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

ParsedConfig parse_config(std::string_view json_text, const std::vector<Override>& overrides) {
  json doc = json::object();
  bool blank = true;
  for (char ch : json_text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
  if (!blank) {
    try {
      doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
      fail(Errc::config, "config: invalid JSON at " + line_col(json_text, e.byte == 0 ? 0 : e.byte - 1));
    }
  }
  if (!doc.is_object()) fail(Errc::config, "config: top level must be a JSON object");

  for (const auto& [key, raw] : overrides) {
    json v;
    try {
      v = json::parse(raw);
    } catch (const json::parse_error&) {
      v = raw;
    }
    // Strings that a field expects verbatim (paths, names) stay strings.
    if (const Field* f = find_field(key); f != nullptr && f->get(LoopConfig{}).is_string()) v = raw;
    doc[key] = v;
  }

  ParsedConfig out;
  for (const auto& [key, value] : doc.items()) {
    const Field* f = find_field(key);
    if (f == nullptr) bad_field(key, "unknown key");
    try {
      f->set(out.config, value);
    } catch (const json::exception&) {
      bad_field(key, "value out of range");
    }
    out.given.insert(key);
  }
  if (!out.given.contains("seed")) bad_field("seed", "required field is missing");
  validate(out.config);
  return out;
}

ParsedConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string config_to_json(const LoopConfig& cfg, int indent) {
  json doc = json::object();
  for (const auto& f : fields()) doc[f.name] = f.get(cfg);
  return doc.dump(indent);
}

}  // namespace glp
