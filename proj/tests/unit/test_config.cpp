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
#include <json.hpp>
#include <set>
#include <string>

#include "glp/config.hpp"
#include "glp/report.hpp"
#include "test_util.hpp"

using namespace glp;
using nlohmann::json;

namespace {

std::string config_error(std::string_view text, const std::vector<Override>& ov = {}) {
  try {
    (void)parse_config(text, ov);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("minimal config uses defaults") {
  const auto p = parse_config(R"({"seed": 7})");
  CHECK(p.config.seed == 7);
  CHECK(p.config.iterations == 6);
  CHECK(p.config.model == ModelKind::gmm);
  CHECK(p.config.gan.steps == 5000);
  CHECK(p.config.bins == 32);
  CHECK(p.config.synth.images_per_class == 500);
  CHECK(p.given == std::set<std::string>{"seed"});
}

TEST_CASE("missing seed names the field") {
  const std::string msg = config_error(R"({"iterations": 3})");
  CHECK(msg.find("\"seed\"") != std::string::npos);
  CHECK(msg.find("missing") != std::string::npos);
  CHECK(config_error("").find("\"seed\"") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  const std::string msg = config_error("{\n  \"seed\": 1,\n  \"iterations\": ,\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("field errors name the field") {
  CHECK(config_error(R"({"seed": 1, "iterations": -2})").find("\"iterations\"") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "model": "vae"})").find("\"model\"") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "colour": 3})").find("\"colour\"") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "bins": "many"})").find("\"bins\"") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "iterations": 0})").find("\"iterations\"") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "realfake": 1})").find("\"realfake\"") != std::string::npos);
  CHECK(config_error("[1, 2]").find("object") != std::string::npos);
}

TEST_CASE("overrides") {
  const auto p = parse_config(R"({"seed": 1, "iterations": 4})",
                              {{"iterations", "2"}, {"model", "gan"}, {"gan_lr", "0.001"}, {"realfake", "false"},
                               {"dataset_path", "123"}, {"gan_loss", "wgan-gp"}});
  CHECK(p.config.iterations == 2);
  CHECK(p.config.model == ModelKind::gan);
  CHECK(p.config.gan.adam.lr == 0.001);
  CHECK(!p.config.realfake);
  CHECK(p.config.dataset_path == "123");
  CHECK(p.config.gan.loss == GanLoss::wasserstein_gp);
  CHECK(parse_config("", {{"seed", "9"}}).config.seed == 9);
  CHECK(config_error("{}", {{"seed", "nine"}}).find("\"seed\"") != std::string::npos);
}

TEST_CASE("resolved config round-trips") {
  const auto p = parse_config(R"({"seed": 3, "model": "gan", "gan_steps": 100, "pixel_noise_sigma": 0.1})");
  const std::string text = config_to_json(p.config);
  const auto again = parse_config(text);
  CHECK(config_to_json(again.config) == text);
  const json doc = json::parse(text);
  CHECK(doc.size() == config_keys().size());
  for (const auto& k : config_keys()) CHECK(doc.contains(k));
  CHECK(doc["model"] == "gan");
  CHECK(doc["gan_steps"] == 100);
}

TEST_CASE("load_config") {
  const auto path = std::filesystem::temp_directory_path() / "glp_cfg_test.json";
  {
    std::ofstream out(path);
    out << R"({"seed": 11, "iterations": 2})";
  }
  CHECK(load_config(path).config.iterations == 2);
  CHECK(load_config(path, {{"iterations", "5"}}).config.iterations == 5);
  CHECK_ERRC(load_config(path.string() + ".missing"), Errc::io);
}

TEST_CASE("bundled configs parse") {
  const std::filesystem::path dir = GLP_CONFIG_DIR;
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    CHECK_NOTHROW(load_config(e.path()));
    ++n;
  }
  CHECK(n >= 3);
}

TEST_CASE("manifest json") {
  const auto cfg = parse_config(R"({"seed": 5})").config;
  const json m = json::parse(manifest_json(cfg, ManifestInfo{"loop", "2026-01-01T00:00:00Z", {"timeline.csv"}}));
  CHECK(m["schema_version"] == kManifestSchemaVersion);
  CHECK(m["command"] == "loop");
  CHECK(m["seed"] == 5);
  CHECK(m["config"]["seed"] == 5);
  CHECK(m["timestamp"] == "2026-01-01T00:00:00Z");
  CHECK(m["version"].is_string());
  CHECK(m["outputs"][0] == "timeline.csv");
  CHECK(config_to_json(parse_config(m["config"].dump()).config) == config_to_json(cfg));
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5e17})
    CHECK(std::stod(format_real(v)) == v);
}
