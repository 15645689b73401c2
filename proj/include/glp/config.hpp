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
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glp/loop.hpp"

namespace glp {

/// Command-line override: key and raw value text. Values that parse as JSON
/// are used as such, anything else as a string.
using Override = std::pair<std::string, std::string>;

struct ParsedConfig {
  LoopConfig config;
  std::set<std::string> given;  // keys present in the file or overrides
};

/// Flat JSON object; every key is optional except "seed". Errors are
/// Errc::config and name the line or field at fault.
ParsedConfig parse_config(std::string_view json_text, const std::vector<Override>& overrides = {});
ParsedConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides = {});

/// The fully resolved configuration as a JSON object (same keys as the input).
std::string config_to_json(const LoopConfig& cfg, int indent = -1);

/// Names of all recognized keys.
const std::vector<std::string>& config_keys();

}  // namespace glp
