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

#include "glp/error.hpp"

namespace glp {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::format: return "format";
    case Errc::io: return "io";
    case Errc::numeric: return "numeric";
    case Errc::diverged: return "training-diverged";
    case Errc::config: return "config";
  }
  return "unknown";
}

}  // namespace glp
