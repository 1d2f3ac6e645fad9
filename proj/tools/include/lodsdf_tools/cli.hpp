// Copyright 2026 The lodsdf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string_view>

#include "lodsdf/training.hpp"

namespace lodsdf {

// Parses "halfspace:<axis><op><value>", e.g. "halfspace:x<0" or
// "halfspace:z>=0.1". Throws std::invalid_argument on malformed input.
SpatialMask parse_mask(std::string_view spec);

// Entry point of the lodsdf command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace lodsdf
