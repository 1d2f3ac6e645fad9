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

#include <cstdint>
#include <span>
#include <vector>

#include "lodsdf/geometry.hpp"
#include "lodsdf/meshing.hpp"

namespace lodsdf {

// Fraction of the Hann-windowed spectral energy of `samples` (mean removed,
// DC excluded) at angular frequencies above `cutoff`. `spacing` is the
// distance between consecutive samples. Throws std::invalid_argument when the
// sampling rate is below 4x the Nyquist rate for `cutoff` or n < 8.
double spectrum_above_cutoff(std::span<const double> samples, double spacing, double cutoff);

struct LineProbe {
  Vec3 center = Vec3::Zero();
  int axis = 0;
  double length = 0.0;
};

struct BandLimitConfig {
  int lines = 20;
  int samples = 1024;
  double margin = 1.1;  // cutoff = margin * bound
  std::uint64_t seed = 0;
};

// Axis-aligned lines through random centers in [-0.5, 0.5]^3. The line length
// is chosen so the samples sit at exactly 4x the Nyquist rate for the cutoff,
// which keeps the frequency resolution fine enough for low bounds.
std::vector<LineProbe> band_limit_lines(double bound, const BandLimitConfig& config);

// Energy fraction above margin * bound on each line.
std::vector<double> band_limit_fractions(const BatchSdf& field, double bound,
                                         const BandLimitConfig& config);

}  // namespace lodsdf
