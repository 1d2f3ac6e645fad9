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

#include "lodsdf/spectrum.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace lodsdf {

double spectrum_above_cutoff(std::span<const double> samples, double spacing, double cutoff) {
  const std::size_t n = samples.size();
  if (n < 8) throw std::invalid_argument("spectrum: need at least 8 samples");
  if (!(spacing > 0.0) || !(cutoff > 0.0)) {
    throw std::invalid_argument("spectrum: spacing and cutoff must be positive");
  }
  const double nyquist = std::numbers::pi / spacing;
  if (nyquist < 4.0 * cutoff * (1.0 - 1e-12)) {
    throw std::invalid_argument("spectrum: undersampled, Nyquist " + std::to_string(nyquist) +
                                " is below 4x cutoff " + std::to_string(cutoff));
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= double(n);
  std::vector<double> windowed(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(k) / double(n)));
    windowed[k] = (samples[k] - mean) * w;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, windowed);

  const double length = spacing * double(n);
  double above = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double energy = std::norm(spectrum[k]);
    total += energy;
    if (2.0 * std::numbers::pi * double(k) / length > cutoff) above += energy;
  }
  return total > 0.0 ? above / total : 0.0;
}

std::vector<LineProbe> band_limit_lines(double bound, const BandLimitConfig& config) {
  if (config.lines < 1 || config.samples < 8) {
    throw std::invalid_argument("band limit: need >= 1 line and >= 8 samples");
  }
  if (!(bound > 0.0) || !(config.margin > 0.0)) {
    throw std::invalid_argument("band limit: bound and margin must be positive");
  }
  const double cutoff = config.margin * bound;
  const double length = std::numbers::pi * config.samples / (4.0 * cutoff);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  std::vector<LineProbe> lines;
  for (int l = 0; l < config.lines; ++l) {
    LineProbe line;
    line.center = Vec3(uniform(rng), uniform(rng), uniform(rng));
    line.axis = l % 3;
    line.length = length;
    lines.push_back(line);
  }
  return lines;
}

std::vector<double> band_limit_fractions(const BatchSdf& field, double bound,
                                         const BandLimitConfig& config) {
  const double cutoff = config.margin * bound;
  std::vector<double> out;
  std::vector<Vec3> points(static_cast<std::size_t>(config.samples));
  std::vector<double> values(points.size());
  for (const auto& line : band_limit_lines(bound, config)) {
    const double spacing = line.length / config.samples;
    for (std::size_t k = 0; k < points.size(); ++k) {
      points[k] = line.center;
      points[k][line.axis] += (double(k) - 0.5 * config.samples) * spacing;
    }
    field(points, values);
    out.push_back(spectrum_above_cutoff(values, spacing, cutoff));
  }
  return out;
}

}  // namespace lodsdf
