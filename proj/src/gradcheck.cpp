/* Copyright 2026 The shapeseg Authors. All Rights Reserved.

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

#include "shapeseg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapeseg/errors.hpp"
#include "shapeseg/rng.hpp"

namespace shapeseg {

GradCheckSummary check_gradient(const std::function<double(std::span<const double>)>& loss,
                                std::span<const double> x, std::span<const double> analytic,
                                std::size_t max_samples, double step, std::uint64_t seed,
                                double floor) {
  if (x.size() != analytic.size()) {
    throw ValidationError("check_gradient: gradient size differs from input size");
  }
  std::vector<std::size_t> coords(x.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (coords.size() > max_samples) {
    // Partial Fisher-Yates with the portable generator.
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < max_samples; ++i) {
      const auto j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(i),
                          static_cast<std::int64_t>(coords.size() - 1)));
      std::swap(coords[i], coords[j]);
    }
    coords.resize(max_samples);
    std::sort(coords.begin(), coords.end());
  }

  std::vector<double> probe(x.begin(), x.end());
  GradCheckSummary summary;
  for (std::size_t i : coords) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double up = loss(probe);
    probe[i] = saved - step;
    const double down = loss(probe);
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double diff = std::abs(numeric - analytic[i]);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    summary.max_absolute_error = std::max(summary.max_absolute_error, diff);
    summary.max_relative_error = std::max(summary.max_relative_error, diff / scale);
    ++summary.checked;
  }
  return summary;
}

}  // namespace shapeseg
