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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace shapeseg {

struct GradCheckSummary {
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
};

// Compares `analytic` against central differences of `loss` at up to
// `max_samples` coordinates of `x` (all of them when x is small enough,
// otherwise a seeded sample). The relative error at a coordinate is
// |a - n| / max(|a|, |n|, floor). The floor keeps round-off in the central
// difference (about 1e-12 for unit-scale losses at step 1e-4) from dominating
// coordinates whose gradient is nearly zero.
GradCheckSummary check_gradient(const std::function<double(std::span<const double>)>& loss,
                                std::span<const double> x, std::span<const double> analytic,
                                std::size_t max_samples = 64, double step = 1e-4,
                                std::uint64_t seed = 0, double floor = 1e-6);

}  // namespace shapeseg
