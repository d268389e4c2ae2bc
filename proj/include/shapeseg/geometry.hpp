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

// Distance fields over label maps, the variable-boundary-domain probability
// map and the boundary/body supervision targets derived from it.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "shapeseg/grid.hpp"

namespace shapeseg {

// Euclidean distance from every pixel to the nearest pixel of another class.
// A single-class map has no boundary; its field is all zeros and
// has_boundary() is false.
class DistanceField {
 public:
  DistanceField(int width, int height, std::vector<std::int64_t> squared,
                bool has_boundary);

  int width() const noexcept { return field_.width(); }
  int height() const noexcept { return field_.height(); }
  bool has_boundary() const noexcept { return has_boundary_; }
  const ScalarField& field() const noexcept { return field_; }
  // Exact integer squared distances; field() holds their square roots.
  std::span<const std::int64_t> squared() const noexcept { return squared_; }

 private:
  std::vector<std::int64_t> squared_;
  ScalarField field_;
  bool has_boundary_;
};

// Exact EDT, computed once per class with a separable two-pass lower-envelope
// method. Linear in the pixel count for each class.
DistanceField distance_to_other_class(const LabelMap& labels);

// p = exp(-(d - 1)^2 / 2). Throws ValidationError for a map without boundary.
ScalarField vbd_probability(const DistanceField& distance);

// Pixels with distance <= dt. All zeros if the map has no boundary.
BinaryMask boundary_mask_dt(const LabelMap& labels, int dt);

struct SoftTargets {};
struct SampledTargets {
  std::uint64_t seed = 0;
};
struct ThresholdTargets {
  double tau = 0.5;
};
using TargetMode = std::variant<SoftTargets, SampledTargets, ThresholdTargets>;

struct BoundaryTargets {
  ScalarField boundary_target;  // in [0, 1]; hard 0/1 outside soft mode
  ScalarField weight_map;       // strictly positive
  BinaryMask body_ignore;       // excluded from the body loss
};

// soft:      target = p, positives and body_ignore = {p >= 0.5}
// sampled:   target_i ~ Bernoulli(p_i), drawn in raster order from the seed
// threshold: target_i = [p_i >= tau]
// Weights balance the positive set; when that set is empty or covers the whole
// map the weight map is uniformly 1. Throws ValidationError for a single-class
// map or tau outside [0, 1].
BoundaryTargets make_boundary_targets(const LabelMap& labels,
                                      const TargetMode& mode = SampledTargets{});

// N / (2 N_pos) on positives, N / (2 N_neg) on negatives. Requires both sets
// to be non-empty.
ScalarField balance_weights(const BinaryMask& positives);

}  // namespace shapeseg
