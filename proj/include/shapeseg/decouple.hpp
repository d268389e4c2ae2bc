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

// Body/edge decoupling of a feature map: the body is a low-pass copy of the
// feature resampled along a flow field, the edge is what remains.

#include "shapeseg/grid.hpp"

namespace shapeseg {

inline constexpr int kDefaultSmoothFactor = 4;

struct DecoupledFeatures {
  FeatureGrid body;
  FeatureGrid edge;
};

// Average-pools each channel with a factor x factor window (partial windows at
// the right/bottom border average what they cover; the pooled grid is never
// smaller than 1x1) and bilinearly upsamples back with half-pixel alignment.
// factor must be a power of two; 1 returns the input unchanged.
FeatureGrid gaussian_smooth(const FeatureGrid& feature, int factor = kDefaultSmoothFactor);

// output(c, x, y) = bilinear sample of channel c at (x + dx, y + dy), with the
// sample position clamped to the image.
FeatureGrid warp(const FeatureGrid& feature, const FlowField& flow);

// body = warp(gaussian_smooth(feature, factor), flow); edge = feature - body.
DecoupledFeatures decouple(const FeatureGrid& feature, const FlowField& flow,
                           int factor = kDefaultSmoothFactor);

// Per-pixel L2 norm across channels.
ScalarField edge_to_boundary_score(const FeatureGrid& edge);

}  // namespace shapeseg
