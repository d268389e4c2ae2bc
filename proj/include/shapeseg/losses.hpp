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

// Supervision losses with closed-form gradients.
//
// Every kernel takes unbounded pre-activation scores. Binary losses apply a
// logistic activation, multi-class losses a softmax over the channel axis,
// both evaluated through log-sum-exp. Probabilities are clamped to
// [kProbEpsilon, 1 - kProbEpsilon]; a clamped entry contributes no gradient.
// Values are means over the contributing pixels.

#include <optional>

#include "shapeseg/grid.hpp"

namespace shapeseg {

inline constexpr double kProbEpsilon = 1e-7;
inline constexpr double kDefaultDiceSmooth = 1.0;
inline constexpr double kDefaultFocalGamma = 2.0;

struct LossResult {
  double value = 0.0;
  FeatureGrid grad;  // d value / d scores, same shape as the scores
};

// Weights of the edge, body, focal and dice terms of the combined objective.
struct LossWeights {
  double edge = 0.5;
  double body = 0.5;
  double focal = 0.5;
  double dice = 0.5;
};

// The combined objective keeps two gradient surfaces: the single-channel edge
// scores and the class scores shared by the body, focal and dice terms.
struct TotalLoss {
  double value = 0.0;
  FeatureGrid edge_grad;
  FeatureGrid class_grad;
};

// mean_i -w_i (t_i log y_i + (1 - t_i) log(1 - y_i)), y = logistic(score).
// Gradient has one channel.
LossResult weighted_bce(const ScalarField& scores, const ScalarField& target,
                        const ScalarField& weights);

// Mean over non-ignored pixels of -log softmax(scores)[gt].
LossResult cross_entropy(const FeatureGrid& scores, const LabelMap& gt,
                         const std::optional<BinaryMask>& ignore = std::nullopt);

// 1 - mean_c (2 sum p_c g_c + s) / (sum p_c + sum g_c + s), sums over
// non-ignored pixels, g the one-hot ground truth.
LossResult dice_loss(const FeatureGrid& scores, const LabelMap& gt,
                     const std::optional<BinaryMask>& ignore = std::nullopt,
                     double smooth = kDefaultDiceSmooth);

// Mean of -(1 - p_t)^gamma log p_t over all pixels.
LossResult focal_loss(const FeatureGrid& scores, const LabelMap& gt,
                      double gamma = kDefaultFocalGamma);

// lambda * cross_entropy + (1 - lambda) * dice_loss, both restricted to the
// pixels outside body_ignore.
LossResult body_loss(const FeatureGrid& scores, const LabelMap& gt,
                     const std::optional<BinaryMask>& body_ignore, double lambda = 0.5);

// edge.grad must have one channel; body, focal and dice gradients must share
// one shape.
TotalLoss total_loss(const LossResult& edge, const LossResult& body,
                     const LossResult& focal, const LossResult& dice,
                     const LossWeights& weights = {});

}  // namespace shapeseg
