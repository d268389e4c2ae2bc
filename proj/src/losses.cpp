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

#include "shapeseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shapeseg/errors.hpp"

namespace shapeseg {
namespace {

const double kLogEps = std::log(kProbEpsilon);
const double kLog1mEps = std::log1p(-kProbEpsilon);

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void check_class_inputs(const char* op, const FeatureGrid& scores, const LabelMap& gt,
                        const std::optional<BinaryMask>& ignore) {
  if (scores.channels() != gt.num_classes()) {
    throw ValidationError(std::string(op) + ": score channels (" +
                          std::to_string(scores.channels()) + ") != num_classes (" +
                          std::to_string(gt.num_classes()) + ")");
  }
  if (scores.width() != gt.width() || scores.height() != gt.height()) {
    throw ValidationError(std::string(op) + ": scores and ground truth differ in size");
  }
  if (ignore && (ignore->width() != gt.width() || ignore->height() != gt.height())) {
    throw ValidationError(std::string(op) + ": ignore mask differs in size");
  }
}

std::size_t count_contributing(const char* op, std::size_t n,
                               const std::optional<BinaryMask>& ignore) {
  const std::size_t m = ignore ? n - ignore->count() : n;
  if (m == 0) throw ValidationError(std::string(op) + ": all pixels are ignored");
  return m;
}

// Per-pixel softmax over the channel axis. Scratch buffers are reused across
// pixels.
class PixelSoftmax {
 public:
  explicit PixelSoftmax(const FeatureGrid& scores)
      : scores_(scores), logp_(scores.channels()), p_(scores.channels()) {}

  void compute(std::size_t pixel) {
    const int c_count = scores_.channels();
    const std::size_t stride = scores_.plane_size();
    double top = scores_[pixel];
    for (int c = 1; c < c_count; ++c) top = std::max(top, scores_[c * stride + pixel]);
    double sum = 0.0;
    for (int c = 0; c < c_count; ++c) sum += std::exp(scores_[c * stride + pixel] - top);
    const double lse = top + std::log(sum);
    for (int c = 0; c < c_count; ++c) {
      logp_[c] = scores_[c * stride + pixel] - lse;
      p_[c] = std::exp(logp_[c]);
    }
  }

  double logp(int c) const { return logp_[c]; }
  double p(int c) const { return p_[c]; }
  static bool clamped(double logp) { return logp < kLogEps || logp > kLog1mEps; }

 private:
  const FeatureGrid& scores_;
  std::vector<double> logp_;
  std::vector<double> p_;
};

}  // namespace

LossResult weighted_bce(const ScalarField& scores, const ScalarField& target,
                        const ScalarField& weights) {
  if (scores.width() != target.width() || scores.height() != target.height() ||
      scores.width() != weights.width() || scores.height() != weights.height()) {
    throw ValidationError("weighted_bce: scores, target and weights differ in size");
  }
  const std::size_t n = scores.size();
  // Clamping y to [eps, 1 - eps] is clamping the score to the matching logits.
  const double hi = std::log1p(-kProbEpsilon) - std::log(kProbEpsilon);
  const double lo = -hi;
  std::vector<double> grad(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = target[i];
    const double w = weights[i];
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ValidationError("weighted_bce: target outside [0, 1] at index " +
                            std::to_string(i));
    }
    if (!(w > 0.0)) {
      throw ValidationError("weighted_bce: non-positive weight at index " +
                            std::to_string(i));
    }
    const double s = std::clamp(scores[i], lo, hi);
    const double log_y = -softplus(-s);
    const double log_1my = -softplus(s);
    total += -w * (t * log_y + (1.0 - t) * log_1my);
    if (scores[i] > lo && scores[i] < hi) {
      const double y = std::exp(log_y);
      grad[i] = w * (y - t) / static_cast<double>(n);
    }
  }
  return {total / static_cast<double>(n),
          FeatureGrid(1, scores.width(), scores.height(), std::move(grad))};
}

LossResult cross_entropy(const FeatureGrid& scores, const LabelMap& gt,
                         const std::optional<BinaryMask>& ignore) {
  check_class_inputs("cross_entropy", scores, gt, ignore);
  const std::size_t n = gt.size();
  const double inv_m = 1.0 / static_cast<double>(count_contributing("cross_entropy", n, ignore));
  const std::size_t stride = scores.plane_size();
  std::vector<double> grad(scores.size(), 0.0);
  PixelSoftmax softmax(scores);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ignore && (*ignore)[i]) continue;
    softmax.compute(i);
    const ClassId t = gt[i];
    const double lp = softmax.logp(t);
    total -= std::clamp(lp, kLogEps, kLog1mEps);
    if (PixelSoftmax::clamped(lp)) continue;
    for (int c = 0; c < scores.channels(); ++c) {
      grad[c * stride + i] = (softmax.p(c) - (c == t ? 1.0 : 0.0)) * inv_m;
    }
  }
  return {total * inv_m,
          FeatureGrid(scores.channels(), scores.width(), scores.height(), std::move(grad))};
}

LossResult dice_loss(const FeatureGrid& scores, const LabelMap& gt,
                     const std::optional<BinaryMask>& ignore, double smooth) {
  check_class_inputs("dice_loss", scores, gt, ignore);
  if (!(smooth >= 0.0) || !std::isfinite(smooth)) {
    throw ValidationError("dice_loss: smoothing must be finite and non-negative");
  }
  const std::size_t n = gt.size();
  count_contributing("dice_loss", n, ignore);
  const int classes = scores.channels();
  const std::size_t stride = scores.plane_size();
  const auto keep = [&](std::size_t i) { return !ignore || !(*ignore)[i]; };
  const auto clamp_p = [](double p) {
    return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
  };

  // Softmax probabilities for the kept pixels, plus per-class sums.
  std::vector<double> prob(scores.size(), 0.0);
  std::vector<double> inter(classes, 0.0), psum(classes, 0.0), gsum(classes, 0.0);
  PixelSoftmax softmax(scores);
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep(i)) continue;
    softmax.compute(i);
    for (int c = 0; c < classes; ++c) {
      const double pc = softmax.p(c);
      prob[c * stride + i] = pc;
      psum[c] += clamp_p(pc);
      if (gt[i] == c) {
        inter[c] += clamp_p(pc);
        gsum[c] += 1.0;
      }
    }
  }

  std::vector<double> num(classes), den(classes);
  double dice_sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    num[c] = 2.0 * inter[c] + smooth;
    den[c] = psum[c] + gsum[c] + smooth;
    dice_sum += den[c] > 0.0 ? num[c] / den[c] : 1.0;
  }
  const double inv_c = 1.0 / classes;

  std::vector<double> grad(scores.size(), 0.0);
  std::vector<double> upstream(classes);
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep(i)) continue;
    // d value / d p_c, zeroed where the probability was clamped.
    double weighted = 0.0;
    for (int c = 0; c < classes; ++c) {
      const double pc = prob[c * stride + i];
      const bool clamped = pc < kProbEpsilon || pc > 1.0 - kProbEpsilon;
      const double g = gt[i] == c ? 1.0 : 0.0;
      upstream[c] = (clamped || den[c] <= 0.0)
                        ? 0.0
                        : -inv_c * (2.0 * g * den[c] - num[c]) / (den[c] * den[c]);
      weighted += upstream[c] * pc;
    }
    for (int k = 0; k < classes; ++k) {
      grad[k * stride + i] = prob[k * stride + i] * (upstream[k] - weighted);
    }
  }
  return {1.0 - dice_sum * inv_c,
          FeatureGrid(classes, scores.width(), scores.height(), std::move(grad))};
}

LossResult focal_loss(const FeatureGrid& scores, const LabelMap& gt, double gamma) {
  check_class_inputs("focal_loss", scores, gt, std::nullopt);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("focal_loss: gamma must be finite and non-negative");
  }
  const std::size_t n = gt.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t stride = scores.plane_size();
  std::vector<double> grad(scores.size(), 0.0);
  PixelSoftmax softmax(scores);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    softmax.compute(i);
    const ClassId t = gt[i];
    const double raw = softmax.logp(t);
    const double lp = std::clamp(raw, kLogEps, kLog1mEps);
    const double pt = std::exp(lp);
    const double modulator = std::pow(1.0 - pt, gamma);
    total -= modulator * lp;
    if (PixelSoftmax::clamped(raw)) continue;
    // d loss / d s_k = a * (delta_kt - p_k)
    const double focus =
        gamma == 0.0 ? 0.0 : gamma * std::pow(1.0 - pt, gamma - 1.0) * pt * lp;
    const double a = focus - modulator;
    for (int c = 0; c < scores.channels(); ++c) {
      grad[c * stride + i] = a * ((c == t ? 1.0 : 0.0) - softmax.p(c)) * inv_n;
    }
  }
  return {total * inv_n,
          FeatureGrid(scores.channels(), scores.width(), scores.height(), std::move(grad))};
}

LossResult body_loss(const FeatureGrid& scores, const LabelMap& gt,
                     const std::optional<BinaryMask>& body_ignore, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("body_loss: lambda must lie in [0, 1]");
  }
  const LossResult ce = cross_entropy(scores, gt, body_ignore);
  const LossResult dice = dice_loss(scores, gt, body_ignore);
  std::vector<double> grad(scores.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] = lambda * ce.grad[i] + (1.0 - lambda) * dice.grad[i];
  }
  return {lambda * ce.value + (1.0 - lambda) * dice.value,
          FeatureGrid(scores.channels(), scores.width(), scores.height(), std::move(grad))};
}

TotalLoss total_loss(const LossResult& edge, const LossResult& body,
                     const LossResult& focal, const LossResult& dice,
                     const LossWeights& weights) {
  for (double lambda : {weights.edge, weights.body, weights.focal, weights.dice}) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw ValidationError("total_loss: weights must be finite and non-negative");
    }
  }
  if (edge.grad.channels() != 1) {
    throw ValidationError("total_loss: edge gradient must have a single channel");
  }
  if (!body.grad.same_shape(focal.grad) || !body.grad.same_shape(dice.grad)) {
    throw ValidationError("total_loss: class-score gradients differ in shape");
  }
  std::vector<double> edge_grad(edge.grad.size());
  for (std::size_t i = 0; i < edge_grad.size(); ++i) {
    edge_grad[i] = weights.edge * edge.grad[i];
  }
  std::vector<double> class_grad(body.grad.size());
  for (std::size_t i = 0; i < class_grad.size(); ++i) {
    class_grad[i] = weights.body * body.grad[i] + weights.focal * focal.grad[i] +
                    weights.dice * dice.grad[i];
  }
  const auto& shape = body.grad;
  return {weights.edge * edge.value + weights.body * body.value +
              weights.focal * focal.value + weights.dice * dice.value,
          FeatureGrid(1, edge.grad.width(), edge.grad.height(), std::move(edge_grad)),
          FeatureGrid(shape.channels(), shape.width(), shape.height(),
                      std::move(class_grad))};
}

}  // namespace shapeseg
