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

#include "shapeseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shapeseg/errors.hpp"

namespace shapeseg {
namespace {

void require_length(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw ValidationError(std::string(what) + ": expected " +
                          std::to_string(expected) + " values, got " +
                          std::to_string(actual));
  }
}

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError(std::string(what) + ": non-finite value at index " +
                            std::to_string(i));
    }
  }
}

}  // namespace

std::size_t checked_area(int width, int height, int channels) {
  if (width < 1 || height < 1 || channels < 1) {
    throw ValidationError("raster dimensions must be positive, got " +
                          std::to_string(channels) + "x" + std::to_string(width) +
                          "x" + std::to_string(height));
  }
  const auto limit = std::numeric_limits<std::size_t>::max();
  std::size_t area = static_cast<std::size_t>(width);
  if (area > limit / static_cast<std::size_t>(height)) {
    throw ValidationError("raster dimensions overflow");
  }
  area *= static_cast<std::size_t>(height);
  if (area > limit / static_cast<std::size_t>(channels)) {
    throw ValidationError("raster dimensions overflow");
  }
  return area * static_cast<std::size_t>(channels);
}

LabelMap::LabelMap(int width, int height, std::vector<ClassId> ids, int num_classes)
    : width_(width), height_(height), num_classes_(num_classes), ids_(std::move(ids)) {
  require_length(ids_.size(), checked_area(width, height), "label map");
  if (num_classes < 1) {
    throw ValidationError("label map: num_classes must be at least 1");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] < 0 || ids_[i] >= num_classes) {
      throw ValidationError("label map: id " + std::to_string(ids_[i]) +
                            " at index " + std::to_string(i) +
                            " out of range for " + std::to_string(num_classes) +
                            " classes");
    }
  }
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  require_length(bits_.size(), checked_area(width, height), "binary mask");
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

BinaryMask BinaryMask::zeros(int width, int height) {
  return BinaryMask(width, height,
                    std::vector<std::uint8_t>(checked_area(width, height), 0));
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

ScalarField::ScalarField(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  require_length(values_.size(), checked_area(width, height), "scalar field");
  require_finite(values_, "scalar field");
}

ScalarField ScalarField::filled(int width, int height, double value) {
  return ScalarField(width, height,
                     std::vector<double>(checked_area(width, height), value));
}

FeatureGrid::FeatureGrid(int channels, int width, int height, std::vector<double> values)
    : channels_(channels), width_(width), height_(height), values_(std::move(values)) {
  require_length(values_.size(), checked_area(width, height, channels), "feature grid");
  require_finite(values_, "feature grid");
}

FeatureGrid FeatureGrid::filled(int channels, int width, int height, double value) {
  return FeatureGrid(channels, width, height,
                     std::vector<double>(checked_area(width, height, channels), value));
}

FeatureGrid FeatureGrid::from_field(const ScalarField& field) {
  return FeatureGrid(1, field.width(), field.height(),
                     std::vector<double>(field.values().begin(), field.values().end()));
}

ScalarField FeatureGrid::channel(int c) const {
  if (c < 0 || c >= channels_) {
    throw ValidationError("feature grid: channel " + std::to_string(c) +
                          " out of range");
  }
  auto p = plane(c);
  return ScalarField(width_, height_, std::vector<double>(p.begin(), p.end()));
}

FlowField::FlowField(int width, int height, std::vector<double> dx, std::vector<double> dy)
    : width_(width), height_(height), dx_(std::move(dx)), dy_(std::move(dy)) {
  const auto n = checked_area(width, height);
  require_length(dx_.size(), n, "flow dx");
  require_length(dy_.size(), n, "flow dy");
  require_finite(dx_, "flow dx");
  require_finite(dy_, "flow dy");
}

FlowField FlowField::zero(int width, int height) {
  const auto n = checked_area(width, height);
  return FlowField(width, height, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
}

LabelMap make_label_map(int width, int height, std::vector<ClassId> ids,
                        int num_classes) {
  return LabelMap(width, height, std::move(ids), num_classes);
}

bool map_equal(const LabelMap& a, const LabelMap& b) noexcept {
  return a.width() == b.width() && a.height() == b.height() &&
         a.num_classes() == b.num_classes() &&
         std::equal(a.ids().begin(), a.ids().end(), b.ids().begin(), b.ids().end());
}

double pixel_accuracy(const LabelMap& pred, const LabelMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw ValidationError("pixel_accuracy: dimension mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gt[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace shapeseg
