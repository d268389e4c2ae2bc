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

// Dense raster value types. Layout is row-major with the origin at the
// top-left corner, x growing rightward and y downward. Every type validates
// its invariants on construction and is immutable afterwards; operations that
// derive a raster return a new value.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shapeseg {

using ClassId = std::int32_t;

class LabelMap {
 public:
  // Throws ValidationError on non-positive dimensions, a length mismatch or an
  // id outside [0, num_classes).
  LabelMap(int width, int height, std::vector<ClassId> ids, int num_classes);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t size() const noexcept { return ids_.size(); }

  ClassId operator()(int x, int y) const noexcept {
    return ids_[static_cast<std::size_t>(y) * width_ + x];
  }
  ClassId operator[](std::size_t index) const noexcept { return ids_[index]; }
  std::span<const ClassId> ids() const noexcept { return ids_; }

 private:
  int width_;
  int height_;
  int num_classes_;
  std::vector<ClassId> ids_;
};

class BinaryMask {
 public:
  // Nonzero entries of `bits` are stored as 1.
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);
  static BinaryMask zeros(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool operator()(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  bool operator[](std::size_t index) const noexcept { return bits_[index] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  // Number of set pixels.
  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

class ScalarField {
 public:
  // Throws ValidationError on a length mismatch or any non-finite value.
  ScalarField(int width, int height, std::vector<double> values);
  static ScalarField filled(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int x, int y) const noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  double operator[](std::size_t index) const noexcept { return values_[index]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

// Channel-major stack of planes: element (c, x, y) lives at
// c * width * height + y * width + x.
class FeatureGrid {
 public:
  FeatureGrid(int channels, int width, int height, std::vector<double> values);
  static FeatureGrid filled(int channels, int width, int height, double value);
  static FeatureGrid from_field(const ScalarField& field);

  int channels() const noexcept { return channels_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int c, int x, int y) const noexcept {
    return values_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x];
  }
  double operator[](std::size_t index) const noexcept { return values_[index]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> plane(int c) const noexcept {
    return std::span<const double>(values_).subspan(c * plane_size(), plane_size());
  }
  ScalarField channel(int c) const;

  bool same_shape(const FeatureGrid& other) const noexcept {
    return channels_ == other.channels_ && width_ == other.width_ &&
           height_ == other.height_;
  }

 private:
  int channels_;
  int width_;
  int height_;
  std::vector<double> values_;
};

// Per-pixel displacement in pixels. Sampling position of pixel (x, y) is
// (x + dx, y + dy).
class FlowField {
 public:
  FlowField(int width, int height, std::vector<double> dx, std::vector<double> dy);
  static FlowField zero(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const double> dx() const noexcept { return dx_; }
  std::span<const double> dy() const noexcept { return dy_; }

 private:
  int width_;
  int height_;
  std::vector<double> dx_;
  std::vector<double> dy_;
};

LabelMap make_label_map(int width, int height, std::vector<ClassId> ids,
                        int num_classes);

// True iff dimensions, num_classes and every id agree.
bool map_equal(const LabelMap& a, const LabelMap& b) noexcept;

// Fraction of pixels whose ids agree. Throws ValidationError when the
// dimensions differ.
double pixel_accuracy(const LabelMap& pred, const LabelMap& gt);

// Throws ValidationError unless width and height are at least 1 and
// width * height * channels does not overflow.
std::size_t checked_area(int width, int height, int channels = 1);

}  // namespace shapeseg
