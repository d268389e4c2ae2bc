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

// Overlap metrics and the consistency mean square error (CMSE) of a fixed
// component across a set of segmentations.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapeseg/grid.hpp"

namespace shapeseg {

inline constexpr int kDefaultPatchSize = 32;

// |a & b| / |a | b|, 1 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

// Per-class intersection and union pixel counts between a prediction and a
// ground truth.
struct ClassOverlap {
  std::vector<std::uint64_t> intersection;
  std::vector<std::uint64_t> union_;
};

ClassOverlap class_overlap(const LabelMap& pred, const LabelMap& gt);

struct MeanIoU {
  // nullopt for classes absent from both maps; those are left out of `mean`.
  std::vector<std::optional<double>> per_class;
  double mean = 0.0;
};

MeanIoU mean_iou(const LabelMap& pred, const LabelMap& gt);
MeanIoU mean_iou(const ClassOverlap& overlap);

struct BoundingBox {
  int x0 = 0;  // inclusive bounds
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ComponentPatch {
  std::string source_id;
  BoundingBox bbox;
  BinaryMask mask;  // patch_size x patch_size, non-empty
};

// Largest 4-connected component of target_class (ties go to the component
// reached first in raster order), cropped to its tight bounding box,
// bilinearly resized to patch_size x patch_size and binarized at 0.5. Returns
// nullopt when the class is absent or the resized patch comes out empty.
std::optional<ComponentPatch> extract_component_patch(const LabelMap& seg,
                                                      ClassId target_class,
                                                      int patch_size = kDefaultPatchSize,
                                                      std::string source_id = {});

struct AverageMask {
  std::size_t pixel_count = 0;         // n
  std::vector<std::uint32_t> votes;    // pixel-wise sum of the patches
  BinaryMask mask;                     // the n most voted pixels
};

// n = mean set-pixel count rounded half away from zero; the mask holds the n
// pixels with the most votes, ties going to the earlier pixel in raster order.
AverageMask average_mask(const std::vector<ComponentPatch>& patches);

struct SkippedImage {
  std::string id;
  std::string reason;
};

struct ConsistencyReport {
  std::size_t patch_count = 0;
  std::size_t mean_pixel_count = 0;
  BinaryMask average_mask;
  std::vector<std::string> patch_ids;  // source_id of each patch, input order
  std::vector<double> per_patch_iou;
  double cmse = 0.0;
  std::vector<SkippedImage> skipped;
};

// mean_i (1 - IoU(M_i, m))^2 against the average mask m. The squared errors
// are summed in ascending order so the result does not depend on the order of
// the patches. Needs at least two patches.
ConsistencyReport cmse(const std::vector<ComponentPatch>& patches);

}  // namespace shapeseg
