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

#include "shapeseg/consistency.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "bilinear.hpp"
#include "shapeseg/errors.hpp"

namespace shapeseg {
namespace {

void require_same_size(const char* op, int wa, int ha, int wb, int hb) {
  if (wa != wb || ha != hb) {
    throw ValidationError(std::string(op) + ": dimension mismatch (" + std::to_string(wa) +
                          "x" + std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                          std::to_string(hb) + ")");
  }
}

struct Component {
  std::vector<std::size_t> pixels;
  BoundingBox bbox;
};

// Largest 4-connected component of `target`, first-reached wins ties.
std::optional<Component> largest_component(const LabelMap& seg, ClassId target) {
  const int w = seg.width();
  const int h = seg.height();
  std::vector<char> seen(seg.size(), 0);
  std::vector<std::size_t> stack;
  std::optional<Component> best;
  for (std::size_t start = 0; start < seg.size(); ++start) {
    if (seen[start] || seg[start] != target) continue;
    Component comp;
    comp.bbox = {w, h, -1, -1};
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      comp.pixels.push_back(i);
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      comp.bbox.x0 = std::min(comp.bbox.x0, x);
      comp.bbox.y0 = std::min(comp.bbox.y0, y);
      comp.bbox.x1 = std::max(comp.bbox.x1, x);
      comp.bbox.y1 = std::max(comp.bbox.y1, y);
      auto visit = [&](std::size_t j) {
        if (!seen[j] && seg[j] == target) {
          seen[j] = 1;
          stack.push_back(j);
        }
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
      if (y > 0) visit(i - w);
      if (y + 1 < h) visit(i + w);
    }
    if (!best || comp.pixels.size() > best->pixels.size()) best = std::move(comp);
  }
  return best;
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_size("iou", a.width(), a.height(), b.width(), b.height());
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

ClassOverlap class_overlap(const LabelMap& pred, const LabelMap& gt) {
  require_same_size("mean_iou", pred.width(), pred.height(), gt.width(), gt.height());
  if (pred.num_classes() != gt.num_classes()) {
    throw ValidationError("mean_iou: num_classes differ (" +
                          std::to_string(pred.num_classes()) + " vs " +
                          std::to_string(gt.num_classes()) + ")");
  }
  ClassOverlap out{std::vector<std::uint64_t>(gt.num_classes(), 0),
                   std::vector<std::uint64_t>(gt.num_classes(), 0)};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const ClassId p = pred[i];
    const ClassId g = gt[i];
    if (p == g) {
      ++out.intersection[g];
      ++out.union_[g];
    } else {
      ++out.union_[g];
      ++out.union_[p];
    }
  }
  return out;
}

MeanIoU mean_iou(const ClassOverlap& overlap) {
  MeanIoU out;
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < overlap.union_.size(); ++c) {
    if (overlap.union_[c] == 0) {
      out.per_class.emplace_back(std::nullopt);
      continue;
    }
    const double v = static_cast<double>(overlap.intersection[c]) /
                     static_cast<double>(overlap.union_[c]);
    out.per_class.emplace_back(v);
    sum += v;
    ++counted;
  }
  out.mean = counted == 0 ? 0.0 : sum / static_cast<double>(counted);
  return out;
}

MeanIoU mean_iou(const LabelMap& pred, const LabelMap& gt) {
  return mean_iou(class_overlap(pred, gt));
}

std::optional<ComponentPatch> extract_component_patch(const LabelMap& seg,
                                                      ClassId target_class, int patch_size,
                                                      std::string source_id) {
  if (target_class < 0 || target_class >= seg.num_classes()) {
    throw ValidationError("extract_component_patch: target class " +
                          std::to_string(target_class) + " out of range");
  }
  if (patch_size < 1) {
    throw ValidationError("extract_component_patch: patch size must be positive");
  }
  auto comp = largest_component(seg, target_class);
  if (!comp) return std::nullopt;

  const BoundingBox box = comp->bbox;
  const int cw = box.width();
  const int ch = box.height();
  std::vector<double> crop(static_cast<std::size_t>(cw) * ch, 0.0);
  for (std::size_t i : comp->pixels) {
    const int x = static_cast<int>(i % seg.width()) - box.x0;
    const int y = static_cast<int>(i / seg.width()) - box.y0;
    crop[static_cast<std::size_t>(y) * cw + x] = 1.0;
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(patch_size) * patch_size);
  for (int y = 0; y < patch_size; ++y) {
    const double sy = detail::resize_source(y, ch, patch_size);
    for (int x = 0; x < patch_size; ++x) {
      const double sx = detail::resize_source(x, cw, patch_size);
      bits[static_cast<std::size_t>(y) * patch_size + x] =
          detail::sample_bilinear(crop, cw, ch, sx, sy) >= 0.5;
    }
  }
  BinaryMask mask(patch_size, patch_size, std::move(bits));
  if (mask.count() == 0) return std::nullopt;
  return ComponentPatch{std::move(source_id), box, std::move(mask)};
}

AverageMask average_mask(const std::vector<ComponentPatch>& patches) {
  if (patches.empty()) throw ValidationError("average_mask: no patches");
  const int w = patches.front().mask.width();
  const int h = patches.front().mask.height();
  const std::size_t area = patches.front().mask.size();
  std::vector<std::uint32_t> votes(area, 0);
  std::uint64_t total = 0;
  for (const auto& patch : patches) {
    require_same_size("average_mask", patch.mask.width(), patch.mask.height(), w, h);
    for (std::size_t i = 0; i < area; ++i) votes[i] += patch.mask[i];
    total += patch.mask.count();
  }
  const std::uint64_t count = patches.size();
  const std::size_t n = static_cast<std::size_t>((2 * total + count) / (2 * count));

  // Take pixels by descending vote, raster order within a vote level.
  std::vector<std::uint8_t> bits(area, 0);
  std::size_t taken = 0;
  for (std::uint64_t level = count + 1; level-- > 0 && taken < n;) {
    for (std::size_t i = 0; i < area && taken < n; ++i) {
      if (votes[i] == level) {
        bits[i] = 1;
        ++taken;
      }
    }
  }
  return AverageMask{n, std::move(votes), BinaryMask(w, h, std::move(bits))};
}

ConsistencyReport cmse(const std::vector<ComponentPatch>& patches) {
  if (patches.size() < 2) {
    throw ValidationError("cmse: need at least 2 patches, got " +
                          std::to_string(patches.size()));
  }
  AverageMask avg = average_mask(patches);
  std::vector<std::string> ids;
  std::vector<double> ious;
  ious.reserve(patches.size());
  for (const auto& patch : patches) {
    ids.push_back(patch.source_id);
    ious.push_back(iou(patch.mask, avg.mask));
  }

  // (1 - I/U)^2 is evaluated as (U - I)^2 / U^2 so each term is rounded once;
  // the ascending sum makes the result independent of patch order.
  std::vector<double> errors;
  errors.reserve(patches.size());
  for (const auto& patch : patches) {
    std::uint64_t inter = 0;
    std::uint64_t uni = 0;
    for (std::size_t i = 0; i < patch.mask.size(); ++i) {
      inter += patch.mask[i] && avg.mask[i];
      uni += patch.mask[i] || avg.mask[i];
    }
    const double miss = static_cast<double>(uni - inter);
    const double u = static_cast<double>(uni);
    errors.push_back(uni == 0 ? 0.0 : (miss * miss) / (u * u));
  }
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;

  return ConsistencyReport{patches.size(), avg.pixel_count, std::move(avg.mask),
                           std::move(ids), std::move(ious), sum / static_cast<double>(patches.size()), {}};
}

}  // namespace shapeseg
