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

// Seeded generator of three-class inspection scenes (coating background,
// coating-free region, location hole) and of simulated segmenters that
// perturb a ground truth in controlled ways.

#include <cstdint>
#include <string_view>
#include <vector>

#include "shapeseg/grid.hpp"
#include "shapeseg/rng.hpp"

namespace shapeseg {

inline constexpr ClassId kCoatingClass = 0;
inline constexpr ClassId kFreeAreaClass = 1;
inline constexpr ClassId kHoleClass = 2;
inline constexpr int kSceneClasses = 3;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct PixelPos {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelPos&, const PixelPos&) = default;
};

struct SceneSpec {
  int width = 128;
  int height = 128;
  double hole_radius = 10.0;
  std::vector<Point> free_region;  // simple polygon, filled even-odd
  PixelPos hole_center;
  std::uint64_t seed = 0;
};

// A 128x128 scene with a quadrilateral free region and a hole of radius 10
// partly overlapping it.
SceneSpec default_scene(std::uint64_t seed = 0);

// Throws ValidationError when the hole leaves the image, the polygon has
// fewer than three vertices, leaves the image or crosses itself.
void validate_scene(const SceneSpec& spec);

// Pixel (x, y) is in the hole iff (x - cx)^2 + (y - cy)^2 <= r^2, and in the
// free region iff its center (x + 0.5, y + 0.5) is inside the polygon. The
// hole wins where both hold.
LabelMap generate_scene(const SceneSpec& spec);

// Scene i shifts the hole and the polygon by independent integer offsets drawn
// uniformly from [-jitter, jitter] per axis, using derive_seed(base.seed, i);
// its spec carries that derived seed. Fails if the base geometry moved by
// +-jitter could leave the image.
std::vector<SceneSpec> suite_specs(const SceneSpec& base, int count, int jitter);
std::vector<LabelMap> generate_suite(const SceneSpec& base, int count, int jitter);

enum class PerturbKind { kNone, kTranslate, kDilate, kErode, kBoundaryNoise };

PerturbKind parse_perturb_kind(std::string_view name);
std::string_view perturb_kind_name(PerturbKind kind);

struct PerturbSpec {
  PerturbKind kind = PerturbKind::kNone;
  int amplitude = 0;
  std::uint64_t seed = 0;
  ClassId target_class = kHoleClass;
};

// Seed of the simulated segmenter applied to a scene of the suite.
inline std::uint64_t perturbation_seed(std::uint64_t scene_seed) noexcept {
  return derive_seed(scene_seed, 0x70657274);
}

// Simulated prediction derived from a ground truth.
//  translate:      the target region is shifted by an integer offset drawn
//                  uniformly from [-a, a]^2; the shifted copy is kept only
//                  where it lands on the original region, so only target
//                  pixels change. Vacated pixels take the surrounding class.
//  dilate / erode: `a` rounds of 4-neighborhood morphology on the target
//                  class; eroded pixels take the surrounding class.
//  boundary_noise: every pixel within distance 2 of another class takes the
//                  class of its nearest other-class pixel with probability
//                  min(1, a / 10).
// "Surrounding class" is the majority over filled 4-neighbors, grown inward
// one ring at a time; ties go to the smaller id.
LabelMap perturb_segmentation(const LabelMap& gt, const PerturbSpec& spec);

}  // namespace shapeseg
