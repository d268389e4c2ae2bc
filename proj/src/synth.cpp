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

#include "shapeseg/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "shapeseg/errors.hpp"
#include "shapeseg/geometry.hpp"
#include "shapeseg/rng.hpp"

namespace shapeseg {
namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool inside_polygon(const std::vector<Point>& poly, double px, double py) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > py) != (b.y > py)) {
      const double x_at = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
      if (px < x_at) inside = !inside;
    }
  }
  return inside;
}

struct Extent {
  double x0, y0, x1, y1;
};

Extent polygon_extent(const std::vector<Point>& poly) {
  Extent e{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
  for (const auto& p : poly) {
    e.x0 = std::min(e.x0, p.x);
    e.y0 = std::min(e.y0, p.y);
    e.x1 = std::max(e.x1, p.x);
    e.y1 = std::max(e.y1, p.y);
  }
  return e;
}

// Fills pixels flagged in `vacated` with the majority class of their filled
// 4-neighbors, one ring per pass. `target` never counts as a neighbor class.
void fill_vacated(std::vector<ClassId>& ids, std::vector<char> vacated, int w, int h,
                  int num_classes, ClassId target) {
  std::vector<int> votes(num_classes);
  std::vector<std::pair<std::size_t, ClassId>> ring;
  bool pending = std::find(vacated.begin(), vacated.end(), 1) != vacated.end();
  while (pending) {
    ring.clear();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!vacated[i]) continue;
        std::fill(votes.begin(), votes.end(), 0);
        bool any = false;
        auto look = [&](std::size_t j) {
          if (!vacated[j] && ids[j] != target) {
            ++votes[ids[j]];
            any = true;
          }
        };
        if (x > 0) look(i - 1);
        if (x + 1 < w) look(i + 1);
        if (y > 0) look(i - w);
        if (y + 1 < h) look(i + w);
        if (any) {
          const auto best = std::max_element(votes.begin(), votes.end());
          ring.emplace_back(i, static_cast<ClassId>(best - votes.begin()));
        }
      }
    }
    if (ring.empty()) {
      // Nothing to grow from: the whole image was the target region.
      const ClassId fallback = target == 0 ? 1 % num_classes : 0;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (vacated[i]) ids[i] = fallback;
      }
      return;
    }
    for (const auto& [i, c] : ring) {
      ids[i] = c;
      vacated[i] = 0;
    }
    pending = std::find(vacated.begin(), vacated.end(), 1) != vacated.end();
  }
}

LabelMap translate_target(const LabelMap& gt, const PerturbSpec& spec) {
  Xoshiro256 rng(spec.seed);
  const int ox = static_cast<int>(rng.uniform_int(-spec.amplitude, spec.amplitude));
  const int oy = static_cast<int>(rng.uniform_int(-spec.amplitude, spec.amplitude));
  const int w = gt.width();
  const int h = gt.height();
  std::vector<ClassId> ids(gt.ids().begin(), gt.ids().end());
  std::vector<char> vacated(ids.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (gt(x, y) != spec.target_class) continue;
      // Pixel stays in the region iff its pre-image under the shift was in it.
      const int sx = x - ox;
      const int sy = y - oy;
      const bool covered =
          sx >= 0 && sx < w && sy >= 0 && sy < h && gt(sx, sy) == spec.target_class;
      if (!covered) vacated[static_cast<std::size_t>(y) * w + x] = 1;
    }
  }
  fill_vacated(ids, std::move(vacated), w, h, gt.num_classes(), spec.target_class);
  return LabelMap(w, h, std::move(ids), gt.num_classes());
}

LabelMap morph_target(const LabelMap& gt, const PerturbSpec& spec, bool grow) {
  const int w = gt.width();
  const int h = gt.height();
  const ClassId target = spec.target_class;
  std::vector<char> in(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) in[i] = gt[i] == target;
  std::vector<char> next;
  for (int round = 0; round < spec.amplitude; ++round) {
    next = in;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (in[i] == grow) continue;
        const bool hit = (x > 0 && in[i - 1] == grow) || (x + 1 < w && in[i + 1] == grow) ||
                         (y > 0 && in[i - w] == grow) || (y + 1 < h && in[i + w] == grow);
        if (hit) next[i] = grow;
      }
    }
    in.swap(next);
  }
  std::vector<ClassId> ids(gt.ids().begin(), gt.ids().end());
  if (grow) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (in[i]) ids[i] = target;
    }
  } else {
    std::vector<char> vacated(ids.size(), 0);
    for (std::size_t i = 0; i < ids.size(); ++i) vacated[i] = ids[i] == target && !in[i];
    fill_vacated(ids, std::move(vacated), w, h, gt.num_classes(), target);
  }
  return LabelMap(w, h, std::move(ids), gt.num_classes());
}

LabelMap boundary_noise(const LabelMap& gt, const PerturbSpec& spec) {
  const auto distance = distance_to_other_class(gt);
  if (!distance.has_boundary()) return gt;
  const double flip = std::min(1.0, spec.amplitude / 10.0);
  const int w = gt.width();
  const int h = gt.height();
  const auto sq = distance.squared();
  Xoshiro256 rng(spec.seed);
  std::vector<ClassId> ids(gt.ids().begin(), gt.ids().end());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (sq[i] > 4 || !rng.bernoulli(flip)) continue;
      const ClassId own = gt(x, y);
      int best = 5;
      ClassId replacement = own;
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || nx >= w || ny < 0 || ny >= h || gt(nx, ny) == own) continue;
          const int d2 = dx * dx + dy * dy;
          if (d2 < best) {
            best = d2;
            replacement = gt(nx, ny);
          }
        }
      }
      ids[i] = replacement;
    }
  }
  return LabelMap(w, h, std::move(ids), gt.num_classes());
}

}  // namespace

SceneSpec default_scene(std::uint64_t seed) {
  SceneSpec spec;
  spec.width = 128;
  spec.height = 128;
  spec.hole_radius = 10.0;
  spec.free_region = {{24.0, 30.0}, {92.0, 22.0}, {100.0, 84.0}, {34.0, 96.0}};
  spec.hole_center = {96, 74};
  spec.seed = seed;
  return spec;
}

void validate_scene(const SceneSpec& spec) {
  checked_area(spec.width, spec.height);
  const double r = spec.hole_radius;
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw ValidationError("scene: hole radius must be finite and non-negative");
  }
  const auto& c = spec.hole_center;
  if (c.x - r < 0.0 || c.y - r < 0.0 || c.x + r > spec.width - 1 ||
      c.y + r > spec.height - 1) {
    throw ValidationError("scene: hole at (" + std::to_string(c.x) + ", " +
                          std::to_string(c.y) + ") radius " + std::to_string(r) +
                          " leaves the image");
  }
  const auto& poly = spec.free_region;
  if (poly.size() < 3) {
    throw ValidationError("scene: free region needs at least 3 vertices");
  }
  for (const auto& p : poly) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0 ||
        p.x > spec.width || p.y > spec.height) {
      throw ValidationError("scene: free-region vertex outside the image");
    }
  }
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap-around
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        throw ValidationError("scene: free-region polygon is not simple");
      }
    }
  }
}

LabelMap generate_scene(const SceneSpec& spec) {
  validate_scene(spec);
  const int w = spec.width;
  const int h = spec.height;
  const double r2 = spec.hole_radius * spec.hole_radius;
  std::vector<ClassId> ids(checked_area(w, h), kCoatingClass);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - spec.hole_center.x;
      const double dy = y - spec.hole_center.y;
      ClassId& id = ids[static_cast<std::size_t>(y) * w + x];
      if (dx * dx + dy * dy <= r2) {
        id = kHoleClass;
      } else if (inside_polygon(spec.free_region, x + 0.5, y + 0.5)) {
        id = kFreeAreaClass;
      }
    }
  }
  return LabelMap(w, h, std::move(ids), kSceneClasses);
}

std::vector<SceneSpec> suite_specs(const SceneSpec& base, int count, int jitter) {
  if (count < 2) throw ValidationError("suite: count must be at least 2");
  if (jitter < 0) throw ValidationError("suite: jitter must be non-negative");
  validate_scene(base);
  const double r = base.hole_radius;
  const auto& c = base.hole_center;
  const Extent e = polygon_extent(base.free_region);
  if (c.x - r - jitter < 0 || c.y - r - jitter < 0 || c.x + r + jitter > base.width - 1 ||
      c.y + r + jitter > base.height - 1 || e.x0 - jitter < 0 || e.y0 - jitter < 0 ||
      e.x1 + jitter > base.width || e.y1 + jitter > base.height) {
    throw ValidationError("suite: jitter " + std::to_string(jitter) +
                          " can push the geometry out of the image");
  }
  std::vector<SceneSpec> specs;
  specs.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
    Xoshiro256 rng(seed);
    SceneSpec s = base;
    s.seed = seed;
    s.hole_center.x += static_cast<int>(rng.uniform_int(-jitter, jitter));
    s.hole_center.y += static_cast<int>(rng.uniform_int(-jitter, jitter));
    const double px = static_cast<double>(rng.uniform_int(-jitter, jitter));
    const double py = static_cast<double>(rng.uniform_int(-jitter, jitter));
    for (auto& p : s.free_region) {
      p.x += px;
      p.y += py;
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

std::vector<LabelMap> generate_suite(const SceneSpec& base, int count, int jitter) {
  std::vector<LabelMap> maps;
  for (const auto& spec : suite_specs(base, count, jitter)) {
    maps.push_back(generate_scene(spec));
  }
  return maps;
}

PerturbKind parse_perturb_kind(std::string_view name) {
  if (name == "none") return PerturbKind::kNone;
  if (name == "translate") return PerturbKind::kTranslate;
  if (name == "dilate") return PerturbKind::kDilate;
  if (name == "erode") return PerturbKind::kErode;
  if (name == "boundary_noise") return PerturbKind::kBoundaryNoise;
  throw ValidationError("unknown perturbation kind '" + std::string(name) + "'");
}

std::string_view perturb_kind_name(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::kNone: return "none";
    case PerturbKind::kTranslate: return "translate";
    case PerturbKind::kDilate: return "dilate";
    case PerturbKind::kErode: return "erode";
    case PerturbKind::kBoundaryNoise: return "boundary_noise";
  }
  throw ValidationError("unknown perturbation kind");
}

LabelMap perturb_segmentation(const LabelMap& gt, const PerturbSpec& spec) {
  if (spec.amplitude < 0) throw ValidationError("perturb: amplitude must be non-negative");
  if (spec.target_class < 0 || spec.target_class >= gt.num_classes()) {
    throw ValidationError("perturb: target class out of range");
  }
  if (spec.amplitude == 0) return gt;
  switch (spec.kind) {
    case PerturbKind::kNone: return gt;
    case PerturbKind::kTranslate: return translate_target(gt, spec);
    case PerturbKind::kDilate: return morph_target(gt, spec, true);
    case PerturbKind::kErode: return morph_target(gt, spec, false);
    case PerturbKind::kBoundaryNoise: return boundary_noise(gt, spec);
  }
  throw ValidationError("perturb: unknown kind");
}

}  // namespace shapeseg
