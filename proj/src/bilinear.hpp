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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace shapeseg::detail {

// Bilinear sample of a row-major plane at (fx, fy); the position is clamped to
// [0, width - 1] x [0, height - 1] first.
inline double sample_bilinear(std::span<const double> plane, int width, int height,
                              double fx, double fy) {
  fx = std::clamp(fx, 0.0, static_cast<double>(width - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(height - 1));
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double ax = fx - x0;
  const double ay = fy - y0;
  auto at = [&](int x, int y) { return plane[static_cast<std::size_t>(y) * width + x]; };
  const double top = at(x0, y0) + ax * (at(x1, y0) - at(x0, y0));
  const double bottom = at(x0, y1) + ax * (at(x1, y1) - at(x0, y1));
  return top + ay * (bottom - top);
}

// Source coordinate of destination pixel `dst` when resizing `src_size` pixels
// to `dst_size` pixels with half-pixel alignment.
inline double resize_source(int dst, int src_size, int dst_size) {
  return (dst + 0.5) * static_cast<double>(src_size) / dst_size - 0.5;
}

}  // namespace shapeseg::detail
