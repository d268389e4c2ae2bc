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

#include "shapeseg/decouple.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "bilinear.hpp"
#include "shapeseg/errors.hpp"

namespace shapeseg {

FeatureGrid gaussian_smooth(const FeatureGrid& feature, int factor) {
  if (factor < 1 || (factor & (factor - 1)) != 0) {
    throw ValidationError("gaussian_smooth: factor must be a power of two >= 1, got " +
                          std::to_string(factor));
  }
  if (factor == 1) return feature;

  const int w = feature.width();
  const int h = feature.height();
  const int pw = (w + factor - 1) / factor;
  const int ph = (h + factor - 1) / factor;
  std::vector<double> out(feature.size());
  std::vector<double> pooled(static_cast<std::size_t>(pw) * ph);
  std::vector<double> xs(w), ys(h);
  for (int x = 0; x < w; ++x) xs[x] = detail::resize_source(x, pw, w);
  for (int y = 0; y < h; ++y) ys[y] = detail::resize_source(y, ph, h);

  for (int c = 0; c < feature.channels(); ++c) {
    const auto plane = feature.plane(c);
    for (int py = 0; py < ph; ++py) {
      for (int px = 0; px < pw; ++px) {
        const int x_end = std::min(w, (px + 1) * factor);
        const int y_end = std::min(h, (py + 1) * factor);
        double sum = 0.0;
        for (int y = py * factor; y < y_end; ++y) {
          for (int x = px * factor; x < x_end; ++x) {
            sum += plane[static_cast<std::size_t>(y) * w + x];
          }
        }
        const int cells = (x_end - px * factor) * (y_end - py * factor);
        pooled[static_cast<std::size_t>(py) * pw + px] = sum / cells;
      }
    }
    double* dst = out.data() + c * feature.plane_size();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        dst[static_cast<std::size_t>(y) * w + x] =
            detail::sample_bilinear(pooled, pw, ph, xs[x], ys[y]);
      }
    }
  }
  return FeatureGrid(feature.channels(), w, h, std::move(out));
}

FeatureGrid warp(const FeatureGrid& feature, const FlowField& flow) {
  if (flow.width() != feature.width() || flow.height() != feature.height()) {
    throw ValidationError("warp: flow is " + std::to_string(flow.width()) + "x" +
                          std::to_string(flow.height()) + " but feature is " +
                          std::to_string(feature.width()) + "x" +
                          std::to_string(feature.height()));
  }
  const int w = feature.width();
  const int h = feature.height();
  const auto dx = flow.dx();
  const auto dy = flow.dy();
  std::vector<double> out(feature.size());
  for (int c = 0; c < feature.channels(); ++c) {
    const auto plane = feature.plane(c);
    double* dst = out.data() + c * feature.plane_size();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        dst[i] = detail::sample_bilinear(plane, w, h, x + dx[i], y + dy[i]);
      }
    }
  }
  return FeatureGrid(feature.channels(), w, h, std::move(out));
}

DecoupledFeatures decouple(const FeatureGrid& feature, const FlowField& flow, int factor) {
  FeatureGrid body = warp(gaussian_smooth(feature, factor), flow);
  std::vector<double> edge(feature.size());
  for (std::size_t i = 0; i < edge.size(); ++i) edge[i] = feature[i] - body[i];
  return {std::move(body),
          FeatureGrid(feature.channels(), feature.width(), feature.height(), std::move(edge))};
}

ScalarField edge_to_boundary_score(const FeatureGrid& edge) {
  const std::size_t n = edge.plane_size();
  std::vector<double> score(n, 0.0);
  for (int c = 0; c < edge.channels(); ++c) {
    const auto plane = edge.plane(c);
    for (std::size_t i = 0; i < n; ++i) score[i] += plane[i] * plane[i];
  }
  for (auto& s : score) s = std::sqrt(s);
  return ScalarField(edge.width(), edge.height(), std::move(score));
}

}  // namespace shapeseg
