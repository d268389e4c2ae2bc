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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shapeseg/decouple.hpp"
#include "shapeseg/errors.hpp"

using namespace shapeseg;

namespace {

FeatureGrid random_grid(oracle::Random& rng, int max_side = 24) {
  const int c = rng.integer(1, 4);
  const int w = rng.integer(1, max_side);
  const int h = rng.integer(1, max_side);
  return FeatureGrid(c, w, h, rng.reals(static_cast<std::size_t>(c) * w * h, -5, 5));
}

FlowField random_flow(oracle::Random& rng, int w, int h, double amplitude) {
  const std::size_t n = static_cast<std::size_t>(w) * h;
  return FlowField(w, h, rng.reals(n, -amplitude, amplitude), rng.reals(n, -amplitude, amplitude));
}

// Column of the step in a one-row step image: pixels x < step are 0.
FeatureGrid step_image(int w, int h, int step) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) v[static_cast<std::size_t>(y) * w + x] = x < step ? 0.0 : 1.0;
  }
  return FeatureGrid(1, w, h, std::move(v));
}

int distance_to_step(int x, int step) { return x < step ? step - x : x - step + 1; }

}  // namespace

TEST_CASE("smoothing with factor 1 is the identity") {
  oracle::Random rng(41);
  const FeatureGrid g = random_grid(rng);
  const FeatureGrid s = gaussian_smooth(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(s[i] == g[i]);
}

TEST_CASE("smoothing keeps constants") {
  for (int factor : {1, 2, 4, 8}) {
    const FeatureGrid g = FeatureGrid::filled(2, 13, 7, 3.25);
    const FeatureGrid s = gaussian_smooth(g, factor);
    for (double v : s.values()) REQUIRE(v == doctest::Approx(3.25).epsilon(1e-15));
  }
}

TEST_CASE("4x4 checkerboard with factor 4 becomes uniform 0.5") {
  std::vector<double> v(16);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) v[y * 4 + x] = (x + y) % 2;
  }
  const FeatureGrid s = gaussian_smooth(FeatureGrid(1, 4, 4, v), 4);
  for (double x : s.values()) CHECK(x == 0.5);
}

TEST_CASE("smoothing rejects a factor that is not a power of two") {
  const FeatureGrid g = FeatureGrid::filled(1, 4, 4, 0.0);
  CHECK_THROWS_AS(gaussian_smooth(g, 3), ValidationError);
  CHECK_THROWS_AS(gaussian_smooth(g, 0), ValidationError);
}

TEST_CASE("smoothing preserves the channel mean when the size divides by the factor") {
  oracle::Random rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int factor = 1 << rng.integer(0, 3);
    const int w = factor * rng.integer(1, 5);
    const int h = factor * rng.integer(1, 5);
    const FeatureGrid g(2, w, h, rng.reals(2 * static_cast<std::size_t>(w) * h, -3, 3));
    const FeatureGrid s = gaussian_smooth(g, factor);
    for (int c = 0; c < 2; ++c) {
      double a = 0.0;
      double b = 0.0;
      for (double v : g.plane(c)) a += v;
      for (double v : s.plane(c)) b += v;
      REQUIRE(std::abs(a - b) / g.plane_size() <= 1e-10);
    }
  }
}

TEST_CASE("warp with zero flow is the identity") {
  oracle::Random rng(43);
  const FeatureGrid g = random_grid(rng);
  const FeatureGrid out = warp(g, FlowField::zero(g.width(), g.height()));
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(out[i] == g[i]);
}

TEST_CASE("warp keeps constants under any flow") {
  oracle::Random rng(44);
  const FeatureGrid g = FeatureGrid::filled(3, 9, 6, -1.5);
  const FeatureGrid out = warp(g, random_flow(rng, 9, 6, 20.0));
  for (double v : out.values()) REQUIRE(v == doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("integer flow shifts a ramp by one column with a clamped border") {
  const int w = 6;
  const int h = 3;
  std::vector<double> ramp(w * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) ramp[y * w + x] = 10.0 * x + y;
  }
  const FeatureGrid g(1, w, h, ramp);
  const FeatureGrid out =
      warp(g, FlowField(w, h, std::vector<double>(w * h, 1.0), std::vector<double>(w * h, 0.0)));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) CHECK(out(0, x, y) == g(0, std::min(x + 1, w - 1), y));
  }
}

TEST_CASE("warp matches a direct bilinear evaluation") {
  oracle::Random rng(45);
  const FeatureGrid g = random_grid(rng, 10);
  const FlowField flow = random_flow(rng, g.width(), g.height(), 3.0);
  const FeatureGrid out = warp(g, flow);
  const int w = g.width();
  const int h = g.height();
  for (int c = 0; c < g.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const double sx = std::clamp(x + flow.dx()[i], 0.0, w - 1.0);
        const double sy = std::clamp(y + flow.dy()[i], 0.0, h - 1.0);
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const int x1 = std::min(x0 + 1, w - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        const double fx = sx - x0;
        const double fy = sy - y0;
        const double expected = (1 - fy) * ((1 - fx) * g(c, x0, y0) + fx * g(c, x1, y0)) +
                                fy * ((1 - fx) * g(c, x0, y1) + fx * g(c, x1, y1));
        REQUIRE(out(c, x, y) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("warp rejects a flow of the wrong size") {
  CHECK_THROWS_AS(warp(FeatureGrid::filled(1, 3, 3, 0.0), FlowField::zero(3, 2)), ValidationError);
}

TEST_CASE("decouple with zero flow and factor 1 gives body == feature and zero edge") {
  oracle::Random rng(46);
  const FeatureGrid g = random_grid(rng);
  const DecoupledFeatures d = decouple(g, FlowField::zero(g.width(), g.height()), 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(d.body[i] == g[i]);
    REQUIRE(d.edge[i] == 0.0);
  }
}

TEST_CASE("body plus edge reconstructs the feature") {
  oracle::Random rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureGrid g = random_grid(rng);
    const int factor = 1 << rng.integer(0, 3);
    const DecoupledFeatures d =
        decouple(g, random_flow(rng, g.width(), g.height(), 4.0), factor);
    REQUIRE(d.body.same_shape(g));
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(std::abs(d.body[i] + d.edge[i] - g[i]) <= 1e-12);
  }
}

TEST_CASE("constant feature has zero edge") {
  oracle::Random rng(48);
  const FeatureGrid g = FeatureGrid::filled(2, 11, 9, 7.0);
  const DecoupledFeatures d = decouple(g, random_flow(rng, 11, 9, 5.0), 4);
  for (double v : d.edge.values()) REQUIRE(std::abs(v) <= 1e-12);
}

TEST_CASE("block-aligned step edge keeps its edge energy within 4 pixels") {
  const int w = 32;
  for (int step = 4; step < w; step += 4) {
    const FeatureGrid g = step_image(w, 3, step);
    const DecoupledFeatures d = decouple(g, FlowField::zero(w, 3), 4);
    double near = 0.0;
    for (int x = 0; x < w; ++x) {
      const double e = std::abs(d.edge(0, x, 1));
      if (distance_to_step(x, step) > 4) {
        REQUIRE(e < 1e-9);
      } else {
        near += e;
      }
    }
    CHECK(near > 0.0);
  }
}

TEST_CASE("any step edge keeps its edge energy within 1.5 factors") {
  // A step inside a pooling block mixes that block, and bilinear upsampling
  // reads each block from up to 1.5 blocks away.
  for (int factor : {2, 4, 8}) {
    const int w = 8 * factor;
    for (int step = 1; step < w; ++step) {
      const FeatureGrid g = step_image(w, 2, step);
      const DecoupledFeatures d = decouple(g, FlowField::zero(w, 2), factor);
      for (int x = 0; x < w; ++x) {
        if (2 * distance_to_step(x, step) > 3 * factor) REQUIRE(std::abs(d.edge(0, x, 0)) < 1e-9);
      }
    }
  }
}

TEST_CASE("edge_to_boundary_score") {
  CHECK(edge_to_boundary_score(FeatureGrid::filled(2, 3, 3, 0.0)).values()[4] == 0.0);
  const ScalarField single = edge_to_boundary_score(FeatureGrid(1, 2, 1, {-2.5, 1.0}));
  CHECK(single[0] == 2.5);
  CHECK(single[1] == 1.0);
  const ScalarField pair = edge_to_boundary_score(FeatureGrid(2, 1, 1, {3.0, 4.0}));
  CHECK(pair[0] == 5.0);
}
