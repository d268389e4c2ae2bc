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

#include <limits>
#include <vector>

#include "shapeseg/errors.hpp"
#include "shapeseg/grid.hpp"

using namespace shapeseg;

TEST_CASE("make_label_map accepts a valid 1x3 map") {
  const LabelMap m = make_label_map(1, 3, {0, 1, 0}, 2);
  CHECK(m.width() == 1);
  CHECK(m.height() == 3);
  CHECK(m.num_classes() == 2);
  CHECK(m(0, 1) == 1);
}

TEST_CASE("make_label_map rejects an id out of range") {
  CHECK_THROWS_AS(make_label_map(2, 2, {0, 1, 2, 1}, 2), ValidationError);
}

TEST_CASE("make_label_map rejects a length mismatch") {
  CHECK_THROWS_AS(make_label_map(2, 2, {0, 1, 1}, 2), ValidationError);
}

TEST_CASE("label maps reject negative ids and bad dimensions") {
  CHECK_THROWS_AS(make_label_map(1, 1, {-1}, 2), ValidationError);
  CHECK_THROWS_AS(make_label_map(0, 1, {}, 2), ValidationError);
  CHECK_THROWS_AS(make_label_map(1, 1, {0}, 0), ValidationError);
}

TEST_CASE("map_equal") {
  const LabelMap a = make_label_map(2, 2, {0, 1, 1, 0}, 2);
  CHECK(map_equal(a, a));
  CHECK_FALSE(map_equal(a, make_label_map(2, 2, {0, 1, 1, 1}, 2)));
  CHECK_FALSE(map_equal(a, make_label_map(4, 1, {0, 1, 1, 0}, 2)));
  CHECK_FALSE(map_equal(a, make_label_map(2, 2, {0, 1, 1, 0}, 3)));
}

TEST_CASE("pixel_accuracy") {
  const LabelMap a = make_label_map(2, 2, {0, 1, 1, 0}, 2);
  CHECK(pixel_accuracy(a, a) == 1.0);
  CHECK(pixel_accuracy(make_label_map(2, 2, {1, 0, 0, 1}, 2), a) == 0.0);
  CHECK(pixel_accuracy(make_label_map(2, 2, {0, 1, 1, 1}, 2), a) == 0.75);
  CHECK_THROWS_AS(pixel_accuracy(make_label_map(1, 4, {0, 1, 1, 0}, 2), a), ValidationError);
}

TEST_CASE("raster types validate their invariants") {
  CHECK_THROWS_AS(BinaryMask(2, 2, {0, 1}), ValidationError);
  CHECK_THROWS_AS(ScalarField(1, 1, {std::numeric_limits<double>::infinity()}), ValidationError);
  CHECK_THROWS_AS(ScalarField(1, 1, {std::numeric_limits<double>::quiet_NaN()}), ValidationError);
  CHECK_THROWS_AS(FeatureGrid(2, 2, 2, std::vector<double>(7, 0.0)), ValidationError);
  CHECK_THROWS_AS(FlowField(1, 1, {0.0}, {}), ValidationError);
  CHECK(BinaryMask(2, 1, {0, 1}).count() == 1);
  CHECK(BinaryMask(3, 1, {0, 2, 255}).bits()[2] == 1);
  CHECK(BinaryMask(3, 1, {0, 2, 255}).count() == 2);
}

TEST_CASE("FeatureGrid is channel-major") {
  const FeatureGrid g(2, 2, 1, {1, 2, 3, 4});
  CHECK(g(0, 1, 0) == 2);
  CHECK(g(1, 0, 0) == 3);
  CHECK(g.channel(1).values()[1] == 4);
  CHECK(FeatureGrid::from_field(g.channel(0)).values().size() == 2);
}
