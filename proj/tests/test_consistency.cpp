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

#include <algorithm>
#include <vector>

#include "oracles.hpp"
#include "shapeseg/consistency.hpp"
#include "shapeseg/errors.hpp"
#include "shapeseg/eval.hpp"

using namespace shapeseg;

namespace {

ComponentPatch patch(int s, std::vector<std::uint8_t> bits, std::string id = "p") {
  return ComponentPatch{std::move(id), BoundingBox{0, 0, s - 1, s - 1},
                        BinaryMask(s, s, std::move(bits))};
}

std::vector<std::uint8_t> bits_of(const BinaryMask& m) {
  return {m.bits().begin(), m.bits().end()};
}

}  // namespace

TEST_CASE("iou examples") {
  const BinaryMask a(3, 1, {1, 1, 0});
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, BinaryMask(3, 1, {0, 0, 1})) == 0.0);
  CHECK(iou(a, BinaryMask(3, 1, {0, 1, 1})) == 1.0 / 3.0);
  CHECK(iou(BinaryMask::zeros(2, 2), BinaryMask::zeros(2, 2)) == 1.0);
  CHECK_THROWS_AS(iou(a, BinaryMask::zeros(1, 3)), ValidationError);
}

TEST_CASE("mean_iou examples") {
  const LabelMap gt = make_label_map(2, 2, {0, 0, 1, 1}, 2);
  CHECK(mean_iou(gt, gt).mean == 1.0);
  CHECK(mean_iou(make_label_map(2, 2, {1, 1, 0, 0}, 2), gt).mean == 0.0);

  // One background pixel predicted as foreground:
  // class 0: intersection 1, union 2; class 1: intersection 2, union 3.
  const MeanIoU r = mean_iou(make_label_map(2, 2, {0, 1, 1, 1}, 2), gt);
  CHECK(*r.per_class[0] == 0.5);
  CHECK(*r.per_class[1] == 2.0 / 3.0);
  CHECK(r.mean == doctest::Approx((0.5 + 2.0 / 3.0) / 2).epsilon(1e-15));
}

TEST_CASE("mean_iou excludes classes absent from both maps") {
  const LabelMap gt = make_label_map(2, 1, {0, 2}, 3);
  const MeanIoU r = mean_iou(gt, gt);
  CHECK_FALSE(r.per_class[1].has_value());
  CHECK(r.mean == 1.0);
  CHECK_THROWS_AS(mean_iou(make_label_map(2, 1, {0, 1}, 2), gt), ValidationError);
  CHECK_THROWS_AS(mean_iou(make_label_map(1, 2, {0, 1}, 3), gt), ValidationError);
}

TEST_CASE("a 2x2 target block becomes an all-ones patch") {
  std::vector<ClassId> ids(36, 0);
  for (int y = 2; y < 4; ++y) {
    for (int x = 1; x < 3; ++x) ids[y * 6 + x] = 1;
  }
  const auto p = extract_component_patch(LabelMap(6, 6, ids, 2), 1, 8);
  REQUIRE(p.has_value());
  CHECK(p->mask.count() == 64);
  CHECK(p->bbox == BoundingBox{1, 2, 2, 3});
}

TEST_CASE("missing target class gives no patch") {
  CHECK_FALSE(extract_component_patch(LabelMap(3, 3, std::vector<ClassId>(9, 0), 3), 2, 4));
  CHECK_THROWS_AS(extract_component_patch(LabelMap(3, 3, std::vector<ClassId>(9, 0), 3), 3, 4),
                  ValidationError);
}

TEST_CASE("the largest component is selected") {
  // A 5-pixel plus on the left and a 3x3 block on the right.
  std::vector<ClassId> ids(10 * 5, 0);
  const auto set = [&](int x, int y) { ids[y * 10 + x] = 1; };
  set(2, 1), set(1, 2), set(2, 2), set(3, 2), set(2, 3);
  for (int y = 1; y < 4; ++y) {
    for (int x = 6; x < 9; ++x) set(x, y);
  }
  const auto p = extract_component_patch(LabelMap(10, 5, ids, 2), 1, 6);
  REQUIRE(p.has_value());
  CHECK(p->bbox == BoundingBox{6, 1, 8, 3});
  CHECK(p->mask.count() == 36);
}

TEST_CASE("equal-size components resolve to the first in raster order") {
  std::vector<ClassId> ids(7 * 3, 0);
  ids[1 * 7 + 5] = 1;
  ids[1 * 7 + 1] = 1;
  const auto p = extract_component_patch(LabelMap(7, 3, ids, 2), 1, 2);
  REQUIRE(p.has_value());
  CHECK(p->bbox == BoundingBox{1, 1, 1, 1});
}

TEST_CASE("diagonal pixels are separate components under 4-connectivity") {
  std::vector<ClassId> ids = {1, 0, 0, 1};
  const auto p = extract_component_patch(LabelMap(2, 2, ids, 2), 1, 3);
  REQUIRE(p.has_value());
  CHECK(p->bbox == BoundingBox{0, 0, 0, 0});
}

TEST_CASE("average_mask on the two-patch example") {
  const std::vector<ComponentPatch> ps = {patch(2, {1, 1, 0, 0}), patch(2, {1, 0, 1, 0})};
  const AverageMask avg = average_mask(ps);
  CHECK(avg.pixel_count == 2);
  CHECK(avg.votes == std::vector<std::uint32_t>{2, 1, 1, 0});
  CHECK(bits_of(avg.mask) == std::vector<std::uint8_t>{1, 1, 0, 0});
}

TEST_CASE("average_mask of identical or single patches is the patch") {
  const ComponentPatch p = patch(3, {0, 1, 0, 1, 1, 1, 0, 1, 0});
  CHECK(average_mask({p}).mask == p.mask);
  const AverageMask avg = average_mask({p, p, p});
  CHECK(avg.mask == p.mask);
  CHECK(avg.pixel_count == 5);
  CHECK_THROWS_AS(average_mask({}), ValidationError);
}

TEST_CASE("cmse on the two-patch example is 2/9") {
  const ConsistencyReport r = cmse({patch(2, {1, 1, 0, 0}), patch(2, {1, 0, 1, 0})});
  CHECK(r.per_patch_iou == std::vector<double>{1.0, 1.0 / 3.0});
  CHECK(r.cmse == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("cmse of identical patches is zero") {
  const ComponentPatch p = patch(2, {1, 0, 1, 1});
  CHECK(cmse({p, p, p}).cmse == 0.0);
  CHECK_THROWS_AS(cmse({p}), ValidationError);
}

TEST_CASE("cmse matches the sort-based oracle and ignores patch order") {
  oracle::Random rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    const int s = rng.integer(1, 4);
    const int n = rng.integer(2, 6);
    std::vector<ComponentPatch> ps;
    std::vector<std::vector<std::uint8_t>> raw;
    for (int i = 0; i < n; ++i) {
      BinaryMask m = rng.mask(s, s, rng.real(0.2, 0.8));
      if (m.count() == 0) m = BinaryMask(s, s, std::vector<std::uint8_t>(s * s, 1));
      raw.push_back(bits_of(m));
      ps.push_back(patch(s, raw.back(), std::to_string(i)));
    }
    const ConsistencyReport r = cmse(ps);
    const oracle::BruteCmse b = oracle::brute_cmse(raw);
    REQUIRE(r.mean_pixel_count == b.n);
    REQUIRE(bits_of(r.average_mask) == b.average);
    REQUIRE(r.per_patch_iou == b.ious);
    REQUIRE(r.cmse == b.cmse);
    REQUIRE((r.cmse == 0.0) ==
            std::all_of(raw.begin(), raw.end(), [&](const auto& v) { return v == b.average; }));

    std::vector<ComponentPatch> reversed(ps.rbegin(), ps.rend());
    const ConsistencyReport rr = cmse(reversed);
    REQUIRE(rr.cmse == r.cmse);
    REQUIRE(rr.average_mask == r.average_mask);
  }
}

TEST_CASE("evaluate_consistency skips images without the component") {
  std::vector<ClassId> ids(16, 0);
  ids[5] = ids[6] = 1;
  const LabelMap with(4, 4, ids, 2);
  const LabelMap without(4, 4, std::vector<ClassId>(16, 0), 2);
  const ConsistencyReport r =
      evaluate_consistency({{"a", with}, {"b", without}, {"c", with}}, 1, 8);
  CHECK(r.patch_count == 2);
  CHECK(r.cmse == 0.0);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].id == "b");
  CHECK(r.skipped[0].reason == "target class absent");
  CHECK_THROWS_AS(evaluate_consistency({{"a", with}, {"b", without}}, 1, 8), ValidationError);
}
