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
#include <string>
#include <vector>

#include "oracles.hpp"
#include "shapeseg/errors.hpp"
#include "shapeseg/io.hpp"
#include "temp_dir.hpp"

using namespace shapeseg;
using testing::TempDir;

namespace {

const unsigned char kRgbPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00, 0x00, 0x90,
    0x77, 0x53, 0xde, 0x00, 0x00, 0x00, 0x0c, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x10,
    0x50, 0x30, 0x00, 0x00, 0x00, 0xa4, 0x00, 0x61, 0x34, 0x66, 0x7d, 0x72, 0x00, 0x00, 0x00,
    0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

}  // namespace

TEST_CASE("binary PGM decodes to a label map") {
  TempDir dir;
  testing::write_bytes(dir / "m.pgm", std::string("P5\n2 2\n255\n") + std::string("\0\1\1\2", 4));
  const LabelMap m = read_label_map(dir / "m.pgm");
  CHECK(m.width() == 2);
  CHECK(m.num_classes() == 3);
  CHECK(std::vector<ClassId>(m.ids().begin(), m.ids().end()) == std::vector<ClassId>{0, 1, 1, 2});
}

TEST_CASE("ASCII PGM with comments decodes") {
  TempDir dir;
  testing::write_bytes(dir / "a.pgm", "P2\n# a comment\n3 1\n# another\n7\n0 5 2\n");
  const LabelMap m = read_label_map(dir / "a.pgm");
  CHECK(m.num_classes() == 6);
  CHECK(m(1, 0) == 5);
}

TEST_CASE("declared class count is enforced") {
  TempDir dir;
  testing::write_bytes(dir / "m.pgm", std::string("P5\n2 1\n255\n") + std::string("\0\3", 2));
  CHECK(read_label_map(dir / "m.pgm", 5).num_classes() == 5);
  CHECK_THROWS_AS(read_label_map(dir / "m.pgm", 3), ValidationError);
}

TEST_CASE("RGB PNG is rejected as multi-channel") {
  TempDir dir;
  testing::write_bytes(dir / "rgb.png",
                       std::string(reinterpret_cast<const char*>(kRgbPng), sizeof(kRgbPng)));
  CHECK_THROWS_AS(read_label_map(dir / "rgb.png"), IoError);
}

TEST_CASE("truncated and unknown files are I/O errors naming the path") {
  TempDir dir;
  testing::write_bytes(dir / "bad.png", "\x89PNG\r\n\x1a\n");
  testing::write_bytes(dir / "junk.bin", "hello");
  testing::write_bytes(dir / "short.pgm", "P5\n4 4\n255\nab");
  CHECK_THROWS_AS(read_label_map(dir / "bad.png"), IoError);
  CHECK_THROWS_AS(read_label_map(dir / "junk.bin"), IoError);
  CHECK_THROWS_AS(read_label_map(dir / "short.pgm"), IoError);
  try {
    read_label_map(dir / "missing.png");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(e.path().find("missing.png") != std::string::npos);
  }
}

TEST_CASE("label maps round-trip through PNG and PGM") {
  TempDir dir;
  oracle::Random rng(61);
  for (const char* name : {"m.png", "m.pgm"}) {
    const LabelMap m = rng.label_map(37, 19, 5);
    write_label_map(m, dir / name);
    const LabelMap back = read_label_map(dir / name, 5);
    CHECK(map_equal(m, back));
  }
}

TEST_CASE("label maps with more than 256 classes cannot be written") {
  TempDir dir;
  CHECK_THROWS_AS(write_label_map(LabelMap(1, 1, {300}, 301), dir / "x.png"), ValidationError);
}

TEST_CASE("binary masks are written as 0/1 label images") {
  TempDir dir;
  const BinaryMask mask(3, 1, {1, 0, 1});
  write_binary_mask(mask, dir / "mask.png");
  const LabelMap back = read_label_map(dir / "mask.png", 2);
  CHECK(back(0, 0) == 1);
  CHECK(back(1, 0) == 0);
}

TEST_CASE("scalar fields round-trip within one quantization step") {
  TempDir dir;
  oracle::Random rng(62);
  const ScalarField f(23, 11, rng.reals(23 * 11, -3.5, 9.25));
  write_scalar_field(f, dir / "f.png");
  CHECK(std::filesystem::exists(range_sidecar(dir / "f.png")));
  const ScalarField back = read_scalar_field(dir / "f.png");
  double lo = f[0];
  double hi = f[0];
  for (double v : f.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double step = (hi - lo) / 65535.0;
  for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(std::abs(back[i] - f[i]) <= step);
}

TEST_CASE("constant scalar fields round-trip exactly") {
  TempDir dir;
  write_scalar_field(ScalarField::filled(4, 4, 2.5), dir / "c.png");
  const ScalarField back = read_scalar_field(dir / "c.png");
  for (double v : back.values()) CHECK(v == 2.5);
}

TEST_CASE("writing to an unwritable path is an I/O error naming the path") {
  const std::string path = "/nonexistent_shapeseg_dir/out.png";
  try {
    write_label_map(LabelMap(1, 1, {0}, 1), path);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(e.path() == path);
  }
}

TEST_CASE("manifests round-trip with relative paths") {
  TempDir dir;
  Manifest m;
  m.num_classes = 3;
  m.target_class = 2;
  m.seed = 18446744073709551615ull;
  m.entries = {{"a", dir / "pred/a.png", dir / "gt/a.png"},
               {"b", dir / "pred/b.png", dir / "gt/b.png"}};
  write_manifest(m, dir / "manifest.tsv");
  const std::string text = testing::read_bytes(dir / "manifest.tsv");
  CHECK(text.find("pred/a.png") != std::string::npos);
  CHECK(text.find(dir.path().string()) == std::string::npos);

  const Manifest back = read_manifest(dir / "manifest.tsv");
  CHECK(back.num_classes == 3);
  CHECK(back.target_class == 2);
  CHECK(back.seed == m.seed);
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[1].id == "b");
  CHECK(std::filesystem::weakly_canonical(back.entries[1].prediction) ==
        std::filesystem::weakly_canonical(dir / "pred/b.png"));
}

TEST_CASE("malformed manifests are validation errors") {
  TempDir dir;
  const std::string header = "#shapeseg-manifest\t1\n#num_classes\t3\n#target_class\t2\n";
  const std::string columns = "id\tprediction\tground_truth\n";
  testing::write_bytes(dir / "dup.tsv", header + columns + "a\tp1\tg1\na\tp2\tg2\n");
  testing::write_bytes(dir / "samepath.tsv", header + columns + "a\tp1\tg1\nb\tp1\tg2\n");
  testing::write_bytes(dir / "cols.tsv", header + columns + "a\tp1\n");
  testing::write_bytes(dir / "magic.tsv", "#other\t1\n" + columns);
  testing::write_bytes(dir / "target.tsv",
                       "#shapeseg-manifest\t1\n#num_classes\t3\n#target_class\t3\n" + columns);
  for (const char* name : {"dup.tsv", "samepath.tsv", "cols.tsv", "magic.tsv", "target.tsv"}) {
    CAPTURE(name);
    CHECK_THROWS_AS(read_manifest(dir / name), ValidationError);
  }
  CHECK_THROWS_AS(read_manifest(dir / "absent.tsv"), IoError);
}
