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

// Raster files and manifests.
//
// Label maps are stored as 8-bit grayscale PNG (or binary PGM) with the class
// id as the gray value. Scalar fields are stored as 16-bit grayscale PNG with
// the affine quantization q = round((v - min) / (max - min) * 65535); min and
// max are written to a sidecar text file "<path>.range". Readers detect the
// format from the file signature, not the extension.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shapeseg/grid.hpp"

namespace shapeseg {

// Decodes an 8-bit single-channel PNG or PGM (P2/P5, maxval <= 255).
// num_classes defaults to max id + 1. Throws IoError for unreadable or
// unsupported files, ValidationError when an id exceeds num_classes.
LabelMap read_label_map(const std::filesystem::path& path,
                        std::optional<int> num_classes = std::nullopt);

// Writes an 8-bit grayscale PNG, or binary PGM when the extension is .pgm.
void write_label_map(const LabelMap& map, const std::filesystem::path& path);

void write_binary_mask(const BinaryMask& mask, const std::filesystem::path& path);

void write_scalar_field(const ScalarField& field, const std::filesystem::path& path);

// Dequantizes a 16-bit PNG using its sidecar. Without a sidecar, an 8- or
// 16-bit grayscale image is read with its raw gray values.
ScalarField read_scalar_field(const std::filesystem::path& path);

std::filesystem::path range_sidecar(const std::filesystem::path& path);

// Tab-separated manifest:
//
//   #shapeseg-manifest<TAB>1
//   #num_classes<TAB>3
//   #target_class<TAB>2
//   #seed<TAB>7                     (optional)
//   id<TAB>prediction<TAB>ground_truth
//   scene_000<TAB>pred/scene_000.png<TAB>gt/scene_000.png
//
// Relative paths are resolved against the manifest's directory.
struct ManifestEntry {
  std::string id;
  std::filesystem::path prediction;
  std::filesystem::path ground_truth;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  int num_classes = 0;
  ClassId target_class = 0;
  std::optional<std::uint64_t> seed;
};

// Throws IoError when unreadable, ValidationError on malformed content,
// duplicate ids or a path used by two entries.
Manifest read_manifest(const std::filesystem::path& path);
// Absolute entry paths are written relative to the manifest's directory.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace shapeseg
