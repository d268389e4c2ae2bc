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

// Batch evaluation of a manifest into a JSON report.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shapeseg/consistency.hpp"
#include "shapeseg/io.hpp"

namespace shapeseg {

inline constexpr const char* kToolName = "shapeseg";
inline constexpr const char* kToolVersion = "0.1.0";

struct NamedLabelMap {
  std::string id;
  LabelMap map;
};

// Extracts a patch from every map in order, skipping (and recording) maps
// where the component is missing, then scores the patches. Throws
// ValidationError if fewer than two patches remain.
ConsistencyReport evaluate_consistency(const std::vector<NamedLabelMap>& maps,
                                       ClassId target_class,
                                       int patch_size = kDefaultPatchSize);

struct ImageEval {
  std::string id;
  std::uint64_t pixels = 0;
  std::uint64_t correct = 0;
  ClassOverlap overlap;

  double pixel_accuracy() const {
    return static_cast<double>(correct) / static_cast<double>(pixels);
  }
};

struct EvalOptions {
  std::optional<ClassId> target_class;  // overrides the manifest
  int patch_size = kDefaultPatchSize;
  bool deterministic = false;           // omit the timestamp
  std::string manifest_name;            // echoed in the report
};

struct EvalReport {
  int num_classes = 0;
  ClassId target_class = 0;
  int patch_size = kDefaultPatchSize;
  std::optional<std::uint64_t> seed;
  std::vector<ImageEval> images;
  std::optional<ConsistencyReport> consistency;
  std::string consistency_error;  // set when consistency is empty
};

// Images are processed in manifest order. Throws IoError for unreadable
// files and ValidationError for maps that disagree in size or class count.
EvalReport evaluate_manifest(const Manifest& manifest, const EvalOptions& options);

// Aggregates are recomputed from the per-image entries: pixel accuracy from
// summed correct/pixel counts, mIoU from summed per-class intersections and
// unions.
nlohmann::ordered_json report_to_json(const EvalReport& report, const EvalOptions& options);

}  // namespace shapeseg
