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

#include "shapeseg/eval.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include "shapeseg/errors.hpp"

namespace shapeseg {
namespace {

using Json = nlohmann::ordered_json;

Json iou_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ConsistencyReport evaluate_consistency(const std::vector<NamedLabelMap>& maps,
                                       ClassId target_class, int patch_size) {
  std::vector<ComponentPatch> patches;
  std::vector<SkippedImage> skipped;
  for (const auto& [id, map] : maps) {
    auto patch = extract_component_patch(map, target_class, patch_size, id);
    if (patch) {
      patches.push_back(std::move(*patch));
      continue;
    }
    const bool present =
        std::find(map.ids().begin(), map.ids().end(), target_class) != map.ids().end();
    skipped.push_back({id, present ? "component vanished after resize"
                                   : "target class absent"});
  }
  if (patches.size() < 2) {
    throw ValidationError("consistency: need at least 2 images containing class " +
                          std::to_string(target_class) + ", found " +
                          std::to_string(patches.size()));
  }
  ConsistencyReport report = cmse(patches);
  report.skipped = std::move(skipped);
  return report;
}

EvalReport evaluate_manifest(const Manifest& manifest, const EvalOptions& options) {
  EvalReport report;
  report.num_classes = manifest.num_classes;
  report.target_class = options.target_class.value_or(manifest.target_class);
  report.patch_size = options.patch_size;
  report.seed = manifest.seed;
  if (report.target_class < 0 || report.target_class >= manifest.num_classes) {
    throw ValidationError("--target-class " + std::to_string(report.target_class) +
                          " out of range for " + std::to_string(manifest.num_classes) +
                          " classes");
  }
  if (options.patch_size < 1) throw ValidationError("--patch-size must be positive");

  std::vector<NamedLabelMap> predictions;
  for (const auto& entry : manifest.entries) {
    LabelMap pred = read_label_map(entry.prediction, manifest.num_classes);
    LabelMap gt = read_label_map(entry.ground_truth, manifest.num_classes);
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
      throw ValidationError(entry.id + ": prediction and ground truth differ in size");
    }
    ImageEval image;
    image.id = entry.id;
    image.pixels = gt.size();
    image.overlap = class_overlap(pred, gt);
    for (std::size_t i = 0; i < gt.size(); ++i) image.correct += pred[i] == gt[i];
    report.images.push_back(std::move(image));
    predictions.push_back({entry.id, std::move(pred)});
  }

  try {
    report.consistency =
        evaluate_consistency(predictions, report.target_class, options.patch_size);
  } catch (const ValidationError& e) {
    report.consistency_error = e.what();
  }
  return report;
}

Json report_to_json(const EvalReport& report, const EvalOptions& options) {
  Json root;
  root["tool"] = kToolName;
  root["version"] = kToolVersion;
  if (!options.deterministic) root["generated_at"] = utc_timestamp();
  root["config"] = {{"manifest", options.manifest_name},
                    {"num_classes", report.num_classes},
                    {"target_class", report.target_class},
                    {"patch_size", report.patch_size}};
  root["seed"] = report.seed ? Json(*report.seed) : Json(nullptr);

  ClassOverlap total{std::vector<std::uint64_t>(report.num_classes, 0),
                     std::vector<std::uint64_t>(report.num_classes, 0)};
  std::uint64_t pixels = 0;
  std::uint64_t correct = 0;
  Json images = Json::array();
  for (const auto& image : report.images) {
    const MeanIoU miou = mean_iou(image.overlap);
    Json classes = Json::array();
    for (int c = 0; c < report.num_classes; ++c) {
      classes.push_back({{"class", c},
                         {"intersection", image.overlap.intersection[c]},
                         {"union", image.overlap.union_[c]},
                         {"iou", iou_or_null(miou.per_class[c])}});
      total.intersection[c] += image.overlap.intersection[c];
      total.union_[c] += image.overlap.union_[c];
    }
    images.push_back({{"id", image.id},
                      {"pixels", image.pixels},
                      {"correct", image.correct},
                      {"pixel_accuracy", image.pixel_accuracy()},
                      {"miou", miou.mean},
                      {"per_class", std::move(classes)}});
    pixels += image.pixels;
    correct += image.correct;
  }
  root["images"] = std::move(images);

  const MeanIoU aggregate = mean_iou(total);
  Json per_class = Json::array();
  for (const auto& v : aggregate.per_class) per_class.push_back(iou_or_null(v));
  root["aggregate"] = {
      {"image_count", report.images.size()},
      {"pixel_accuracy",
       pixels == 0 ? Json(nullptr)
                   : Json(static_cast<double>(correct) / static_cast<double>(pixels))},
      {"miou", report.images.empty() ? Json(nullptr) : Json(aggregate.mean)},
      {"per_class_iou", std::move(per_class)}};

  if (report.consistency) {
    const auto& c = *report.consistency;
    Json patches = Json::array();
    for (std::size_t k = 0; k < c.patch_count; ++k) {
      patches.push_back({{"id", c.patch_ids[k]}, {"iou", c.per_patch_iou[k]}});
    }
    Json skipped = Json::array();
    for (const auto& s : c.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
    root["consistency"] = {{"target_class", report.target_class},
                           {"patch_size", report.patch_size},
                           {"patch_count", c.patch_count},
                           {"mean_pixel_count", c.mean_pixel_count},
                           {"cmse", c.cmse},
                           {"patches", std::move(patches)},
                           {"skipped", std::move(skipped)}};
  } else {
    root["consistency"] = nullptr;
    root["consistency_error"] = report.consistency_error;
  }
  return root;
}

}  // namespace shapeseg
