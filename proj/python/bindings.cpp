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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shapeseg/cli.hpp"
#include "shapeseg/consistency.hpp"
#include "shapeseg/decouple.hpp"
#include "shapeseg/errors.hpp"
#include "shapeseg/geometry.hpp"
#include "shapeseg/grid.hpp"
#include "shapeseg/losses.hpp"
#include "shapeseg/synth.hpp"

namespace py = pybind11;
using namespace shapeseg;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

void require_ndim(const py::buffer_info& info, int ndim, const char* what) {
  if (info.ndim != ndim) {
    throw ValidationError(std::string(what) + " must be a " + std::to_string(ndim) +
                          "-d array");
  }
}

LabelMap to_labels(const CArray<std::int32_t>& a, std::optional<int> num_classes) {
  const auto info = a.request();
  require_ndim(info, 2, "label map");
  const auto* data = static_cast<const std::int32_t*>(info.ptr);
  std::vector<ClassId> ids(data, data + info.size);
  const int classes =
      num_classes.value_or(ids.empty() ? 1 : *std::max_element(ids.begin(), ids.end()) + 1);
  return LabelMap(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]),
                  std::move(ids), classes);
}

BinaryMask to_mask(const CArray<std::uint8_t>& a) {
  const auto info = a.request();
  require_ndim(info, 2, "mask");
  const auto* data = static_cast<const std::uint8_t*>(info.ptr);
  return BinaryMask(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]),
                    std::vector<std::uint8_t>(data, data + info.size));
}

ScalarField to_field(const CArray<double>& a) {
  const auto info = a.request();
  require_ndim(info, 2, "field");
  const auto* data = static_cast<const double*>(info.ptr);
  return ScalarField(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]),
                     std::vector<double>(data, data + info.size));
}

FeatureGrid to_grid(const CArray<double>& a) {
  const auto info = a.request();
  require_ndim(info, 3, "feature grid (C, H, W)");
  const auto* data = static_cast<const double*>(info.ptr);
  return FeatureGrid(static_cast<int>(info.shape[0]), static_cast<int>(info.shape[2]),
                     static_cast<int>(info.shape[1]),
                     std::vector<double>(data, data + info.size));
}

template <typename T>
py::array_t<T> from_span(std::span<const T> values, std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<double> from_field(const ScalarField& f) {
  return from_span<double>(f.values(), {f.height(), f.width()});
}

py::array_t<double> from_grid(const FeatureGrid& g) {
  return from_span<double>(g.values(), {g.channels(), g.height(), g.width()});
}

py::array_t<std::uint8_t> from_mask(const BinaryMask& m) {
  return from_span<std::uint8_t>(m.bits(), {m.height(), m.width()});
}

py::array_t<std::int32_t> from_labels(const LabelMap& m) {
  return from_span<std::int32_t>(m.ids(), {m.height(), m.width()});
}

std::optional<BinaryMask> optional_mask(const std::optional<CArray<std::uint8_t>>& a) {
  if (!a) return std::nullopt;
  return to_mask(*a);
}

py::tuple loss_tuple(const LossResult& r) { return py::make_tuple(r.value, from_grid(r.grad)); }

TargetMode make_mode(const std::string& mode, std::uint64_t seed, double tau) {
  if (mode == "soft") return SoftTargets{};
  if (mode == "sampled") return SampledTargets{seed};
  if (mode == "threshold") return ThresholdTargets{tau};
  throw ValidationError("mode must be soft, sampled or threshold");
}

ComponentPatch patch_from_mask(const CArray<std::uint8_t>& a, std::size_t index) {
  BinaryMask mask = to_mask(a);
  BoundingBox box{0, 0, mask.width() - 1, mask.height() - 1};
  return ComponentPatch{"patch_" + std::to_string(index), box, std::move(mask)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boundary-aware segmentation supervision and consistency metrics";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.attr("__version__") = "0.1.0";

  // Label maps and distances
  m.def("pixel_accuracy",
        [](const CArray<std::int32_t>& pred, const CArray<std::int32_t>& gt) {
          const LabelMap g = to_labels(gt, std::nullopt);
          const LabelMap p = to_labels(pred, std::nullopt);
          return pixel_accuracy(p, g);
        },
        py::arg("pred"), py::arg("gt"));

  m.def("distance_to_other_class",
        [](const CArray<std::int32_t>& labels, std::optional<int> num_classes) {
          const DistanceField d = distance_to_other_class(to_labels(labels, num_classes));
          return py::make_tuple(from_field(d.field()), d.has_boundary());
        },
        py::arg("labels"), py::arg("num_classes") = py::none(),
        "Returns (distance, has_boundary).");

  m.def("vbd_probability",
        [](const CArray<std::int32_t>& labels, std::optional<int> num_classes) {
          return from_field(
              vbd_probability(distance_to_other_class(to_labels(labels, num_classes))));
        },
        py::arg("labels"), py::arg("num_classes") = py::none());

  m.def("boundary_mask_dt",
        [](const CArray<std::int32_t>& labels, int dt) {
          return from_mask(boundary_mask_dt(to_labels(labels, std::nullopt), dt));
        },
        py::arg("labels"), py::arg("dt"));

  m.def("boundary_targets",
        [](const CArray<std::int32_t>& labels, const std::string& mode, std::uint64_t seed,
           double tau) {
          const BoundaryTargets t =
              make_boundary_targets(to_labels(labels, std::nullopt), make_mode(mode, seed, tau));
          py::dict out;
          out["boundary_target"] = from_field(t.boundary_target);
          out["weight_map"] = from_field(t.weight_map);
          out["body_ignore"] = from_mask(t.body_ignore);
          return out;
        },
        py::arg("labels"), py::arg("mode") = "sampled", py::arg("seed") = 0,
        py::arg("tau") = 0.5);

  m.def("balance_weights",
        [](const CArray<std::uint8_t>& positives) {
          return from_field(balance_weights(to_mask(positives)));
        },
        py::arg("positives"));

  // Losses: each returns (value, grad)
  m.def("weighted_bce",
        [](const CArray<double>& scores, const CArray<double>& target,
           const CArray<double>& weights) {
          const LossResult r = weighted_bce(to_field(scores), to_field(target), to_field(weights));
          return py::make_tuple(r.value, from_field(r.grad.channel(0)));
        },
        py::arg("scores"), py::arg("target"), py::arg("weights"));

  m.def("cross_entropy",
        [](const CArray<double>& scores, const CArray<std::int32_t>& gt,
           const std::optional<CArray<std::uint8_t>>& ignore) {
          const FeatureGrid s = to_grid(scores);
          return loss_tuple(cross_entropy(s, to_labels(gt, s.channels()), optional_mask(ignore)));
        },
        py::arg("scores"), py::arg("gt"), py::arg("ignore") = py::none());

  m.def("dice_loss",
        [](const CArray<double>& scores, const CArray<std::int32_t>& gt,
           const std::optional<CArray<std::uint8_t>>& ignore, double smooth) {
          const FeatureGrid s = to_grid(scores);
          return loss_tuple(
              dice_loss(s, to_labels(gt, s.channels()), optional_mask(ignore), smooth));
        },
        py::arg("scores"), py::arg("gt"), py::arg("ignore") = py::none(),
        py::arg("smooth") = kDefaultDiceSmooth);

  m.def("focal_loss",
        [](const CArray<double>& scores, const CArray<std::int32_t>& gt, double gamma) {
          const FeatureGrid s = to_grid(scores);
          return loss_tuple(focal_loss(s, to_labels(gt, s.channels()), gamma));
        },
        py::arg("scores"), py::arg("gt"), py::arg("gamma") = kDefaultFocalGamma);

  m.def("body_loss",
        [](const CArray<double>& scores, const CArray<std::int32_t>& gt,
           const std::optional<CArray<std::uint8_t>>& body_ignore, double lam) {
          const FeatureGrid s = to_grid(scores);
          return loss_tuple(
              body_loss(s, to_labels(gt, s.channels()), optional_mask(body_ignore), lam));
        },
        py::arg("scores"), py::arg("gt"), py::arg("body_ignore") = py::none(),
        py::arg("lam") = 0.5);

  // Decoupling
  m.def("gaussian_smooth",
        [](const CArray<double>& feature, int factor) {
          return from_grid(gaussian_smooth(to_grid(feature), factor));
        },
        py::arg("feature"), py::arg("factor") = kDefaultSmoothFactor);

  m.def("warp",
        [](const CArray<double>& feature, const CArray<double>& dx, const CArray<double>& dy) {
          const ScalarField fx = to_field(dx);
          const ScalarField fy = to_field(dy);
          FlowField flow(fx.width(), fx.height(),
                         std::vector<double>(fx.values().begin(), fx.values().end()),
                         std::vector<double>(fy.values().begin(), fy.values().end()));
          return from_grid(warp(to_grid(feature), flow));
        },
        py::arg("feature"), py::arg("dx"), py::arg("dy"));

  m.def("decouple",
        [](const CArray<double>& feature, const std::optional<CArray<double>>& dx,
           const std::optional<CArray<double>>& dy, int factor) {
          const FeatureGrid f = to_grid(feature);
          if (dx.has_value() != dy.has_value()) {
            throw ValidationError("dx and dy must be given together");
          }
          FlowField flow = FlowField::zero(f.width(), f.height());
          if (dx) {
            const ScalarField fx = to_field(*dx);
            const ScalarField fy = to_field(*dy);
            flow = FlowField(fx.width(), fx.height(),
                             std::vector<double>(fx.values().begin(), fx.values().end()),
                             std::vector<double>(fy.values().begin(), fy.values().end()));
          }
          const DecoupledFeatures parts = decouple(f, flow, factor);
          return py::make_tuple(from_grid(parts.body), from_grid(parts.edge));
        },
        py::arg("feature"), py::arg("dx") = py::none(), py::arg("dy") = py::none(),
        py::arg("factor") = kDefaultSmoothFactor, "Returns (body, edge).");

  m.def("edge_to_boundary_score",
        [](const CArray<double>& edge) { return from_field(edge_to_boundary_score(to_grid(edge))); },
        py::arg("edge"));

  // Metrics
  m.def("iou",
        [](const CArray<std::uint8_t>& a, const CArray<std::uint8_t>& b) {
          return iou(to_mask(a), to_mask(b));
        },
        py::arg("a"), py::arg("b"));

  m.def("mean_iou",
        [](const CArray<std::int32_t>& pred, const CArray<std::int32_t>& gt,
           std::optional<int> num_classes) {
          LabelMap g = to_labels(gt, num_classes);
          const int classes = num_classes.value_or(
              std::max(g.num_classes(), to_labels(pred, std::nullopt).num_classes()));
          const MeanIoU r = mean_iou(to_labels(pred, classes), to_labels(gt, classes));
          return py::make_tuple(r.per_class, r.mean);
        },
        py::arg("pred"), py::arg("gt"), py::arg("num_classes") = py::none(),
        "Returns (per_class, mean); classes absent from both maps are None.");

  m.def("extract_component_patch",
        [](const CArray<std::int32_t>& seg, int target_class, int patch_size,
           std::optional<int> num_classes) -> py::object {
          const LabelMap map = to_labels(seg, num_classes.value_or(std::max(
                                                  target_class + 1,
                                                  to_labels(seg, std::nullopt).num_classes())));
          auto patch = extract_component_patch(map, target_class, patch_size);
          if (!patch) return py::none();
          py::dict out;
          out["bbox"] = py::make_tuple(patch->bbox.x0, patch->bbox.y0, patch->bbox.x1,
                                       patch->bbox.y1);
          out["mask"] = from_mask(patch->mask);
          return out;
        },
        py::arg("seg"), py::arg("target_class"), py::arg("patch_size") = kDefaultPatchSize,
        py::arg("num_classes") = py::none(), "Returns None when the component is missing.");

  m.def("cmse",
        [](const std::vector<CArray<std::uint8_t>>& masks) {
          std::vector<ComponentPatch> patches;
          for (std::size_t i = 0; i < masks.size(); ++i) {
            patches.push_back(patch_from_mask(masks[i], i));
          }
          const ConsistencyReport r = cmse(patches);
          py::dict out;
          out["cmse"] = r.cmse;
          out["patch_count"] = r.patch_count;
          out["mean_pixel_count"] = r.mean_pixel_count;
          out["average_mask"] = from_mask(r.average_mask);
          out["per_patch_iou"] = r.per_patch_iou;
          return out;
        },
        py::arg("masks"), "CMSE of equally sized binary patches.");

  // Synthetic suites
  m.def("generate_suite",
        [](int count, int jitter, std::uint64_t seed, double hole_radius) {
          SceneSpec base = default_scene(seed);
          base.hole_radius = hole_radius;
          py::list out;
          for (const auto& map : generate_suite(base, count, jitter)) out.append(from_labels(map));
          return out;
        },
        py::arg("count"), py::arg("jitter") = 0, py::arg("seed") = 0,
        py::arg("hole_radius") = 10.0, "Label maps of the default three-class scene.");

  m.def("perturb_segmentation",
        [](const CArray<std::int32_t>& gt, const std::string& kind, int amplitude,
           std::uint64_t seed, int target_class, std::optional<int> num_classes) {
          const LabelMap map = to_labels(gt, num_classes.value_or(kSceneClasses));
          PerturbSpec spec{parse_perturb_kind(kind), amplitude, seed, target_class};
          return from_labels(perturb_segmentation(map, spec));
        },
        py::arg("gt"), py::arg("kind"), py::arg("amplitude"), py::arg("seed") = 0,
        py::arg("target_class") = kHoleClass, py::arg("num_classes") = py::none());

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in-process; returns (code, stdout, stderr).");
}
