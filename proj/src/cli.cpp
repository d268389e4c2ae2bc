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

#include "shapeseg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapeseg/consistency.hpp"
#include "shapeseg/decouple.hpp"
#include "shapeseg/errors.hpp"
#include "shapeseg/eval.hpp"
#include "shapeseg/geometry.hpp"
#include "shapeseg/gradcheck.hpp"
#include "shapeseg/io.hpp"
#include "shapeseg/losses.hpp"
#include "shapeseg/synth.hpp"

namespace shapeseg {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr double kGradStep = 1e-4;
constexpr double kGradTolerance = 1e-4;

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
}

void emit_json(const Json& doc, const std::string& out_path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError(out_path, "cannot open for writing");
  file << text;
  if (!file.flush()) throw IoError(out_path, "write failed");
}

Json header(bool deterministic) {
  Json doc;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  if (!deterministic) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    doc["generated_at"] = buf;
  }
  return doc;
}

TargetMode parse_mode(const std::string& mode, double tau, std::uint64_t seed) {
  if (mode == "soft") return SoftTargets{};
  if (mode == "sampled") return SampledTargets{seed};
  if (mode == "threshold") return ThresholdTargets{tau};
  throw ValidationError("--mode must be soft, sampled or threshold, got '" + mode + "'");
}

PerturbSpec parse_perturb(const std::string& text) {
  const auto colon = text.find(':');
  PerturbSpec spec;
  spec.kind = parse_perturb_kind(text.substr(0, colon));
  if (colon != std::string::npos) {
    const std::string amp = text.substr(colon + 1);
    if (amp.empty() || amp.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("--perturb amplitude '" + amp + "' is not a non-negative integer");
    }
    spec.amplitude = std::stoi(amp);
  } else if (spec.kind != PerturbKind::kNone) {
    throw ValidationError("--perturb expects kind:amplitude, got '" + text + "'");
  }
  return spec;
}

FeatureGrid stack_channels(const std::vector<std::string>& paths) {
  std::vector<ScalarField> planes;
  for (const auto& p : paths) planes.push_back(read_scalar_field(p));
  const int w = planes.front().width();
  const int h = planes.front().height();
  std::vector<double> values;
  for (std::size_t c = 0; c < planes.size(); ++c) {
    if (planes[c].width() != w || planes[c].height() != h) {
      throw ValidationError(paths[c] + ": channel size differs from " + paths.front());
    }
    values.insert(values.end(), planes[c].values().begin(), planes[c].values().end());
  }
  return FeatureGrid(static_cast<int>(planes.size()), w, h, std::move(values));
}

Json gradcheck_json(const GradCheckSummary& s) {
  return {{"checked", s.checked},
          {"max_relative_error", s.max_relative_error},
          {"max_absolute_error", s.max_absolute_error},
          {"pass", s.max_relative_error <= kGradTolerance}};
}

// --- vbd ---------------------------------------------------------------

struct VbdArgs {
  std::string labels;
  std::string out_dir;
  std::string mode = "sampled";
  double tau = 0.5;
  std::uint64_t seed = 0;
  std::optional<int> dt;
  std::optional<int> num_classes;
};

int run_vbd(const VbdArgs& a, std::ostream& out) {
  const LabelMap labels = read_label_map(a.labels, a.num_classes);
  const TargetMode mode = parse_mode(a.mode, a.tau, a.seed);
  const DistanceField distance = distance_to_other_class(labels);
  const BoundaryTargets targets = make_boundary_targets(labels, mode);
  const ScalarField prob = vbd_probability(distance);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  write_scalar_field(distance.field(), dir / "distance.png");
  write_scalar_field(prob, dir / "probability.png");
  write_scalar_field(targets.boundary_target, dir / "boundary_target.png");
  write_scalar_field(targets.weight_map, dir / "weight.png");
  write_binary_mask(targets.body_ignore, dir / "body_ignore.png");
  Json outputs = {"distance.png", "probability.png", "boundary_target.png", "weight.png",
                  "body_ignore.png"};
  Json dt_json = nullptr;
  if (a.dt) {
    const BinaryMask mask = boundary_mask_dt(labels, *a.dt);
    write_binary_mask(mask, dir / "boundary_dt.png");
    outputs.push_back("boundary_dt.png");
    dt_json = {{"dt", *a.dt}, {"pixels", mask.count()}};
  }

  const auto w = targets.weight_map.values();
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  Json doc = header(true);
  doc["command"] = "vbd";
  doc["input"] = fs::path(a.labels).filename().string();
  doc["width"] = labels.width();
  doc["height"] = labels.height();
  doc["num_classes"] = labels.num_classes();
  doc["mode"] = a.mode;
  if (a.mode == "sampled") doc["seed"] = a.seed;
  if (a.mode == "threshold") doc["tau"] = a.tau;
  doc["boundary_pixels"] = targets.body_ignore.count();
  doc["weight_min"] = *lo;
  doc["weight_max"] = *hi;
  doc["distance_threshold"] = dt_json;
  doc["outputs"] = outputs;
  emit_json(doc, "", out);
  return kExitOk;
}

// --- decouple ----------------------------------------------------------

struct DecoupleArgs {
  std::vector<std::string> features;
  std::string flow_dx;
  std::string flow_dy;
  int factor = kDefaultSmoothFactor;
  std::string out_dir;
};

int run_decouple(const DecoupleArgs& a, std::ostream& out) {
  const FeatureGrid feature = stack_channels(a.features);
  if (a.flow_dx.empty() != a.flow_dy.empty()) {
    throw ValidationError("--flow-dx and --flow-dy must be given together");
  }
  FlowField flow = FlowField::zero(feature.width(), feature.height());
  if (!a.flow_dx.empty()) {
    const ScalarField dx = read_scalar_field(a.flow_dx);
    const ScalarField dy = read_scalar_field(a.flow_dy);
    flow = FlowField(dx.width(), dx.height(),
                     std::vector<double>(dx.values().begin(), dx.values().end()),
                     std::vector<double>(dy.values().begin(), dy.values().end()));
  }
  const DecoupledFeatures parts = decouple(feature, flow, a.factor);
  const ScalarField score = edge_to_boundary_score(parts.edge);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  Json outputs = Json::array();
  for (int c = 0; c < feature.channels(); ++c) {
    const std::string body = "body_c" + std::to_string(c) + ".png";
    const std::string edge = "edge_c" + std::to_string(c) + ".png";
    write_scalar_field(parts.body.channel(c), dir / body);
    write_scalar_field(parts.edge.channel(c), dir / edge);
    outputs.push_back(body);
    outputs.push_back(edge);
  }
  write_scalar_field(score, dir / "boundary_score.png");
  outputs.push_back("boundary_score.png");

  double energy = 0.0;
  for (double v : parts.edge.values()) energy += v * v;
  Json doc = header(true);
  doc["command"] = "decouple";
  doc["channels"] = feature.channels();
  doc["width"] = feature.width();
  doc["height"] = feature.height();
  doc["factor"] = a.factor;
  doc["flow"] = !a.flow_dx.empty();
  doc["edge_energy"] = energy;
  doc["max_boundary_score"] =
      *std::max_element(score.values().begin(), score.values().end());
  doc["outputs"] = outputs;
  emit_json(doc, "", out);
  return kExitOk;
}

// --- eval --------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  std::optional<int> target_class;
  int patch_size = kDefaultPatchSize;
  std::string out;
  bool deterministic = false;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  const Manifest manifest = read_manifest(a.manifest);
  EvalOptions options;
  options.target_class = a.target_class;
  options.patch_size = a.patch_size;
  options.deterministic = a.deterministic;
  options.manifest_name = fs::path(a.manifest).filename().string();
  const EvalReport report = evaluate_manifest(manifest, options);
  emit_json(report_to_json(report, options), a.out, out);
  return kExitOk;
}

// --- loss --------------------------------------------------------------

struct LossArgs {
  std::string gt;
  std::vector<std::string> scores;
  std::string edge_scores;
  std::string mode = "sampled";
  double tau = 0.5;
  std::uint64_t seed = 0;
  double gamma = kDefaultFocalGamma;
  double body_lambda = 0.5;
  LossWeights weights;
  std::size_t check_samples = 64;
  std::string out;
  bool deterministic = false;
};

int run_loss(const LossArgs& a, std::ostream& out) {
  const FeatureGrid scores = stack_channels(a.scores);
  const LabelMap gt = read_label_map(a.gt, scores.channels());
  const BoundaryTargets targets = make_boundary_targets(gt, parse_mode(a.mode, a.tau, a.seed));
  const int c = scores.channels();
  const int w = scores.width();
  const int h = scores.height();
  auto as_grid = [&](std::span<const double> v) {
    return FeatureGrid(c, w, h, std::vector<double>(v.begin(), v.end()));
  };

  const LossResult body = body_loss(scores, gt, targets.body_ignore, a.body_lambda);
  const LossResult focal = focal_loss(scores, gt, a.gamma);
  const LossResult dice = dice_loss(scores, gt);
  std::optional<ScalarField> edge_scores;
  if (!a.edge_scores.empty()) edge_scores = read_scalar_field(a.edge_scores);
  const LossResult edge =
      edge_scores ? weighted_bce(*edge_scores, targets.boundary_target, targets.weight_map)
                  : LossResult{0.0, FeatureGrid::filled(1, w, h, 0.0)};
  const TotalLoss total = total_loss(edge, body, focal, dice, a.weights);

  Json checks;
  if (edge_scores) {
    checks["edge"] = gradcheck_json(check_gradient(
        [&](std::span<const double> v) {
          return weighted_bce(ScalarField(w, h, std::vector<double>(v.begin(), v.end())),
                              targets.boundary_target, targets.weight_map)
              .value;
        },
        edge_scores->values(), edge.grad.values(), a.check_samples, kGradStep, a.seed));
  } else {
    checks["edge"] = nullptr;
  }
  checks["body"] = gradcheck_json(check_gradient(
      [&](std::span<const double> v) {
        return body_loss(as_grid(v), gt, targets.body_ignore, a.body_lambda).value;
      },
      scores.values(), body.grad.values(), a.check_samples, kGradStep, a.seed));
  checks["focal"] = gradcheck_json(check_gradient(
      [&](std::span<const double> v) { return focal_loss(as_grid(v), gt, a.gamma).value; },
      scores.values(), focal.grad.values(), a.check_samples, kGradStep, a.seed));
  checks["dice"] = gradcheck_json(check_gradient(
      [&](std::span<const double> v) { return dice_loss(as_grid(v), gt).value; },
      scores.values(), dice.grad.values(), a.check_samples, kGradStep, a.seed));

  Json doc = header(a.deterministic);
  doc["command"] = "loss";
  doc["config"] = {{"classes", c},
                   {"width", w},
                   {"height", h},
                   {"mode", a.mode},
                   {"seed", a.seed},
                   {"tau", a.tau},
                   {"gamma", a.gamma},
                   {"body_lambda", a.body_lambda},
                   {"lambda1", a.weights.edge},
                   {"lambda2", a.weights.body},
                   {"lambda3", a.weights.focal},
                   {"lambda4", a.weights.dice}};
  doc["components"] = {{"edge", edge_scores ? Json(edge.value) : Json(nullptr)},
                       {"body", body.value},
                       {"focal", focal.value},
                       {"dice", dice.value}};
  doc["total"] = total.value;
  doc["gradient_check"] = {{"step", kGradStep}, {"tolerance", kGradTolerance}};
  for (auto& [key, value] : checks.items()) doc["gradient_check"][key] = value;
  emit_json(doc, a.out, out);
  return kExitOk;
}

// --- synth -------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  int count = 50;
  int jitter = 0;
  std::uint64_t seed = 0;
  std::string perturb = "none";
  double hole_radius = 10.0;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  const PerturbSpec perturb = parse_perturb(a.perturb);
  SceneSpec base = default_scene(a.seed);
  base.hole_radius = a.hole_radius;
  const auto specs = suite_specs(base, a.count, a.jitter);

  const fs::path dir(a.out_dir);
  ensure_dir(dir / "gt");
  ensure_dir(dir / "pred");
  Manifest manifest;
  manifest.num_classes = kSceneClasses;
  manifest.target_class = kHoleClass;
  manifest.seed = a.seed;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%03zu", i);
    const LabelMap gt = generate_scene(specs[i]);
    PerturbSpec p = perturb;
    p.seed = perturbation_seed(specs[i].seed);
    const LabelMap pred = perturb_segmentation(gt, p);
    const std::string file = std::string(name) + ".png";
    write_label_map(gt, dir / "gt" / file);
    write_label_map(pred, dir / "pred" / file);
    manifest.entries.push_back({name, fs::path("pred") / file, fs::path("gt") / file});
  }
  write_manifest(manifest, dir / "manifest.tsv");

  Json doc = header(true);
  doc["command"] = "synth";
  doc["count"] = a.count;
  doc["jitter"] = a.jitter;
  doc["seed"] = a.seed;
  doc["perturb"] = {{"kind", perturb_kind_name(perturb.kind)},
                    {"amplitude", perturb.amplitude}};
  doc["manifest"] = (dir / "manifest.tsv").string();
  emit_json(doc, "", out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary-aware segmentation supervision and consistency evaluation",
               kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  VbdArgs vbd;
  auto* vbd_cmd = app.add_subcommand("vbd", "Boundary probability map and boundary targets");
  vbd_cmd->add_option("labels", vbd.labels, "Label map (PNG or PGM)")->required();
  vbd_cmd->add_option("--out-dir", vbd.out_dir, "Output directory")->required();
  vbd_cmd->add_option("--mode", vbd.mode, "soft | sampled | threshold")->capture_default_str();
  vbd_cmd->add_option("--tau", vbd.tau, "Threshold for --mode threshold")->capture_default_str();
  vbd_cmd->add_option("--seed", vbd.seed, "Seed for --mode sampled")->capture_default_str();
  vbd_cmd->add_option("--dt", vbd.dt, "Also write the fixed distance-threshold mask");
  vbd_cmd->add_option("--num-classes", vbd.num_classes, "Declared class count");

  DecoupleArgs dec;
  auto* dec_cmd = app.add_subcommand("decouple", "Split a feature map into body and edge");
  dec_cmd->add_option("--feature", dec.features, "Feature channel image, repeat per channel")
      ->required();
  dec_cmd->add_option("--flow-dx", dec.flow_dx, "Horizontal flow field image");
  dec_cmd->add_option("--flow-dy", dec.flow_dy, "Vertical flow field image");
  dec_cmd->add_option("--factor", dec.factor, "Pooling factor (power of two)")
      ->capture_default_str();
  dec_cmd->add_option("--out-dir", dec.out_dir, "Output directory")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a manifest into a JSON report");
  eval_cmd->add_option("manifest", ev.manifest, "TSV manifest")->required();
  eval_cmd->add_option("--target-class", ev.target_class, "Class scored by CMSE");
  eval_cmd->add_option("--patch-size", ev.patch_size, "Common patch size")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Report path (default: stdout)");
  eval_cmd->add_flag("--deterministic", ev.deterministic, "Omit the timestamp");

  LossArgs loss;
  auto* loss_cmd = app.add_subcommand("loss", "Evaluate the supervision losses on score maps");
  loss_cmd->add_option("--gt", loss.gt, "Ground-truth label map")->required();
  loss_cmd->add_option("--scores", loss.scores, "Class score image, repeat per class")
      ->required();
  loss_cmd->add_option("--edge-scores", loss.edge_scores, "Boundary score image");
  loss_cmd->add_option("--mode", loss.mode, "Boundary target mode")->capture_default_str();
  loss_cmd->add_option("--tau", loss.tau, "Threshold for --mode threshold")->capture_default_str();
  loss_cmd->add_option("--seed", loss.seed, "Seed for sampling")->capture_default_str();
  loss_cmd->add_option("--gamma", loss.gamma, "Focal gamma")->capture_default_str();
  loss_cmd->add_option("--body-lambda", loss.body_lambda, "CE share of the body loss")
      ->capture_default_str();
  loss_cmd->add_option("--lambda1", loss.weights.edge, "Edge weight")->capture_default_str();
  loss_cmd->add_option("--lambda2", loss.weights.body, "Body weight")->capture_default_str();
  loss_cmd->add_option("--lambda3", loss.weights.focal, "Focal weight")->capture_default_str();
  loss_cmd->add_option("--lambda4", loss.weights.dice, "Dice weight")->capture_default_str();
  loss_cmd->add_option("--check-samples", loss.check_samples, "Coordinates per gradient check")
      ->capture_default_str();
  loss_cmd->add_option("--out", loss.out, "Report path (default: stdout)");
  loss_cmd->add_flag("--deterministic", loss.deterministic, "Omit the timestamp");

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene suite");
  synth_cmd->add_option("--out-dir", syn.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", syn.count, "Number of scenes")->capture_default_str();
  synth_cmd->add_option("--jitter", syn.jitter, "Position jitter in pixels")
      ->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed, "Suite seed")->capture_default_str();
  synth_cmd->add_option("--perturb", syn.perturb, "Simulated segmenter, kind:amplitude")
      ->capture_default_str();
  synth_cmd->add_option("--hole-radius", syn.hole_radius, "Hole radius in pixels")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "shapeseg: error[validation]: " << one_line(e.what()) << "\n";
    return kExitValidation;
  }

  try {
    if (*vbd_cmd) return run_vbd(vbd, out);
    if (*dec_cmd) return run_decouple(dec, out);
    if (*eval_cmd) return run_eval(ev, out);
    if (*loss_cmd) return run_loss(loss, out);
    if (*synth_cmd) return run_synth(syn, out);
  } catch (const IoError& e) {
    err << "shapeseg: error[io]: " << one_line(e.what()) << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "shapeseg: error[io]: " << one_line(e.what()) << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "shapeseg: error[validation]: " << one_line(e.what()) << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace shapeseg
