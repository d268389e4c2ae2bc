# Copyright 2026 The shapeseg Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math
import os
import subprocess

import numpy as np
import pytest

import shapeseg


def test_distance_and_probability():
    labels = np.zeros((5, 5), dtype=np.int32)
    labels[2, 2] = 1
    d, has_boundary = shapeseg.distance_to_other_class(labels)
    assert has_boundary
    assert d[0, 0] == pytest.approx(2 * math.sqrt(2))
    p = shapeseg.vbd_probability(labels)
    assert p.shape == (5, 5)
    assert p[2, 1] == 1.0
    assert p[0, 2] == pytest.approx(math.exp(-0.5))


def test_boundary_targets_modes():
    labels = np.array([[0], [1], [0]])
    t = shapeseg.boundary_targets(labels, mode="threshold", tau=0.9)
    assert np.all(t["boundary_target"] == 1.0)
    a = shapeseg.boundary_targets(np.eye(12, dtype=np.int32), seed=3)
    b = shapeseg.boundary_targets(np.eye(12, dtype=np.int32), seed=3)
    assert np.array_equal(a["boundary_target"], b["boundary_target"])
    with pytest.raises(shapeseg.ValidationError):
        shapeseg.boundary_targets(labels, mode="other")


def test_losses_and_gradient_shapes():
    rng = np.random.default_rng(0)
    scores = rng.normal(size=(3, 6, 5))
    gt = rng.integers(0, 3, size=(6, 5))
    value, grad = shapeseg.cross_entropy(scores, gt)
    assert value > 0 and grad.shape == scores.shape
    v0, _ = shapeseg.focal_loss(scores, gt, gamma=0.0)
    assert v0 == pytest.approx(value, abs=1e-10)
    value, grad = shapeseg.weighted_bce(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)))
    assert value == pytest.approx(math.log(2))
    assert grad.shape == (1, 1)


def test_cross_entropy_gradient_against_finite_differences():
    rng = np.random.default_rng(1)
    scores = rng.normal(size=(2, 4, 3))
    gt = rng.integers(0, 2, size=(4, 3))
    _, grad = shapeseg.cross_entropy(scores, gt)
    h = 1e-5
    for idx in [(0, 0, 0), (1, 2, 1), (0, 3, 2)]:
        up = scores.copy()
        up[idx] += h
        down = scores.copy()
        down[idx] -= h
        numeric = (shapeseg.cross_entropy(up, gt)[0] - shapeseg.cross_entropy(down, gt)[0]) / (2 * h)
        assert grad[idx] == pytest.approx(numeric, rel=1e-5, abs=1e-9)


def test_decouple_reconstructs():
    rng = np.random.default_rng(2)
    feature = rng.normal(size=(2, 9, 7))
    body, edge = shapeseg.decouple(feature, factor=4)
    assert np.allclose(body + edge, feature, atol=1e-12)
    score = shapeseg.edge_to_boundary_score(edge)
    assert np.allclose(score, np.sqrt((edge ** 2).sum(axis=0)))


def test_cmse_example():
    p1 = np.array([[1, 1], [0, 0]], dtype=np.uint8)
    p2 = np.array([[1, 0], [1, 0]], dtype=np.uint8)
    r = shapeseg.cmse([p1, p2])
    assert r["cmse"] == pytest.approx(2 / 9)
    assert r["per_patch_iou"] == pytest.approx([1.0, 1 / 3])
    assert np.array_equal(r["average_mask"], p1)


def test_suite_perturbation_and_metrics():
    suite = shapeseg.generate_suite(3, jitter=0, seed=1)
    assert len(suite) == 3 and suite[0].shape == (128, 128)
    assert np.array_equal(suite[0], suite[2])
    pred = shapeseg.perturb_segmentation(suite[0], "dilate", 1)
    assert (pred == 2).sum() > (suite[0] == 2).sum()
    assert shapeseg.pixel_accuracy(suite[0], suite[0]) == 1.0
    per_class, mean = shapeseg.mean_iou(pred, suite[0], num_classes=3)
    assert 0.0 < mean < 1.0 and len(per_class) == 3
    patch = shapeseg.extract_component_patch(suite[0], 2, 16)
    assert patch["mask"].shape == (16, 16)


def test_run_cli_in_process(tmp_path):
    code, out, err = shapeseg.run_cli(["synth", "--out-dir", str(tmp_path), "--count", "3"])
    assert code == 0, err
    code, out, err = shapeseg.run_cli(["eval", str(tmp_path / "manifest.tsv"), "--deterministic"])
    assert code == 0, err
    report = json.loads(out)
    assert report["consistency"]["cmse"] == 0.0
    code, _, err = shapeseg.run_cli(["eval", str(tmp_path / "absent.tsv")])
    assert code == 2 and err.startswith("shapeseg: error[io]:")


@pytest.mark.skipif("SHAPESEG_CLI" not in os.environ, reason="CLI binary path not provided")
def test_cli_binary_exit_codes(tmp_path):
    cli = os.environ["SHAPESEG_CLI"]
    assert subprocess.run([cli, "--version"], capture_output=True, text=True).stdout.strip() == "0.1.0"
    r = subprocess.run([cli, "synth", "--out-dir", str(tmp_path), "--perturb", "warp:1"],
                       capture_output=True, text=True)
    assert r.returncode == 1
    assert r.stderr.startswith("shapeseg: error[validation]:")
