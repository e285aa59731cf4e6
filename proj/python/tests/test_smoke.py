# Copyright 2026 The DRNet Authors. All Rights Reserved.
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

import math

import numpy as np
import pytest

import drnet


def test_metrics_on_worked_counts():
    c = drnet.ConfusionCounts(tp=8, fp=5, tn=85, fn=2)
    assert c.total == 100
    assert drnet.sensitivity(c) == pytest.approx(0.8)
    assert drnet.specificity(c) == pytest.approx(85 / 90)
    assert drnet.accuracy(c) == pytest.approx(0.93)
    expected = (8 * 85 - 5 * 2) / math.sqrt(13 * 10 * 90 * 87)
    assert drnet.mcc(c) == pytest.approx(expected, abs=1e-12)


def test_confusion_counts_respect_fov():
    gt = np.array([[1, 0], [1, 0]], dtype=np.uint8)
    pred = np.array([[1, 1], [0, 0]], dtype=np.uint8)
    c = drnet.confusion_counts(pred, gt)
    assert (c.tp, c.fp, c.tn, c.fn) == (1, 1, 1, 1)
    fov = np.array([[1, 1], [0, 0]], dtype=np.uint8)
    c = drnet.confusion_counts(pred, gt, fov)
    assert (c.tp, c.fp, c.tn, c.fn) == (1, 1, 0, 0)


def test_undefined_metric_raises():
    with pytest.raises(drnet.UndefinedMetricError):
        drnet.mcc(drnet.ConfusionCounts(tp=0, fp=0, tn=10, fn=3))


def test_auc_matches_pairwise_count():
    rng = np.random.default_rng(3)
    scores = rng.integers(0, 5, 200).astype(np.float64)
    labels = (rng.random(200) < 0.3).astype(np.uint8)
    pos, neg = scores[labels == 1], scores[labels == 0]
    diff = pos[:, None] - neg[None, :]
    expected = ((diff > 0).sum() + 0.5 * (diff == 0).sum()) / diff.size
    assert drnet.auc(scores, labels) == pytest.approx(expected, abs=1e-12)


def test_binarize_sends_ties_to_background():
    out = drnet.binarize(np.array([[0.4, 0.5, 0.6]], dtype=np.float32))
    assert out.tolist() == [[0, 0, 1]]


def test_dropblock_gamma_is_zero_without_dropping():
    assert drnet.dropblock_gamma(1.0, 7, 64, 64) == 0.0
    assert drnet.dropblock_gamma(0.86, 7, 64, 64) > 0.0


def test_pad_to_centers_the_image():
    padded, top, left = drnet.pad_to(np.ones((3, 5), dtype=np.float32), 8)
    assert padded.shape == (8, 8)
    assert (top, left) == (2, 1)
    assert padded.sum() == 15


def test_model_predicts_probabilities_and_round_trips(tmp_path):
    model = drnet.Model.build(initial_channels=2, encoder_steps=2, input_size=32, block_size=3, seed=1)
    image, gt = drnet.synthetic_sample(20, 24, 5)
    assert image.shape == gt.shape == (20, 24)
    prob = model.predict(image)
    assert prob.shape == (20, 24)
    assert np.all((prob > 0) & (prob < 1))
    np.testing.assert_array_equal(prob, model.predict(image))

    path = tmp_path / "toy.ckpt"
    model.save(path)
    restored = drnet.Model.load(path)
    assert restored.config == model.config
    assert restored.parameter_count == model.parameter_count
    np.testing.assert_array_equal(restored.predict(image), prob)


def test_model_errors_are_typed(tmp_path):
    with pytest.raises(drnet.ConfigError):
        drnet.Model.build(input_size=30, encoder_steps=2)
    model = drnet.Model.build(initial_channels=2, encoder_steps=2, input_size=32, block_size=3)
    with pytest.raises(drnet.ConfigError):
        model.predict(np.zeros((40, 40), dtype=np.float32))
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"not a checkpoint")
    with pytest.raises(drnet.FormatError):
        drnet.Model.load(bad)


def test_quick_selftest_passes():
    results = drnet.selftest(quick=True)
    assert len(results) == 5
    for name, passed, detail in results:
        assert passed, f"{name}: {detail}"
