# Copyright 2026 The metricopt Authors
# SPDX-License-Identifier: Apache-2.0

import math

import numpy as np
import pytest

import metricopt as mo


def test_step_values_and_slopes():
    assert mo.heaviside_approx(0.75, 0.5, 0.1) == pytest.approx(0.9)
    assert mo.heaviside_approx(0.55, 0.7, 0.1) == pytest.approx(0.1)
    grid = np.linspace(0.0, 1.0, 101)
    values = mo.heaviside_approx(grid, 0.3)
    assert values.shape == grid.shape
    assert np.all(np.diff(values) > 0)
    assert mo.HeavisideParams(0.5, 0.1).slopes == pytest.approx((0.4, 1.6, 0.4))
    with pytest.raises(ValueError):
        mo.HeavisideParams(1.5)


def test_counts_and_metrics():
    p = np.array([0.9, 0.2, 0.8, 0.1])
    y = np.array([1, 0, 0, 1], dtype=np.uint8)
    hard = mo.hard_counts(p, y, 0.5)
    assert hard == {"tp": 1, "fp": 1, "fn": 1, "tn": 1}
    assert mo.accuracy(hard) == 0.5
    saturated = np.array([1.0, 0.0, 1.0, 0.0])
    assert mo.soft_counts(saturated, y) == mo.hard_counts(saturated, y)
    assert mo.auroc([0.9, 0.8, 0.7, 0.1], [1, 0, 1, 0]) == pytest.approx(0.75)
    with pytest.raises(mo.UndefinedMetric):
        mo.auroc([0.2, 0.3], [1, 1])
    table = mo.evaluate(p, y)
    assert len(table["per_tau"]) == 36
    assert table["auroc"]["defined"]


def test_loss_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    p = rng.uniform(0.05, 0.95, 40)
    y = (rng.uniform(size=40) < 0.5).astype(np.uint8)
    y[:2] = [1, 0]
    loss = mo.MetricLoss(mo.LossConfig("f1"))
    value, grad = loss(p, y)
    assert 0.0 <= value <= 1.0
    h = 1e-5
    for i in range(0, 40, 7):
        if abs(p[i] - 0.5) < 1e-3 or abs(p[i] - 0.25) < 1e-3 or abs(p[i] - 0.75) < 1e-3:
            continue
        up, dn = p.copy(), p.copy()
        up[i] += h
        dn[i] -= h
        numeric = (loss(up, y)[0] - loss(dn, y)[0]) / (2 * h)
        assert grad[i] == pytest.approx(numeric, rel=1e-4, abs=1e-9)
    bce, _ = mo.MetricLoss(mo.LossConfig("bce"))(np.array([0.9]), np.array([1], dtype=np.uint8))
    assert bce == pytest.approx(-math.log(0.9))


def test_sigmoid_fit_and_lookup():
    fit = mo.fit_sigmoid(0.5)
    assert fit.center == pytest.approx(0.5, abs=1e-9)
    assert fit(np.array([0.5]))[0] == pytest.approx(0.5)
    table = mo.LookupTable.build(100, [0.05 + 0.1 * j for j in range(10)], quantized=True)
    assert table.size == 1000
    assert table.storage_bytes <= 1000
    with pytest.raises(mo.UnknownThreshold):
        table.lookup(0.4, 0.5)


def test_data_and_training(tmp_path):
    x, y = mo.generate_blobs(n_per_class=150, positive_center=30.0, seed=1)
    assert x.shape == (300, 3)
    assert y.sum() == 150
    split = mo.standardize_and_split(mo.Dataset(x, y), seed=1)
    assert len(split.train) + len(split.validation) + len(split.test) == 300
    config = mo.TrainConfig(mo.LossConfig("f1"), batch_size=64, max_epochs=60, window=10, learning_rate=0.01)
    model = mo.make_model(3, config)
    report = mo.train(model, split, config)
    assert report["best_epoch"] >= 1
    assert report["test_metrics"]["auroc"]["value"] > 0.9
    path = tmp_path / "model.bin"
    model.save(path)
    again = mo.MlpModel.load(path)
    assert np.array_equal(again.predict(split.test.features), model.predict(split.test.features))


def test_csv(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,label\n1,2,yes\n3,x,no\n5,6,no\n")
    x, y, names, rejected = mo.load_csv(path, "label", "yes")
    assert names == ["a", "b"]
    assert list(y) == [1, 0]
    assert rejected == [3]


def test_cli_in_process():
    code, out, _ = mo.run_cli(
        ["loss-grid", "--dataset", "synthetic:n=100", "--loss", "f1", "--trials", "1", "--max-epochs", "3"]
    )
    assert code == 0
    assert out.splitlines()[0].split("\t")[:3] == ["config", "loss", "metric"]
    code, _, err = mo.run_cli(["loss-grid", "--trials", "none"])
    assert code == 1
    assert "trials" in err
