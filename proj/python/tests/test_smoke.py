import os

import numpy as np
import pytest

import ttsa


def sys_a(distribution=ttsa.NoiseDistribution.Gaussian):
    one = np.ones((1, 1))
    noise = ttsa.NoiseSpec(one, np.zeros((1, 1)), one, distribution)
    return ttsa.SystemSpec(2 * one, one, one, one, np.array([1.0]), np.array([2.0]), noise)


def test_fixed_point_and_delta():
    theta, r = ttsa.fixed_point(sys_a())
    assert theta == pytest.approx([-1.0])
    assert r == pytest.approx([3.0])
    assert ttsa.delta_matrix(sys_a())[0, 0] == pytest.approx(1.0)


def test_predictions():
    p = ttsa.predict_full(sys_a(), 0.1)
    # (2 - beta_bar) sigma11 = 2 when Delta = 1 and Q = 2
    assert p.sigma11[0, 0] == pytest.approx(2 / 1.9, rel=1e-14)
    assert p.sigma12[0, 0] == pytest.approx(-0.5)
    assert p.sigma22[0, 0] == pytest.approx(0.5)
    assert ttsa.predict_reduced(sys_a(), 0.1) == pytest.approx(p.sigma11, rel=1e-12)
    opt = ttsa.optimal_gain_covariance(sys_a())
    assert opt.sigma11[0, 0] == pytest.approx(2.0)


def test_propagate_approaches_prediction():
    pair = ttsa.SchedulePair(ttsa.StepSchedule(1, 10, 1), ttsa.StepSchedule(1, 10, 0.7))
    assert pair.beta_bar == pytest.approx(0.1)
    rows = ttsa.propagate(sys_a(), pair, 100000, [100000])
    assert rows[-1]["k"] == 100000
    assert abs(rows[-1]["sigma11"][0, 0] / (2 / 1.9) - 1) < 0.1


def test_ensemble_is_reproducible():
    pair = ttsa.SchedulePair(ttsa.StepSchedule(1, 10, 1), ttsa.StepSchedule(1, 10, 0.7))
    a = ttsa.ensemble_covariance(sys_a(), pair, replicas=64, steps=500, seed=3)
    b = ttsa.ensemble_covariance(sys_a(), pair, replicas=64, steps=500, seed=3, jobs=2)
    np.testing.assert_array_equal(a["theta_hat"], b["theta_hat"])
    assert a["theta_hat"].shape == (64, 1)


def test_errors_are_translated():
    one = np.ones((1, 1))
    noise = ttsa.NoiseSpec(one, np.zeros((1, 1)), one)
    with pytest.raises(ttsa.TtsaError, match="SingularA22"):
        ttsa.SystemSpec(one, one, one, np.zeros((1, 1)), np.ones(1), np.ones(1), noise)


def test_load_config():
    path = os.path.join(os.environ["TTSA_CONFIG_DIR"], "sys_a.json")
    spec, pair = ttsa.load_config(path)
    ok, text = ttsa.validate(spec, pair)
    assert ok, text
    assert spec.n == 1 and spec.m == 1
