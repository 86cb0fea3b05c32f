import math

import numpy as np
import pytest

import robreg


def test_huber_kernel():
    assert robreg.huber_loss(0.0, 2.0) == 0.0
    assert robreg.huber_loss(1.0, 2.0) == 0.5
    assert robreg.huber_loss(5.0, 2.0) == 8.0
    assert robreg.huber_clip(-7.0, 2.0) == -2.0
    g = robreg.huber_gradient(np.array([1.0]), np.array([1.0]), -10.0, np.array([0.0]), 2.0)
    assert g.tolist() == [2.0]
    assert np.allclose(robreg.project_ball(np.array([3.0, 4.0]), 1.0), [0.6, 0.8])


def test_radius_rules():
    r = robreg.radius_bounded(1.0, 0.1)
    assert r.radius == 6.1 and r.derivation == "bounded"
    s = robreg.radius_subgaussian(1, 1, 1, 1, 100)
    assert s.radius == pytest.approx(3 * math.sqrt(8 * math.log(2900)), rel=1e-14)
    with pytest.raises(ValueError):
        robreg.radius_subgaussian(1, 1, 1, 1, 1)


def test_errors_map_to_python():
    with pytest.raises(robreg.DomainError):
        robreg.huber_loss(1.0, 0.0)
    with pytest.raises(robreg.ContractError):
        robreg.huber_gradient(np.zeros(2), np.zeros(1), 0.0, np.zeros(1), 1.0)


def test_sample_stream_shapes_and_reproducibility():
    spec = robreg.scenarios.uniform_box_experiment(0.3)
    X, y, corrupted = robreg.sample_stream(spec, 7, 1000)
    assert X.shape == (1000, 5) and y.shape == (1000,)
    assert np.all(np.linalg.norm(X, axis=1) <= 1.0)
    assert 0.2 < np.mean(corrupted) < 0.4
    X2, y2, _ = robreg.sample_stream(spec, 7, 1000)
    assert np.array_equal(X, X2) and np.array_equal(y, y2)


def test_run_and_metrics():
    spec = robreg.scenarios.signed_basis(3, 0.2, 1e5)
    out = robreg.run(spec, robreg.Algorithm.huber_unknown_mean, 5000, 11)
    assert out["samples_consumed"] == 10000
    assert out["est_error"] == pytest.approx(robreg.estimation_error(out["estimate"], spec.w_star))
    assert np.linalg.norm(out["estimate"]) <= spec.D + 1e-9
    l2 = robreg.run(spec, robreg.Algorithm.l2_sgd, 5000, 11)
    assert out["est_error"] < l2["est_error"]
    risk, se = robreg.excess_risk_mc(spec.w_star, spec, 2000, 1)
    assert risk == 0.0 and se == 0.0


def test_bounds_and_fit():
    assert robreg.theoretical_bound(robreg.Algorithm.huber_uniform, 1.0, 6.1, 0.0, 0.0, 10000) == pytest.approx(0.061)
    fit = robreg.rate_fit([(t, 2.0 / t) for t in (100, 200, 400, 800)])
    assert fit["slope"] == pytest.approx(-1.0, abs=1e-9)


def test_demos():
    rep = robreg.demo_example_2_1(10.0, 0.5, 20000, 3)
    assert abs(rep["l2_estimate_mean"] - rep["predicted_biased_optimum"]) <= 0.5
    assert robreg.demo_indistinguishable(100000, 3) <= 0.02
