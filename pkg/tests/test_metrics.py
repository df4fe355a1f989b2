import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_rotations
from twoview import (
    ObservationPair,
    RelativePose,
    error_3d,
    error_record,
    norm_aggregate,
    parallax_error,
    parallax_estimate,
    raw_parallax,
    relative_impact,
    reprojection_errors,
)
from twoview.metrics import UndefinedParallax, reprojection_errors_batch

S2 = np.sqrt(2.0)
POSE = RelativePose(np.eye(3), [-1.0, 0.0, 0.0])


def test_error_3d():
    x = np.array([1.0, 2.0, 3.0])
    assert error_3d(x, x) == 0
    assert error_3d(x + [0, 0, 0.5], x) == pytest.approx(0.5)


def test_reprojection_zero_for_exact_point(K512):
    x1 = np.array([0.3, -0.1, 5.0])
    obs = ObservationPair.from_pixels(K512.project(x1 - POSE.t), K512.project(x1), K512)
    d0, d1 = reprojection_errors(x1, obs, POSE)
    assert d0 < 1e-9 and d1 < 1e-9


def test_reprojection_along_own_ray(K512):
    x1 = np.array([0.3, -0.1, 5.0])
    obs = ObservationPair.from_pixels(K512.project(x1 - POSE.t), K512.project(x1), K512)
    d0, d1 = reprojection_errors(1.7 * x1, obs, POSE)
    assert d1 < 1e-9
    assert d0 > 1.0


def test_reprojection_matches_pixel_pipeline(rng, K512):
    n = 500
    R = random_rotations(rng, n, 0.2)
    t = rng.standard_normal((n, 3))
    x1 = rng.uniform(-1, 1, (n, 3)) + [0, 0, 8]
    u0 = rng.uniform(0, 1024, (n, 2))
    u1 = rng.uniform(0, 1024, (n, 2))
    d0, d1 = reprojection_errors_batch(x1, u0, u1, K512, R, t)
    Km = K512.K
    for i in range(n):
        x0 = R[i].T @ (x1[i] - t[i])
        exp = []
        for x, u in ((x0, u0[i]), (x1[i], u1[i])):
            h = Km @ x
            exp.append(np.inf if x[2] <= 0 else np.hypot(*(h[:2] / h[2] - u)))
        assert d0[i] == pytest.approx(exp[0], rel=1e-12)
        assert d1[i] == pytest.approx(exp[1], rel=1e-12)


def test_reprojection_behind_is_infinite(K512):
    obs = ObservationPair.from_pixels([512.0, 512.0], [512.0, 512.0], K512)
    d0, d1 = reprojection_errors(np.array([0.0, 0.0, -3.0]), obs, POSE)
    assert d0 == np.inf and d1 == np.inf


@pytest.mark.parametrize("which, expected", [("l1", 7.0), ("l2", 5.0), ("linf", 4.0)])
def test_norm_aggregate(which, expected):
    assert norm_aggregate(3.0, 4.0, which) == expected
    assert norm_aggregate(0.0, 0.0, which) == 0.0


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_norm_ordering(d0, d1):
    linf, l2, l1 = (norm_aggregate(d0, d1, w) for w in ("linf", "l2", "l1"))
    assert linf <= l2 <= l1


def test_parallax_estimate():
    assert parallax_estimate(np.array([-1.0, 0, 1]), POSE.t) == pytest.approx(np.pi / 4, abs=1e-15)
    far = parallax_estimate(np.array([0.1, 0.2, 1.0]) * 1e9, POSE.t)
    assert far < 1e-8
    with pytest.raises(UndefinedParallax):
        parallax_estimate(np.zeros(3), POSE.t)
    with pytest.raises(UndefinedParallax):
        parallax_estimate(POSE.t.copy(), POSE.t)


def test_parallax_error():
    d2, d3, d15 = np.radians([2.0, 3.0, 1.5])
    assert parallax_error(d2, d2) == (0.0, 0)
    err, flag = parallax_error(d2, d3)
    assert err == pytest.approx(np.radians(1.0)) and flag == 1
    err, flag = parallax_error(d2, d15)
    assert err == pytest.approx(np.radians(0.5)) and flag == -1


def test_raw_parallax(rng):
    f0 = np.array([0.0, 0, 1])
    f1 = np.array([-1.0, 0, 1]) / S2
    assert raw_parallax(f0, f1, POSE) == pytest.approx(np.pi / 4, abs=1e-15)
    R = random_rotations(rng, 1)[0]
    pose = RelativePose(R, rng.standard_normal(3))
    assert raw_parallax(f0, R @ f0, pose) == pytest.approx(0.0, abs=1e-15)
    g0, g1 = rng.standard_normal((2, 3))
    other = RelativePose(R, rng.standard_normal(3))
    assert raw_parallax(g0, g1, pose) == raw_parallax(g0, g1, other)
    assert raw_parallax(3 * g0, 0.2 * g1, pose) == pytest.approx(raw_parallax(g0, g1, pose), abs=1e-14)


def _cot_ratio(beta_deg, delta_deg=0.5):
    b, d = np.radians(beta_deg), np.radians(delta_deg)
    cot = lambda a: np.cos(a) / np.sin(a)  # noqa: E731
    return abs((cot((b - d) / 2) - cot(b / 2)) / (cot((b + d) / 2) - cot(b / 2)))


def test_relative_impact_spot_values():
    assert relative_impact(np.radians(10.0)) == pytest.approx(1.105, abs=1e-3)
    assert relative_impact(np.radians(90.0)) == pytest.approx(1.008, abs=1e-3)
    for b in (10.0, 90.0, 3.0):
        assert relative_impact(np.radians(b)) == pytest.approx(_cot_ratio(b), rel=1e-12)


def test_relative_impact_curve():
    grid = np.radians(np.arange(2.0, 91.0))
    r = relative_impact(grid)
    assert np.all(r > 1)
    assert np.all(np.diff(r) <= 0)


def test_relative_impact_domain():
    with pytest.raises(ValueError):
        relative_impact(np.radians(0.4))


def test_error_record_invariants(K512):
    x_true = np.array([0.2, 0.1, 4.0])
    u0 = K512.project(x_true - POSE.t) + [1.0, -2.0]
    u1 = K512.project(x_true) + [0.5, 0.5]
    obs = ObservationPair.from_pixels(u0, u1, K512)
    est = x_true + [0.01, 0.0, 0.2]
    rec = error_record(est, True, "mid2", obs, POSE, x_true)
    assert rec.e_l1 == rec.d0 + rec.d1
    assert rec.e_l2 == pytest.approx(np.hypot(rec.d0, rec.d1))
    assert rec.e_linf == max(rec.d0, rec.d1)
    for b in (rec.beta_raw, rec.beta_est, rec.beta_err):
        assert 0 <= b <= np.pi / 2
    beta_true = parallax_estimate(x_true, POSE.t)
    assert rec.beta_err == pytest.approx(abs(beta_true - rec.beta_est), abs=1e-15)
