import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_rotations
from twoview import (
    Intrinsics,
    Line3D,
    ObservationPair,
    RelativePose,
    angle_between_lines,
    backproject,
    epipolar_residual,
    transform_to_frame0,
)

S2 = np.sqrt(2.0)
vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10)).filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_intrinsics_reject_nonpositive_focal():
    with pytest.raises(ValueError):
        Intrinsics(0.0, 1.0, 0.0, 0.0)


def test_relative_pose_validates_rotation():
    with pytest.raises(ValueError):
        RelativePose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        RelativePose(np.eye(3) * 1.001, np.zeros(3))


@pytest.mark.parametrize(
    "u, expected",
    [
        ((512, 512, 1), (0, 0, 1)),
        ((1024, 512, 1), (1, 0, 1)),
        ((0, 0, 1), (-1, -1, 1)),
    ],
)
def test_backproject_examples(K512, u, expected):
    f = backproject(np.array(u, float), K512)
    np.testing.assert_allclose(f, expected, atol=1e-15)
    fn = backproject(np.array(u, float), K512, normalize=True)
    np.testing.assert_allclose(fn, np.array(expected) / np.linalg.norm(expected), atol=1e-15)
    assert abs(np.linalg.norm(fn) - 1) < 1e-12


def test_backproject_accepts_plain_pixels(K512):
    np.testing.assert_array_equal(backproject([1024.0, 512.0], K512), backproject([1024.0, 512.0, 1.0], K512))


def test_backproject_reproject_roundtrip(rng):
    K = Intrinsics(500.0, 480.0, 320.0, 240.0)
    x = rng.uniform(-1, 1, (1000, 3)) + [0, 0, 3]
    u = K.project(x)
    f = backproject(u, K)
    np.testing.assert_allclose(K.project(f), u, atol=1e-9)
    assert np.all(f[:, 2] > 0)


def test_observation_pair_bearings_follow_pixels(K512):
    obs = ObservationPair.from_pixels([600.0, 400.0], [10.0, 1000.0], K512)
    Kinv = np.linalg.inv(K512.K)
    for f, u in ((obs.f0, obs.u0), (obs.f1, obs.u1)):
        g = Kinv @ np.append(u, 1.0)
        assert np.dot(f, g) > 0
        np.testing.assert_allclose(np.cross(f, g), 0, atol=1e-10)


def test_epipolar_residual_examples():
    pose = RelativePose(np.eye(3), [-1.0, 0, 0])
    f0 = np.array([0.0, 0, 1])
    assert epipolar_residual(f0, np.array([-1.0, 0, 1]) / S2, pose) == 0.0
    assert epipolar_residual(f0, f0, pose) == 0.0
    f1 = np.array([-1.0, 0.1, 1])
    f1 /= np.linalg.norm(f1)
    # t x R f0 = (-1,0,0) x (0,0,1) = (0, 1, 0); residual is the y component of f1.
    assert epipolar_residual(f0, f1, pose) == pytest.approx(f1[1], abs=1e-15)
    assert epipolar_residual(f0, f1, pose) > 0


def test_epipolar_residual_scale_invariant(rng):
    R = random_rotations(rng, 1)[0]
    pose = RelativePose(R, rng.standard_normal(3))
    f0, f1 = rng.standard_normal((2, 3))
    e = epipolar_residual(f0, f1, pose)
    assert epipolar_residual(7.5 * f0, 0.01 * f1, pose) == pytest.approx(e, abs=1e-14)


def test_transform_to_frame0():
    pose = RelativePose(np.eye(3), [-1.0, 0, 0])
    np.testing.assert_allclose(transform_to_frame0(pose.t, pose), 0)
    np.testing.assert_allclose(transform_to_frame0([-1.0, 0, 1], pose), [0, 0, 1])


def test_transform_roundtrip(rng):
    R = random_rotations(rng, 50)
    t = rng.standard_normal((50, 3))
    x0 = rng.standard_normal((50, 3))
    for Ri, ti, xi in zip(R, t, x0):
        pose = RelativePose(Ri, ti)
        np.testing.assert_allclose(transform_to_frame0(Ri @ xi + ti, pose), xi, atol=1e-12)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((0, 0, 1), (0, 0, -1), 0.0),
        ((0, 0, 1), (1, 0, 1), np.pi / 4),
        ((1, 0, 0), (0, 1, 0), np.pi / 2),
    ],
)
def test_angle_between_lines_examples(a, b, expected):
    assert angle_between_lines(np.array(a, float), np.array(b, float)) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=200)
@given(vec3, vec3)
def test_angle_between_lines_symmetries(a, b):
    ang = angle_between_lines(a, b)
    assert 0.0 <= ang <= np.pi / 2
    assert angle_between_lines(b, a) == ang
    assert angle_between_lines(-a, b) == ang
    assert angle_between_lines(a, -b) == ang


def test_angle_small_is_accurate():
    eps = 1e-9
    assert angle_between_lines(np.array([0, 0, 1.0]), np.array([eps, 0, 1.0])) == pytest.approx(eps, rel=1e-9)


def test_line3d_normalizes_direction():
    L = Line3D([1, 2, 3], [0, 0, 5])
    np.testing.assert_array_equal(L.m, [0, 0, 1])
    np.testing.assert_array_equal(L(2.0), [1, 2, 5])


def test_random_rotations_orthonormal(rng):
    R = random_rotations(rng, 1000)
    err = np.abs(np.swapaxes(R, 1, 2) @ R - np.eye(3)).max()
    assert err < 1e-12
    assert np.allclose(np.linalg.det(R), 1.0, atol=1e-12)
