import numpy as np
import pytest

from twoview import Intrinsics


def random_rotations(rng, n, max_angle=np.pi):
    """Rotations about uniform random axes with angles up to ``max_angle`` (Rodrigues)."""
    axis = rng.standard_normal((n, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    ang = rng.uniform(0, max_angle, n)
    Kx = np.zeros((n, 3, 3))
    Kx[:, 0, 1], Kx[:, 0, 2], Kx[:, 1, 2] = -axis[:, 2], axis[:, 1], -axis[:, 0]
    Kx = Kx - np.swapaxes(Kx, 1, 2)
    s, c = np.sin(ang)[:, None, None], np.cos(ang)[:, None, None]
    return np.eye(3) + s * Kx + (1 - c) * Kx @ Kx


def intersecting_instances(rng, n, max_angle=0.5):
    """Noise-free problems with the point in front of both cameras.

    Returns ``f0, f1, R, t, x1`` with the bearings deliberately unnormalized.
    """
    out = []
    need = n
    while need > 0:
        m = 2 * need + 16
        R = random_rotations(rng, m, max_angle)
        t = rng.standard_normal((m, 3))
        t *= rng.uniform(0.5, 2.0, (m, 1)) / np.linalg.norm(t, axis=1, keepdims=True)
        d = rng.standard_normal((m, 3)) * [0.4, 0.4, 0.0] + [0, 0, 1]
        x1 = d / np.linalg.norm(d, axis=1, keepdims=True) * rng.uniform(1.0, 10.0, (m, 1))
        x0 = np.einsum("nji,nj->ni", R, x1 - t)
        ok = (x1[:, 2] > 0.2 * np.linalg.norm(x1, axis=1)) & (x0[:, 2] > 0.2 * np.linalg.norm(x0, axis=1))
        # Keep the parallax away from zero so the linear solvers stay well conditioned.
        cosb = np.einsum("ni,ni->n", x1, x1 - t) / np.linalg.norm(x1, axis=1) / np.linalg.norm(x1 - t, axis=1)
        ok &= cosb < np.cos(np.radians(2.0))
        idx = np.flatnonzero(ok)[:need]
        scale0 = rng.uniform(0.1, 10.0, (len(idx), 1))
        scale1 = rng.uniform(0.1, 10.0, (len(idx), 1))
        out.append((x0[idx] * scale0, x1[idx] * scale1, R[idx], t[idx], x1[idx]))
        need -= len(idx)
    return tuple(np.concatenate([o[k] for o in out]) for k in range(5))


def skew_instances(rng, n):
    """Random bearings and poses, rays generally skew."""
    f0 = rng.standard_normal((n, 3))
    f1 = rng.standard_normal((n, 3))
    R = random_rotations(rng, n)
    t = rng.standard_normal((n, 3))
    return f0, f1, R, t


def normal_equation_oracle(c0, m0, c1, m1):
    """Minimize |c0 + s0 m0 - c1 - s1 m1|^2 through its 2x2 normal equations."""
    m0 = m0 / np.linalg.norm(m0, axis=-1, keepdims=True)
    m1 = m1 / np.linalg.norm(m1, axis=-1, keepdims=True)
    w = c0 - c1
    a = np.einsum("ni,ni->n", m0, m0)
    b = np.einsum("ni,ni->n", m0, m1)
    c = np.einsum("ni,ni->n", m1, m1)
    A = np.stack([np.stack([a, -b], -1), np.stack([b, -c], -1)], -2)
    rhs = np.stack([-np.einsum("ni,ni->n", m0, w), -np.einsum("ni,ni->n", m1, w)], -1)
    s = np.linalg.solve(A, rhs[..., None])[..., 0]
    return s[:, 0], s[:, 1]


@pytest.fixture
def rng():
    return np.random.default_rng(20260418)


@pytest.fixture
def K512():
    return Intrinsics(512.0, 512.0, 512.0, 512.0)
