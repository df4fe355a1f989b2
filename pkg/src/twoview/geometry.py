"""Camera model, poses and small vector helpers shared by the triangulators.

Convention: a point seen by two cameras satisfies ``x1 = R @ x0 + t``.
Every helper here broadcasts over leading axes, so a single bearing of
shape ``(3,)`` and a batch of shape ``(N, 3)`` go through the same code.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ORTHO_TOL = 1e-12


class DegenerateRays(ValueError):
    """Raised when two rays are (numerically) parallel."""


class DegenerateWeights(ValueError):
    """Raised when the inverse-depth weights cannot be formed."""


class SolveFailure(np.linalg.LinAlgError):
    """Raised when a linear triangulation system is rank deficient."""


def dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def norm(a):
    return np.sqrt(dot(a, a))


def unit(a):
    a = np.asarray(a, dtype=float)
    return a / norm(a)[..., None]


def rotate(R, v):
    """Apply ``R`` (shape ``(3, 3)`` or ``(..., 3, 3)``) to vectors ``v``."""
    return np.einsum("...ij,...j->...i", R, v)


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def project(self, x):
        """Perspective projection of camera-frame points to pixel coordinates ``(..., 2)``."""
        x = np.asarray(x, dtype=float)
        z = x[..., 2]
        return np.stack(
            [self.fx * x[..., 0] / z + self.cx, self.fy * x[..., 1] / z + self.cy], axis=-1
        )


@dataclass(frozen=True)
class RelativePose:
    """Rigid transform from camera 0 to camera 1: ``x1 = R x0 + t``."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.array(self.R, dtype=float).reshape(3, 3)
        t = np.array(self.t, dtype=float).reshape(3)
        if np.abs(R.T @ R - np.eye(3)).max() > ORTHO_TOL or abs(np.linalg.det(R) - 1.0) > ORTHO_TOL:
            raise ValueError("R is not a proper rotation matrix")
        R.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity_rotation(cls, t) -> "RelativePose":
        return cls(np.eye(3), t)


@dataclass(frozen=True)
class Line3D:
    """Line ``c + s * m`` with unit direction ``m``."""

    c: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float).reshape(3)
        m = np.array(self.m, dtype=float).reshape(3)
        n = np.linalg.norm(m)
        if n == 0:
            raise ValueError("line direction must be nonzero")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "m", m / n)

    def __call__(self, s):
        return self.c + np.multiply.outer(s, self.m)


def backproject(u, K: Intrinsics, normalize: bool = False) -> np.ndarray:
    """Ray direction ``K^-1 u`` for pixel ``u``.

    ``u`` may be a homogeneous ``(..., 3)`` array or plain ``(..., 2)`` pixels.
    The unnormalized result has third component 1 for homogeneous input with
    last entry 1.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-1] == 2:
        w = np.ones(u.shape[:-1])
        uu, vv = u[..., 0], u[..., 1]
    else:
        uu, vv, w = u[..., 0], u[..., 1], u[..., 2]
    f = np.stack([(uu - K.cx * w) / K.fx, (vv - K.cy * w) / K.fy, w], axis=-1)
    return unit(f) if normalize else f


@dataclass(frozen=True)
class ObservationPair:
    """One correspondence: bearings ``f0``, ``f1`` and, optionally, their pixels.

    Build with :meth:`from_pixels` when intrinsics are known; bearings from
    non-pinhole cameras can be passed straight to the constructor.
    """

    f0: np.ndarray
    f1: np.ndarray
    u0: np.ndarray | None = None
    u1: np.ndarray | None = None
    intrinsics: Intrinsics | None = field(default=None)

    @classmethod
    def from_pixels(cls, u0, u1, K: Intrinsics) -> "ObservationPair":
        u0 = np.asarray(u0, dtype=float)
        u1 = np.asarray(u1, dtype=float)
        return cls(backproject(u0, K), backproject(u1, K), u0[..., :2], u1[..., :2], K)


def epipolar_residual(f0, f1, pose: RelativePose):
    """Scalar triple product ``f1 . (t x R f0)`` on unit bearings."""
    return dot(unit(f1), np.cross(pose.t, rotate(pose.R, unit(f0))))


def transform_to_frame0(x1, pose: RelativePose):
    """Express a frame-1 point in frame 0: ``R^T (x1 - t)``."""
    return np.einsum("ji,...j->...i", pose.R, np.asarray(x1, dtype=float) - pose.t)


def angle_between_lines(a, b):
    """Unsigned angle between two lines, in ``[0, pi/2]``.

    Uses atan2 of the sine and |cosine|, which stays accurate for nearly
    parallel and nearly perpendicular directions.
    """
    a = unit(a)
    b = unit(b)
    return np.arctan2(norm(np.cross(a, b)), np.abs(dot(a, b)))


def rotation_about_axis(axis: int, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    R = np.eye(3)
    R[i, i] = R[j, j] = c
    R[i, j] = -s
    R[j, i] = s
    return R


def orthonormalize(R) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius sense."""
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        U[:, -1] *= -1
        Q = U @ Vt
    return Q
