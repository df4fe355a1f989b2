"""Alternative midpoint triangulation (Mid2) and its inverse-depth weighted form (wMid2).

Depths come from the sine rule applied to the triangle formed by the two
camera centres and the (assumed) intersection, so they are always
non-negative. Whether the result should be trusted is decided by the
adequacy test, which checks that flipping the sign of either depth does not
bring the two ray points closer together.

The ``*_batch`` kernels take ``f0, f1`` of shape ``(N, 3)`` and ``R, t`` either
shared (``(3, 3)``, ``(3,)``) or per problem (``(N, 3, 3)``, ``(N, 3)``).
Degenerate rows come back as NaN with ``adequate`` False instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    DegenerateRays,
    DegenerateWeights,
    RelativePose,
    dot,
    norm,
    rotate,
    unit,
)

# Threshold on |R f0_hat x f1_hat| below which the rays count as parallel.
EPS_PARALLEL = 1e-12


@dataclass(frozen=True)
class CrossTriple:
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class DepthPair:
    lam0: float
    lam1: float

    def __iter__(self):
        return iter((self.lam0, self.lam1))


@dataclass(frozen=True)
class TriangulationResult:
    """A triangulated point in the frame of camera 1.

    ``adequate`` is the method's own acceptance verdict (adequacy test for
    Mid2/wMid2, depth signs for the others). Nothing is discarded here.
    """

    x1: np.ndarray
    depths: DepthPair
    adequate: bool
    method: str
    converged: bool = True


@dataclass(frozen=True)
class BatchResult:
    """Vectorized counterpart of :class:`TriangulationResult`."""

    x1: np.ndarray
    lam0: np.ndarray
    lam1: np.ndarray
    adequate: np.ndarray
    method: str
    converged: np.ndarray | None = None

    def __len__(self):
        return len(self.x1)

    def __getitem__(self, i) -> TriangulationResult:
        conv = True if self.converged is None else bool(self.converged[i])
        return TriangulationResult(
            self.x1[i], DepthPair(float(self.lam0[i]), float(self.lam1[i])),
            bool(self.adequate[i]), self.method, conv,
        )


def _rays(f0, f1, R, t):
    """Unit ray directions in frame 1 and the three cross products."""
    m0 = rotate(R, unit(f0))
    m1 = unit(f1)
    t = np.asarray(t, dtype=float)
    p = np.cross(m0, m1)
    q = np.cross(m0, t)
    r = np.cross(m1, t)
    return m0, m1, t, p, q, r


def cross_triple(f0, f1, pose: RelativePose) -> CrossTriple:
    _, _, _, p, q, r = _rays(f0, f1, pose.R, pose.t)
    return CrossTriple(p, q, r)


def depths_alt(triple: CrossTriple) -> DepthPair:
    """Sine-rule depths ``(|r| / |p|, |q| / |p|)``."""
    np_ = float(norm(triple.p))
    if np_ < EPS_PARALLEL:
        raise DegenerateRays(f"rays are parallel (|p| = {np_:.3e})")
    return DepthPair(float(norm(triple.r)) / np_, float(norm(triple.q)) / np_)


def _adequate(m0, m1, t, lam0, lam1):
    # |t + s0 A - s1 B|^2 minus the sign-independent part |t|^2 + |A|^2 + |B|^2,
    # halved: s0 a - s1 b - s0 s1 c with a = t.A, b = t.B, c = A.B.
    a = lam0 * dot(t, m0)
    b = lam1 * dot(t, m1)
    c = lam0 * lam1 * dot(m0, m1)
    same = a - b - c
    others = np.minimum(np.minimum(a + b + c, -a - b + c), -a + b - c)
    # Ties count as inadequate.
    return same < others


def adequacy_test(depths: DepthPair, f0, f1, pose: RelativePose) -> bool:
    """True when the (+, +) depth signs give the strictly closest pair of ray points."""
    lam0, lam1 = depths
    if lam0 < 0 or lam1 < 0:
        raise ValueError("adequacy_test expects non-negative depths")
    m0, m1 = rotate(pose.R, unit(f0)), unit(f1)
    return bool(_adequate(m0, m1, pose.t, lam0, lam1))


def mid2_batch(f0, f1, R, t) -> BatchResult:
    m0, m1, t, p, q, r = _rays(f0, f1, R, t)
    np_ = norm(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam0 = norm(r) / np_
        lam1 = norm(q) / np_
        ok = np_ >= EPS_PARALLEL
        lam0 = np.where(ok, lam0, np.nan)
        lam1 = np.where(ok, lam1, np.nan)
        x = 0.5 * (t + lam0[..., None] * m0 + lam1[..., None] * m1)
        adequate = ok & _adequate(m0, m1, t, lam0, lam1)
    return BatchResult(x, lam0, lam1, adequate, "mid2")


def wmid2_batch(f0, f1, R, t) -> BatchResult:
    m0, m1, t, p, q, r = _rays(f0, f1, R, t)
    np_, nq, nr = norm(p), norm(q), norm(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam0 = nr / np_
        lam1 = nq / np_
        ok = (np_ >= EPS_PARALLEL) & (nq + nr >= EPS_PARALLEL * norm(t)) & (nq + nr > 0)
        lam0 = np.where(ok, lam0, np.nan)
        lam1 = np.where(ok, lam1, np.nan)
        # Inverse-depth weighted average of t + lam0 m0 and lam1 m1.
        w = (nq / (nq + nr))[..., None]
        x = w * (t + lam0[..., None] * (m0 + m1))
        adequate = ok & _adequate(m0, m1, t, lam0, lam1)
    return BatchResult(x, lam0, lam1, adequate, "wmid2")


def _single(batch_fn, f0, f1, pose: RelativePose) -> TriangulationResult:
    f0 = np.asarray(f0, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    if f0.shape != (3,) or f1.shape != (3,):
        raise ValueError("expected single bearings of shape (3,)")
    res = batch_fn(f0[None], f1[None], pose.R, pose.t)
    return res[0]


def triangulate_mid2(f0, f1, pose: RelativePose) -> TriangulationResult:
    """Midpoint of the two ray points at the sine-rule depths."""
    depths_alt(cross_triple(f0, f1, pose))  # raises on parallel rays
    return _single(mid2_batch, f0, f1, pose)


def triangulate_wmid2(f0, f1, pose: RelativePose) -> TriangulationResult:
    """Inverse-depth weighted version of :func:`triangulate_mid2`.

    If exactly one ray is parallel to the baseline, its partner's depth is
    zero and the point collapses onto that camera centre; the adequacy test
    rejects it.
    """
    tri = cross_triple(f0, f1, pose)
    depths_alt(tri)
    s = norm(tri.q) + norm(tri.r)
    if s == 0 or s < EPS_PARALLEL * norm(pose.t):
        raise DegenerateWeights("both rays are parallel to the baseline")
    return _single(wmid2_batch, f0, f1, pose)
