"""Reference triangulators: classic midpoint, DLT, LinLS and an iterative L2 refiner."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    DegenerateRays,
    Intrinsics,
    Line3D,
    ObservationPair,
    RelativePose,
    SolveFailure,
    dot,
    norm,
    rotate,
    unit,
)
from .midpoint import (
    EPS_PARALLEL,
    BatchResult,
    CrossTriple,
    DepthPair,
    TriangulationResult,
    _rays,
    cross_triple,
)

# Relative singular-value / determinant floor for the linear solvers.
RANK_TOL = 1e-12

REFINE_MAX_ITER = 20
REFINE_STEP_TOL = 1e-10
REFINE_COST_TOL = 1e-14


@dataclass(frozen=True)
class ClosestPair:
    r0: np.ndarray
    r1: np.ndarray
    s0: float
    s1: float


def closest_points_batch(c0, m0, c1, m1):
    """Line parameters ``(s0, s1)`` of the closest pair on ``c_i + s_i m_i``.

    Directions are normalized first; rows with parallel lines give NaN.
    """
    m0, m1 = unit(m0), unit(m1)
    t = np.asarray(c0, dtype=float) - np.asarray(c1, dtype=float)
    n = np.cross(m0, m1)
    nn = dot(n, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        nn = np.where(nn >= EPS_PARALLEL**2, nn, np.nan)
        s0 = dot(n, np.cross(m1, t)) / nn
        s1 = dot(n, np.cross(m0, t)) / nn
    return s0, s1


def closest_points_skew(L0: Line3D, L1: Line3D) -> ClosestPair:
    if norm(np.cross(L0.m, L1.m)) < EPS_PARALLEL:
        raise DegenerateRays("lines are parallel")
    s0, s1 = closest_points_batch(L0.c, L0.m, L1.c, L1.m)
    return ClosestPair(L0(float(s0)), L1(float(s1)), float(s0), float(s1))


def depths_classic(triple: CrossTriple) -> DepthPair:
    """Signed depths of the common perpendicular's feet: ``p.r / p.p`` and ``p.q / p.p``."""
    pp = float(dot(triple.p, triple.p))
    if pp < EPS_PARALLEL**2:
        raise DegenerateRays("rays are parallel")
    return DepthPair(float(dot(triple.p, triple.r)) / pp, float(dot(triple.p, triple.q)) / pp)


def mid_batch(f0, f1, R, t) -> BatchResult:
    m0, m1, t, p, q, r = _rays(f0, f1, R, t)
    pp = dot(p, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        pp = np.where(pp >= EPS_PARALLEL**2, pp, np.nan)
        lam0 = dot(p, r) / pp
        lam1 = dot(p, q) / pp
    x = 0.5 * (t + lam0[..., None] * m0 + lam1[..., None] * m1)
    return BatchResult(x, lam0, lam1, (lam0 > 0) & (lam1 > 0), "mid")


def triangulate_mid_classic(f0, f1, pose: RelativePose) -> TriangulationResult:
    depths_classic(cross_triple(f0, f1, pose))
    return mid_batch(np.asarray(f0, float)[None], np.asarray(f1, float)[None], pose.R, pose.t)[0]


def _dlt_system(f0, f1, R, t):
    """Stacked ``(N, 4, 4)`` algebraic system in frame-1 homogeneous coordinates."""
    f0 = np.asarray(f0, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    R = np.asarray(R, dtype=float)
    t = np.asarray(t, dtype=float)
    n = f0.shape[0]
    # Camera 0 sees x0 = R^T x1 - R^T t; camera 1 sees x1.
    Rt = np.swapaxes(R, -1, -2)
    P0 = np.empty(np.broadcast_shapes(Rt.shape, (n, 3, 3))[:-2] + (3, 4))
    P0[..., :3] = Rt
    P0[..., 3] = -rotate(Rt, t)
    P0 = np.broadcast_to(P0, (n, 3, 4))
    P1 = np.broadcast_to(np.eye(3, 4), (n, 3, 4))
    with np.errstate(divide="ignore", invalid="ignore"):
        x0 = f0[:, :2] / f0[:, 2:]
        x1 = f1[:, :2] / f1[:, 2:]
    A = np.empty((n, 4, 4))
    A[:, 0] = x0[:, 0, None] * P0[:, 2] - P0[:, 0]
    A[:, 1] = x0[:, 1, None] * P0[:, 2] - P0[:, 1]
    A[:, 2] = x1[:, 0, None] * P1[:, 2] - P1[:, 0]
    A[:, 3] = x1[:, 1, None] * P1[:, 2] - P1[:, 1]
    return A


def _signed_depths(x, f0, f1, R, t):
    m0 = rotate(R, unit(f0))
    m1 = unit(f1)
    return dot(x - t, m0), dot(x, m1)


def dlt_batch(f0, f1, R, t) -> BatchResult:
    """Homogeneous DLT: right singular vector of the smallest singular value."""
    A = _dlt_system(f0, f1, R, t)
    finite = np.isfinite(A).all(axis=(1, 2))
    A[~finite] = 0.0
    _, s, Vt = np.linalg.svd(A)
    X = Vt[:, -1]
    w = X[:, 3]
    ok = finite & (s[:, 2] > RANK_TOL * s[:, 0]) & (np.abs(w) > RANK_TOL * norm(X[:, :3]))
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(ok[:, None], X[:, :3] / w[:, None], np.nan)
    lam0, lam1 = _signed_depths(x, f0, f1, R, t)
    return BatchResult(x, lam0, lam1, ok & (lam0 > 0) & (lam1 > 0), "dlt")


def linls_batch(f0, f1, R, t) -> BatchResult:
    """Inhomogeneous LinLS: fix the homogeneous scale to 1, solve normal equations."""
    A = _dlt_system(f0, f1, R, t)
    finite = np.isfinite(A).all(axis=(1, 2))
    A[~finite] = 0.0
    M = np.einsum("nki,nkj->nij", A[:, :, :3], A[:, :, :3])
    b = -np.einsum("nki,nk->ni", A[:, :, :3], A[:, :, 3])
    scale = np.trace(M, axis1=1, axis2=2) / 3.0
    ok = finite & (np.abs(np.linalg.det(M)) > RANK_TOL * scale**3)
    M[~ok] = np.eye(3)
    x = np.linalg.solve(M, b[..., None])[..., 0]
    x[~ok] = np.nan
    lam0, lam1 = _signed_depths(x, f0, f1, R, t)
    return BatchResult(x, lam0, lam1, ok & (lam0 > 0) & (lam1 > 0), "linls")


def _single_linear(batch_fn, obs: ObservationPair, pose: RelativePose) -> TriangulationResult:
    f0 = np.asarray(obs.f0, dtype=float).reshape(1, 3)
    f1 = np.asarray(obs.f1, dtype=float).reshape(1, 3)
    res = batch_fn(f0, f1, pose.R, pose.t)
    if not np.isfinite(res.x1).all():
        raise SolveFailure(f"{res.method}: rank-deficient system or point at infinity")
    return res[0]


def triangulate_dlt(obs: ObservationPair, pose: RelativePose) -> TriangulationResult:
    return _single_linear(dlt_batch, obs, pose)


def triangulate_linls(obs: ObservationPair, pose: RelativePose) -> TriangulationResult:
    return _single_linear(linls_batch, obs, pose)


def _residuals(theta, u0, u1, K: Intrinsics, R, t, jac=False):
    """Pixel residuals ``(N, 4)`` and optionally their Jacobian ``(N, 4, 3)``.

    ``theta = (a, b, rho)`` describes the frame-1 point ``(a, b, 1) / rho``.
    Camera 0 sees the direction ``R^T ((a, b, 1) - rho t)``, so the residuals
    stay smooth as the point passes through infinity (``rho = 0``).
    """
    a, b, rho = theta[..., 0], theta[..., 1], theta[..., 2]
    Rt = np.swapaxes(R, -1, -2)
    h = np.stack([a, b, np.ones_like(a)], axis=-1)
    v = rotate(Rt, h - rho[..., None] * t)
    res = np.empty(theta.shape[:-1] + (4,))
    with np.errstate(divide="ignore", invalid="ignore"):
        res[..., 0:2] = K.project(v) - u0
    res[..., 2] = K.fx * a + K.cx - u1[..., 0]
    res[..., 3] = K.fy * b + K.cy - u1[..., 1]
    if not jac:
        return res
    iz = 1.0 / v[..., 2]
    P = np.zeros(theta.shape[:-1] + (2, 3))
    P[..., 0, 0] = K.fx * iz
    P[..., 0, 2] = -K.fx * v[..., 0] * iz * iz
    P[..., 1, 1] = K.fy * iz
    P[..., 1, 2] = -K.fy * v[..., 1] * iz * iz
    dv = np.empty(theta.shape[:-1] + (3, 3))
    dv[..., :, 0] = Rt[..., :, 0]
    dv[..., :, 1] = Rt[..., :, 1]
    dv[..., :, 2] = -rotate(Rt, t)
    J = np.zeros(theta.shape[:-1] + (4, 3))
    J[..., 0:2, :] = np.einsum("...ij,...jk->...ik", P, dv)
    J[..., 2, 0] = K.fx
    J[..., 3, 1] = K.fy
    return res, J


def _cost(res):
    c = np.einsum("...i,...i->...", res, res)
    return np.where(np.isfinite(c), c, np.inf)


def _to_point(theta):
    with np.errstate(divide="ignore", invalid="ignore"):
        a, b, rho = theta[..., 0], theta[..., 1], theta[..., 2]
        return np.stack([a, b, np.ones_like(a)], axis=-1) / rho[..., None]


def refine_l2_batch(x_init, u0, u1, K: Intrinsics, R, t, method="l2it") -> BatchResult:
    """Gauss-Newton on the summed squared pixel reprojection error.

    The point is parametrized by its normalized coordinates in camera 1 and
    its inverse depth, so the search can cross the plane at infinity; an
    optimum beyond it ends up behind a camera and is flagged not adequate.
    On a cost increase the step is retried with Levenberg damping grown
    tenfold, so accepted iterates never raise the cost.
    """
    x = np.asarray(x_init, dtype=float)
    n = x.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.stack([x[:, 0] / x[:, 2], x[:, 1] / x[:, 2], 1.0 / x[:, 2]], axis=-1)
    u0 = np.broadcast_to(np.asarray(u0, dtype=float), (n, 2))
    u1 = np.broadcast_to(np.asarray(u1, dtype=float), (n, 2))
    R = np.asarray(R, dtype=float)
    t = np.asarray(t, dtype=float)
    per_row = R.ndim == 3
    if t.ndim == 1:
        t = np.broadcast_to(t, (n, 3))

    cost = _cost(_residuals(theta, u0, u1, K, R, t))
    finite = np.isfinite(cost) & np.isfinite(theta).all(axis=-1)
    converged = np.zeros(n, dtype=bool)
    converged[finite & (cost == 0)] = True
    active = finite & ~converged
    mu = np.zeros(n)

    for _ in range(REFINE_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ri, ti = (R[idx] if per_row else R), t[idx]
        th = theta[idx]
        res, J = _residuals(th, u0[idx], u1[idx], K, Ri, ti, jac=True)
        H = np.einsum("nki,nkj->nij", J, J)
        g = np.einsum("nki,nk->ni", J, res)
        diag = np.einsum("nii->ni", H)
        H = H + (mu[idx, None] * diag)[:, :, None] * np.eye(3)
        with np.errstate(all="ignore"):
            singular = ~(np.abs(np.linalg.det(H)) > 0)
            H[singular] = np.eye(3)
            step = -np.linalg.solve(H, g[..., None])[..., 0]
        step[singular] = 0.0
        th_new = th + step
        cost_new = _cost(_residuals(th_new, u0[idx], u1[idx], K, Ri, ti))
        better = cost_new < cost[idx]
        small_step = norm(step) < REFINE_STEP_TOL * (1.0 + norm(th))
        acc = idx[better]
        theta[acc] = th_new[better]
        decrease = cost[idx] - np.where(better, cost_new, cost[idx])
        cost[acc] = cost_new[better]
        mu[acc] = mu[acc] / 10.0
        rej = idx[~better]
        mu[rej] = np.where(mu[rej] == 0.0, 1e-4, mu[rej] * 10.0)
        done = small_step | (better & (decrease < REFINE_COST_TOL)) | (cost[idx] == 0)
        converged[idx[done]] = True
        active[idx[done]] = False

    x = _to_point(theta)
    x[~finite] = np.asarray(x_init, dtype=float)[~finite]
    # Distance from each camera centre, negative when behind that camera.
    with np.errstate(invalid="ignore"):
        z0 = rotate(np.swapaxes(R, -1, -2), x - t)[..., 2]
        z1 = x[..., 2]
        lam0 = np.copysign(norm(x - t), z0)
        lam1 = np.copysign(norm(x), z1)
        ok = (z0 > 0) & (z1 > 0) & np.isfinite(cost) & np.isfinite(x).all(axis=-1)
    return BatchResult(x, lam0, lam1, ok, method, converged)


def refine_l2(init: TriangulationResult, obs: ObservationPair, pose: RelativePose) -> TriangulationResult:
    if obs.intrinsics is None or obs.u0 is None or obs.u1 is None:
        raise ValueError("refine_l2 needs pixel observations and intrinsics")
    res = refine_l2_batch(
        np.asarray(init.x1, dtype=float).reshape(1, 3),
        np.asarray(obs.u0, dtype=float).reshape(1, 2),
        np.asarray(obs.u1, dtype=float).reshape(1, 2),
        obs.intrinsics, pose.R, pose.t,
    )
    return res[0]
