"""Error measures for a triangulated point: 3D, 2D reprojection, parallax."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import (
    Intrinsics,
    ObservationPair,
    RelativePose,
    angle_between_lines,
    norm,
    rotate,
)


class Norm(str, Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


class UndefinedParallax(ValueError):
    pass


@dataclass(frozen=True)
class ErrorRecord:
    e3d: float
    d0: float
    d1: float
    e_l1: float
    e_l2: float
    e_linf: float
    beta_raw: float
    beta_est: float
    beta_err: float
    adequate: bool
    method: str


def error_3d(x_est, x_true):
    return norm(np.asarray(x_est, dtype=float) - np.asarray(x_true, dtype=float))


def reprojection_errors_batch(x1, u0, u1, K: Intrinsics, R, t):
    """Pixel distances ``(d0, d1)``; ``inf`` where the point is not in front of a camera."""
    x1 = np.asarray(x1, dtype=float)
    x0 = rotate(np.swapaxes(np.asarray(R, dtype=float), -1, -2), x1 - t)
    out = []
    for xc, u in ((x0, u0), (x1, u1)):
        with np.errstate(divide="ignore", invalid="ignore"):
            d = norm(K.project(xc) - u)
        out.append(np.where(xc[..., 2] > 0, d, np.inf))
    return out[0], out[1]


def reprojection_errors(x1_est, obs: ObservationPair, pose: RelativePose):
    if obs.intrinsics is None:
        raise ValueError("reprojection errors are measured in pixels and need intrinsics")
    K = obs.intrinsics
    u0 = obs.u0 if obs.u0 is not None else K.project(obs.f0)
    u1 = obs.u1 if obs.u1 is not None else K.project(obs.f1)
    d0, d1 = reprojection_errors_batch(x1_est, u0, u1, K, pose.R, pose.t)
    return float(d0), float(d1)


def norm_aggregate(d0, d1, which="l2"):
    which = Norm(which)
    if which is Norm.L1:
        return d0 + d1
    if which is Norm.L2:
        return np.hypot(d0, d1)
    return np.maximum(d0, d1)


def parallax_estimate(x1_est, t):
    """Angle subtended at the estimate by the two camera centres."""
    x1_est = np.asarray(x1_est, dtype=float)
    t = np.asarray(t, dtype=float)
    scale = max(float(norm(t)), 1.0)
    if np.min(norm(x1_est)) <= 1e-15 * scale or np.min(norm(x1_est - t)) <= 1e-15 * scale:
        raise UndefinedParallax("estimate coincides with a camera centre")
    return angle_between_lines(x1_est, x1_est - t)


def parallax_error(beta_true, beta_est):
    """``|beta_true - beta_est|`` and the sign of ``beta_est - beta_true`` (+1 over, -1 under)."""
    diff = np.asarray(beta_est, dtype=float) - np.asarray(beta_true, dtype=float)
    return np.abs(diff), np.sign(diff).astype(int)


def raw_parallax(f0, f1, pose: RelativePose):
    return angle_between_lines(rotate(pose.R, np.asarray(f0, dtype=float)), f1)


def relative_impact(beta, delta=np.radians(0.5)):
    """Ratio of the distance errors from under- and overestimating a parallax angle.

    Distance to a point seen under parallax ``beta`` scales with
    ``cot(beta / 2)``; the ratio compares shifting ``beta`` down vs. up by
    ``delta``.
    """
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= delta) or np.any(beta >= np.pi - delta):
        raise ValueError("relative_impact needs delta < beta < pi - delta")

    def cot(a):
        return 1.0 / np.tan(a)

    base = cot(beta / 2)
    return np.abs((cot((beta - delta) / 2) - base) / (cot((beta + delta) / 2) - base))


def error_record(x1_est, adequate, method, obs: ObservationPair, pose: RelativePose, x_true) -> ErrorRecord:
    """Every error measure of one estimate, with the true parallax taken from ``x_true``."""
    d0, d1 = reprojection_errors(x1_est, obs, pose)
    beta_true = float(angle_between_lines(x_true, np.asarray(x_true) - pose.t))
    beta_est = float(parallax_estimate(x1_est, pose.t))
    return ErrorRecord(
        e3d=float(error_3d(x1_est, x_true)),
        d0=d0,
        d1=d1,
        e_l1=float(norm_aggregate(d0, d1, "l1")),
        e_l2=float(norm_aggregate(d0, d1, "l2")),
        e_linf=float(norm_aggregate(d0, d1, "linf")),
        beta_raw=float(raw_parallax(obs.f0, obs.f1, pose)),
        beta_est=beta_est,
        beta_err=float(abs(beta_true - beta_est)),
        adequate=bool(adequate),
        method=method,
    )
