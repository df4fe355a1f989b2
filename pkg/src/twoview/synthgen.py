"""Synthetic two-view triangulation problems.

Each grid cell ``(config, d, sigma)`` gets its own cloud of points centred
at ``(0, 0, d)``, its own perturbed camera pair and its own pixel noise.

Randomness: every point draws from a Philox4x64-10 generator (numpy's
``np.random.Philox``) with the 128-bit key ``(seed, cloud_id << 32 | point)``
and counter 0. ``cloud_id`` is the first 4 bytes (little endian) of
``blake2b("{config}|{d!r}|{sigma!r}", digest_size=4)``, and the pose
perturbation of a cloud uses point index ``0xFFFFFFFF``. A point draws 8
standard normals in this order: radius, direction x/y/z, noise u0, v0, u1,
v1. A cloud's pose stream draws 12 uniforms on [0, 1): camera 0 translation
x/y/z then rotation about x/y/z, then the same for camera 1. A cell
therefore comes out the same whether it is generated alone, inside a
larger grid, or on any number of workers.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .geometry import (
    Intrinsics,
    ObservationPair,
    RelativePose,
    angle_between_lines,
    orthonormalize,
    rotation_about_axis,
    unit,
)

CONFIGS = ("orbital", "lateral", "forward", "diagonal")
DEFAULT_D = tuple(2.0**n for n in range(-1, 7))
DEFAULT_SIGMA = tuple(float(s) for s in range(1, 9))
POSE_STREAM = 0xFFFFFFFF
POSE_NOISE = 0.01


class UnknownConfig(ValueError):
    pass


@dataclass(frozen=True)
class SceneConfig:
    config: str
    d: float
    sigma: float
    n_points: int = 200
    seed: int = 42
    image_size: int = 1024
    focal: float = 512.0

    @property
    def intrinsics(self) -> Intrinsics:
        c = self.image_size / 2.0
        return Intrinsics(self.focal, self.focal, c, c)


@dataclass(frozen=True)
class CameraPose:
    """World-to-camera transform ``x_cam = R @ X + t``."""

    R: np.ndarray
    t: np.ndarray

    @property
    def center(self) -> np.ndarray:
        return -self.R.T @ self.t


@dataclass(frozen=True)
class Problem:
    id: int
    config: str
    d: float
    sigma: float
    pose: RelativePose
    obs: ObservationPair
    x_true: np.ndarray
    beta_true: float


def cloud_id(config: str, d: float, sigma: float) -> int:
    h = hashlib.blake2b(f"{config}|{float(d)!r}|{float(sigma)!r}".encode(), digest_size=4)
    return int.from_bytes(h.digest(), "little")


def point_rng(seed: int, cloud: int, point: int) -> np.random.Generator:
    key = (int(seed) % 2**64) | (((cloud << 32) | point) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def look_at(center, target=None, up=(0.0, 1.0, 0.0)) -> CameraPose:
    """Camera at ``center`` whose optical axis points at ``target`` (``None``: along +z)."""
    center = np.asarray(center, dtype=float)
    z = np.array([0.0, 0.0, 1.0])
    # A target at the camera centre (forward rig with d = 0.5) keeps the +z axis.
    if target is not None and np.linalg.norm(np.asarray(target, float) - center) > 1e-12:
        z = unit(np.asarray(target, float) - center)
    x = unit(np.cross(up, z))
    y = np.cross(z, x)
    R = np.stack([x, y, z])
    return CameraPose(R, -R @ center)


def camera_config(name: str, d: float) -> tuple[CameraPose, CameraPose]:
    target = np.array([0.0, 0.0, d])
    if name == "orbital":
        return look_at((-0.5, 0, 0), target), look_at((0.5, 0, 0), target)
    if name == "lateral":
        return look_at((-0.5, 0, 0)), look_at((0.5, 0, 0))
    if name == "forward":
        return look_at((0, 0, -0.5), target), look_at((0, 0, 0.5), target)
    if name == "diagonal":
        c = np.full(3, np.sqrt(3) / 6)
        return look_at(-c), look_at(c)
    raise UnknownConfig(f"unknown camera configuration {name!r}; choose from {CONFIGS}")


def perturb_pose(pose: CameraPose, rng: np.random.Generator, width: float = POSE_NOISE) -> CameraPose:
    """Add U(0, width) to each translation component and rotate by U(0, width) rad about x, y, z."""
    u = rng.random(6) * width
    R = pose.R
    for axis in range(3):
        R = rotation_about_axis(axis, u[3 + axis]) @ R
    return CameraPose(orthonormalize(R), pose.t + u[:3])


def relative_pose(cam0: CameraPose, cam1: CameraPose) -> RelativePose:
    R = cam1.R @ cam0.R.T
    return RelativePose(orthonormalize(R), cam1.t - R @ cam0.t)


def _draws(cfg: SceneConfig, cloud: int, n_points: int) -> np.ndarray:
    return np.stack([point_rng(cfg.seed, cloud, i).standard_normal(8) for i in range(n_points)])


def generate_cloud(d: float, n_points: int, rng=None, *, draws=None) -> np.ndarray:
    """Points ``(0, 0, d) + |N(0, (d/4)^2)| * uniform direction``.

    Pass either a generator or precomputed ``(n, 4)`` standard normals
    (radius, then direction).
    """
    if d <= 0:
        raise ValueError("cloud distance d must be positive")
    if draws is None:
        draws = rng.standard_normal((n_points, 4))
    radius = np.abs(draws[:, 0]) * (d / 4.0)
    direction = unit(draws[:, 1:4])
    return np.array([0.0, 0.0, d]) + radius[:, None] * direction


def project_and_noise(x_world, cam: CameraPose, K: Intrinsics, sigma: float, rng=None, *,
                      image_size: int = 1024, noise=None):
    """Noisy pixels ``(..., 2)`` and a visibility mask.

    A point is rejected when it is not in front of the camera or its
    noise-free projection falls outside ``[0, image_size)^2``. ``noise``
    (standard normals, same shape as the pixels) overrides ``rng``.
    """
    xc = np.einsum("ij,...j->...i", cam.R, np.asarray(x_world, dtype=float)) + cam.t
    front = xc[..., 2] > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        px = K.project(xc)
    inside = front & np.all((px >= 0) & (px < image_size), axis=-1)
    if noise is None:
        noise = rng.standard_normal(px.shape) if sigma > 0 else np.zeros(px.shape)
    return px + sigma * noise, inside


@dataclass
class Dataset:
    """Problems stored column-wise; index or iterate to get :class:`Problem` objects."""

    id: np.ndarray
    config: np.ndarray
    d: np.ndarray
    sigma: np.ndarray
    R: np.ndarray
    t: np.ndarray
    f0: np.ndarray
    f1: np.ndarray
    u0: np.ndarray
    u1: np.ndarray
    x_true: np.ndarray
    beta_true: np.ndarray
    K: Intrinsics
    rejected: int = 0

    def __len__(self) -> int:
        return len(self.id)

    def __getitem__(self, i) -> Problem:
        return Problem(
            int(self.id[i]), str(self.config[i]), float(self.d[i]), float(self.sigma[i]),
            RelativePose(self.R[i], self.t[i]),
            ObservationPair(self.f0[i], self.f1[i], self.u0[i], self.u1[i], self.K),
            self.x_true[i], float(self.beta_true[i]),
        )

    def __iter__(self) -> Iterator[Problem]:
        return (self[i] for i in range(len(self)))

    @classmethod
    def concatenate(cls, parts: Sequence["Dataset"]) -> "Dataset":
        parts = list(parts)
        cols = {}
        for name in ("config", "d", "sigma", "R", "t", "f0", "f1", "u0", "u1", "x_true", "beta_true"):
            cols[name] = np.concatenate([getattr(p, name) for p in parts])
        n = sum(len(p) for p in parts)
        return cls(id=np.arange(n), K=parts[0].K, rejected=sum(p.rejected for p in parts), **cols)


def generate_cell(cfg: SceneConfig) -> Dataset:
    """One ``(config, d, sigma)`` cell: cloud, perturbed cameras, noisy pixels."""
    K = cfg.intrinsics
    cloud = cloud_id(cfg.config, cfg.d, cfg.sigma)
    cam0, cam1 = camera_config(cfg.config, cfg.d)
    pose_rng = point_rng(cfg.seed, cloud, POSE_STREAM)
    cam0 = perturb_pose(cam0, pose_rng)
    cam1 = perturb_pose(cam1, pose_rng)
    pose = relative_pose(cam0, cam1)

    draws = _draws(cfg, cloud, cfg.n_points) if cfg.n_points else np.zeros((0, 8))
    X = generate_cloud(cfg.d, cfg.n_points, draws=draws[:, :4])
    u0, vis0 = project_and_noise(X, cam0, K, cfg.sigma, image_size=cfg.image_size, noise=draws[:, 4:6])
    u1, vis1 = project_and_noise(X, cam1, K, cfg.sigma, image_size=cfg.image_size, noise=draws[:, 6:8])
    keep = vis0 & vis1
    n = int(keep.sum())

    x_true = X[keep] @ cam1.R.T + cam1.t
    u0, u1 = u0[keep], u1[keep]
    ones = np.ones((n, 1))
    Kinv = np.linalg.inv(K.K)
    f0 = np.hstack([u0, ones]) @ Kinv.T
    f1 = np.hstack([u1, ones]) @ Kinv.T
    return Dataset(
        id=np.arange(n),
        config=np.full(n, cfg.config, dtype=object),
        d=np.full(n, float(cfg.d)),
        sigma=np.full(n, float(cfg.sigma)),
        R=np.broadcast_to(pose.R, (n, 3, 3)).copy(),
        t=np.broadcast_to(pose.t, (n, 3)).copy(),
        f0=f0, f1=f1, u0=u0, u1=u1,
        x_true=x_true,
        beta_true=angle_between_lines(x_true, x_true - pose.t),
        K=K,
        rejected=cfg.n_points - n,
    )


def grid(configs=CONFIGS, ds=DEFAULT_D, sigmas=DEFAULT_SIGMA, **kw) -> list[SceneConfig]:
    return [SceneConfig(c, float(d), float(s), **kw) for c in configs for d in ds for s in sigmas]


def build_dataset(cells: Sequence[SceneConfig], workers: int = 1) -> Dataset:
    """Generate and concatenate cells in the given order."""
    cells = list(cells)
    if not cells:
        raise ValueError("empty configuration grid")
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(generate_cell, cells))
    else:
        parts = [generate_cell(c) for c in cells]
    return Dataset.concatenate(parts)
