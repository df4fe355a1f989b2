"""Throughput of the triangulation kernels on an in-memory batch."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .run import parse_methods, triangulate
from .synthgen import Dataset, build_dataset, grid


@dataclass(frozen=True)
class TimingRow:
    method: str
    points_per_second: float
    batch_size: int
    repetitions: int
    seconds_median: float


def tile_dataset(ds: Dataset, n: int) -> Dataset:
    """Repeat problems until the batch holds ``n`` rows."""
    idx = np.resize(np.arange(len(ds)), n)
    return Dataset(
        id=np.arange(n), config=ds.config[idx], d=ds.d[idx], sigma=ds.sigma[idx],
        R=np.ascontiguousarray(ds.R[idx]), t=np.ascontiguousarray(ds.t[idx]),
        f0=np.ascontiguousarray(ds.f0[idx]), f1=np.ascontiguousarray(ds.f1[idx]),
        u0=np.ascontiguousarray(ds.u0[idx]), u1=np.ascontiguousarray(ds.u1[idx]),
        x_true=ds.x_true[idx], beta_true=ds.beta_true[idx], K=ds.K,
    )


def benchmark_batch(n: int = 1_000_000, seed: int = 42, points_per_cell: int = 50) -> Dataset:
    return tile_dataset(build_dataset(grid(n_points=points_per_cell, seed=seed)), n)


def time_methods(ds: Dataset, methods, repetitions: int = 3) -> list[TimingRow]:
    """Median wall time per method; repetitions interleave methods to spread drift evenly.

    Each call starts from raw bearings, so normalization and the method's
    acceptance test are inside the timed region.
    """
    methods = parse_methods(methods)
    if repetitions < 3:
        raise ValueError("use at least 3 repetitions")
    for m in methods:  # warm-up
        triangulate(ds, m)
    times = {m: [] for m in methods}
    for _ in range(repetitions):
        for m in methods:
            t0 = time.perf_counter()
            triangulate(ds, m)
            times[m].append(time.perf_counter() - t0)
    rows = []
    for m in methods:
        med = float(np.median(times[m]))
        rows.append(TimingRow(m, len(ds) / med, len(ds), repetitions, med))
    return rows
