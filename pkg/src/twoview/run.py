"""Run triangulation methods over a dataset and score every estimate."""
from __future__ import annotations

import numpy as np

from .baselines import dlt_batch, linls_batch, mid_batch, refine_l2_batch
from .geometry import angle_between_lines, rotate
from .metrics import reprojection_errors_batch
from .midpoint import BatchResult, mid2_batch, wmid2_batch
from .synthgen import Dataset

METHODS = ("mid", "mid2", "wmid2", "dlt", "linls", "l2it")


class UnknownMethod(ValueError):
    pass


def _l2it(ds: Dataset) -> BatchResult:
    init = wmid2_batch(ds.f0, ds.f1, ds.R, ds.t)
    return refine_l2_batch(init.x1, ds.u0, ds.u1, ds.K, ds.R, ds.t)


_KERNELS = {
    "mid": lambda ds: mid_batch(ds.f0, ds.f1, ds.R, ds.t),
    "mid2": lambda ds: mid2_batch(ds.f0, ds.f1, ds.R, ds.t),
    "wmid2": lambda ds: wmid2_batch(ds.f0, ds.f1, ds.R, ds.t),
    "dlt": lambda ds: dlt_batch(ds.f0, ds.f1, ds.R, ds.t),
    "linls": lambda ds: linls_batch(ds.f0, ds.f1, ds.R, ds.t),
    "l2it": _l2it,
}


def parse_methods(spec) -> list[str]:
    names = [m.strip().lower() for m in (spec.split(",") if isinstance(spec, str) else spec)]
    names = [m for m in names if m]
    bad = [m for m in names if m not in _KERNELS]
    if bad or not names:
        raise UnknownMethod(f"unknown method(s) {bad}; choose from {','.join(METHODS)}")
    return names


def triangulate(ds: Dataset, method: str) -> BatchResult:
    try:
        return _KERNELS[method](ds)
    except KeyError:
        raise UnknownMethod(method) from None


def score(ds: Dataset, res: BatchResult) -> dict:
    """Per-problem error columns (angles in degrees) for one method."""
    x = res.x1
    d0, d1 = reprojection_errors_batch(x, ds.u0, ds.u1, ds.K, ds.R, ds.t)
    with np.errstate(invalid="ignore"):
        beta_est = angle_between_lines(x, x - ds.t)
    beta_raw = angle_between_lines(rotate(ds.R, ds.f0), ds.f1)
    deg = np.degrees
    return {
        "id": ds.id,
        "config": ds.config,
        "d": ds.d,
        "sigma": ds.sigma,
        "method": np.full(len(ds), res.method, dtype=object),
        "adequate": np.asarray(res.adequate, dtype=bool),
        "e3d": np.linalg.norm(x - ds.x_true, axis=-1),
        "d0": d0,
        "d1": d1,
        "e_l1": d0 + d1,
        "e_l2": np.hypot(d0, d1),
        "e_linf": np.maximum(d0, d1),
        "beta_raw_deg": deg(beta_raw),
        "beta_true_deg": deg(ds.beta_true),
        "beta_est_deg": deg(beta_est),
        "beta_signed_err_deg": deg(beta_est) - deg(ds.beta_true),
    }


def _run_chunk(args):
    ds, methods = args
    return [score(ds, triangulate(ds, m)) for m in methods]


def _take(ds: Dataset, sl: slice) -> Dataset:
    return Dataset(
        id=ds.id[sl], config=ds.config[sl], d=ds.d[sl], sigma=ds.sigma[sl], R=ds.R[sl], t=ds.t[sl],
        f0=ds.f0[sl], f1=ds.f1[sl], u0=ds.u0[sl], u1=ds.u1[sl], x_true=ds.x_true[sl],
        beta_true=ds.beta_true[sl], K=ds.K,
    )


def run_methods(ds: Dataset, methods, workers: int = 1) -> dict:
    """Score every problem with every method.

    Rows are ordered method-major, then by problem id, whatever the worker count.
    """
    methods = parse_methods(methods)
    if workers > 1 and len(ds) > workers:
        from concurrent.futures import ProcessPoolExecutor

        bounds = np.linspace(0, len(ds), workers + 1).astype(int)
        chunks = [(_take(ds, slice(a, b)), methods) for a, b in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_run_chunk, chunks))
        per_method = [[p[k] for p in parts] for k in range(len(methods))]
    else:
        per_method = [[c] for c in _run_chunk((ds, methods))]
    blocks = [b for chunk_list in per_method for b in chunk_list]
    return {k: np.concatenate([b[k] for b in blocks]) for k in blocks[0]}
