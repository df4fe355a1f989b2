"""Tab-separated dataset and results files (header line, 17 significant digits)."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .geometry import Intrinsics
from .synthgen import Dataset

DATASET_COLUMNS = (
    ["id", "config", "d", "sigma"]
    + [f"R{i}{j}" for i in range(3) for j in range(3)]
    + ["tx", "ty", "tz"]
    + ["f0x", "f0y", "f0z", "f1x", "f1y", "f1z"]
    + ["u0", "v0", "u1", "v1"]
    + ["xx", "xy", "xz", "beta_true"]
    + ["fx", "fy", "cx", "cy"]
)

RESULT_COLUMNS = [
    "id", "config", "d", "sigma", "method", "adequate", "e3d", "d0", "d1",
    "e_l1", "e_l2", "e_linf", "beta_raw_deg", "beta_true_deg", "beta_est_deg",
    "beta_signed_err_deg",
]

_STR_COLUMNS = {"config", "method"}


def fmt(v) -> str:
    return "%.17g" % v


def write_dataset(path, ds: Dataset) -> None:
    n = len(ds)
    num = np.hstack([
        ds.d[:, None], ds.sigma[:, None], ds.R.reshape(n, 9), ds.t, ds.f0, ds.f1,
        ds.u0, ds.u1, ds.x_true, ds.beta_true[:, None],
        np.tile([ds.K.fx, ds.K.fy, ds.K.cx, ds.K.cy], (n, 1)),
    ])
    with open(path, "w", newline="") as fh:
        fh.write("\t".join(DATASET_COLUMNS) + "\n")
        for i in range(n):
            fh.write(f"{int(ds.id[i])}\t{ds.config[i]}\t" + "\t".join(map(fmt, num[i])) + "\n")


def read_dataset(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader)
        if header != DATASET_COLUMNS:
            raise ValueError(f"{path}: not a dataset file (unexpected header)")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: dataset is empty")
    ids = np.array([int(r[0]) for r in rows])
    config = np.array([r[1] for r in rows], dtype=object)
    num = np.array([r[2:] for r in rows], dtype=float)
    n = len(rows)
    fx, fy, cx, cy = num[0, -4:]
    return Dataset(
        id=ids, config=config, d=num[:, 0], sigma=num[:, 1],
        R=num[:, 2:11].reshape(n, 3, 3), t=num[:, 11:14],
        f0=num[:, 14:17], f1=num[:, 17:20], u0=num[:, 20:22], u1=num[:, 22:24],
        x_true=num[:, 24:27], beta_true=num[:, 27],
        K=Intrinsics(fx, fy, cx, cy),
    )


def write_results(path, cols: dict) -> None:
    n = len(cols["id"])
    with open(path, "w", newline="") as fh:
        fh.write("\t".join(RESULT_COLUMNS) + "\n")
        for i in range(n):
            out = []
            for c in RESULT_COLUMNS:
                v = cols[c][i]
                if c in _STR_COLUMNS:
                    out.append(str(v))
                elif c in ("id", "adequate"):
                    out.append(str(int(v)))
                else:
                    out.append(fmt(v))
            fh.write("\t".join(out) + "\n")


def read_results(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader)
        if header != RESULT_COLUMNS:
            raise ValueError(f"{path}: not a results file (unexpected header)")
        rows = list(reader)
    cols = {}
    for j, c in enumerate(RESULT_COLUMNS):
        vals = [r[j] for r in rows]
        if c in _STR_COLUMNS:
            cols[c] = np.array(vals, dtype=object)
        elif c == "id":
            cols[c] = np.array(vals, dtype=int)
        elif c == "adequate":
            cols[c] = np.array(vals, dtype=int).astype(bool)
        else:
            cols[c] = np.array(vals, dtype=float)
    return cols


def write_csv(path, header, rows) -> None:
    """Plain comma-separated table; floats at 17 significant digits."""
    out = Path(path)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
