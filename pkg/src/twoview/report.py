"""Aggregate per-problem results by noise level and by raw-parallax bin."""
from __future__ import annotations

import numpy as np

DEFAULT_BINS_DEG = (0.0, 2.0, 4.0, 90.0)
ERROR_FIELDS = ("e3d", "e_l1", "e_l2", "e_linf", "beta_err")
NORM_FIELDS = {"l1": "e_l1", "l2": "e_l2", "linf": "e_linf"}


def report_header(norm=None) -> list[str]:
    fields = _fields(norm)
    head = ["grouping", "method", "sigma", "bin_lo_deg", "bin_hi_deg", "n", "n_rejected", "n_behind",
            "rejection_rate"]
    for f in fields:
        head += [f"mean_{f}", f"median_{f}"]
    head += ["over_freq", "under_freq", "tie_freq", "over_mean_deg", "under_mean_deg"]
    return head


def _fields(norm):
    if norm is None:
        return ERROR_FIELDS
    return ("e3d", NORM_FIELDS[norm], "beta_err")


def bin_index(beta_raw_deg, bins) -> np.ndarray:
    """Bin of each angle for edges ``bins``: ``[lo, hi)``, the last bin closed. -1 when outside."""
    edges = np.asarray(bins, dtype=float)
    b = np.asarray(beta_raw_deg, dtype=float)
    idx = np.searchsorted(edges, b, side="right") - 1
    idx = np.where(b == edges[-1], len(edges) - 2, idx)
    return np.where((idx >= 0) & (idx < len(edges) - 1), idx, -1)


def _row(cols, mask, fields):
    adequate = cols["adequate"][mask]
    finite = np.isfinite(cols["e_l2"][mask]) & np.isfinite(cols["e3d"][mask])
    acc = adequate & finite
    n = int(acc.sum())
    n_rej = int((~adequate).sum())
    n_behind = int((adequate & ~finite).sum())
    total = n + n_rej + n_behind
    if n == 0:
        return [], 0
    out = [n, n_rej, n_behind, (n_rej + n_behind) / total]
    signed = cols["beta_signed_err_deg"][mask][acc]
    vals = {f: cols[f][mask][acc] for f in fields if f != "beta_err"}
    vals["beta_err"] = np.abs(signed)
    for f in fields:
        out += [float(np.mean(vals[f])), float(np.median(vals[f]))]
    over, under = signed > 0, signed < 0
    out += [
        float(over.mean()), float(under.mean()), float((signed == 0).mean()),
        float(signed[over].mean()) if over.any() else 0.0,
        float(-signed[under].mean()) if under.any() else 0.0,
    ]
    return out, n


def aggregate(cols: dict, bins=DEFAULT_BINS_DEG, norm=None) -> list[list]:
    """Rows grouped by ``(method, sigma)`` then by ``(method, raw-parallax bin)``.

    Averages use each method's accepted problems only: adequate, with finite
    reprojections. Groups with no accepted problem are omitted.
    """
    fields = _fields(norm)
    methods = list(dict.fromkeys(cols["method"]))
    method_col = cols["method"]
    rows = []
    for m in methods:
        in_m = method_col == m
        for s in np.unique(cols["sigma"][in_m]):
            r, n = _row(cols, in_m & (cols["sigma"] == s), fields)
            if n:
                rows.append(["sigma", m, float(s), "", ""] + r)
    bidx = bin_index(cols["beta_raw_deg"], bins)
    for m in methods:
        in_m = method_col == m
        for k in range(len(bins) - 1):
            r, n = _row(cols, in_m & (bidx == k), fields)
            if n:
                rows.append(["parallax", m, "", float(bins[k]), float(bins[k + 1])] + r)
    return rows


def as_table(rows, norm=None) -> dict:
    """Rows keyed by ``(grouping, method, key)`` as ``{column: value}`` dicts, handy in tests."""
    head = report_header(norm)
    table = {}
    for r in rows:
        d = dict(zip(head, r))
        key = d["sigma"] if d["grouping"] == "sigma" else (d["bin_lo_deg"], d["bin_hi_deg"])
        table[(d["grouping"], d["method"], key)] = d
    return table
