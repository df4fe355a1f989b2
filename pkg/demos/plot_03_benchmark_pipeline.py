"""
A small benchmark from the library
==================================

The same steps as ``twoview generate``, ``twoview run`` and
``twoview report``, on a reduced grid so it finishes in a few seconds.
"""

from twoview.report import aggregate, as_table
from twoview.run import METHODS, run_methods
from twoview.synthgen import build_dataset, grid

# Two camera rigs, three distances, two noise levels, 100 points per cloud.
cells = grid(("orbital", "lateral"), (2.0, 8.0, 32.0), (1.0, 4.0), n_points=100, seed=42)
ds = build_dataset(cells)
print(f"{len(ds)} problems ({ds.rejected} dropped as not visible in both views)")

cols = run_methods(ds, METHODS)
table = as_table(aggregate(cols))

# Mean 3D error per raw-parallax bin, accepted points only.
print(f"{'method':>6} {'<2 deg':>10} {'2-4 deg':>10} {'>4 deg':>10}")
for m in METHODS:
    found = [table.get(("parallax", m, b)) for b in ((0.0, 2.0), (2.0, 4.0), (4.0, 90.0))]
    print(f"{m:>6} " + " ".join(f"{c['mean_e3d']:10.4f}" if c else f"{'-':>10}" for c in found))
