"""
Rejecting points behind the cameras
===================================

Sine-rule depths are always positive, so a sign check cannot flag a point
that sits behind a camera. The adequacy test instead asks whether flipping
either depth would bring the two ray points closer together.
"""

import numpy as np

from twoview import DepthPair, RelativePose, adequacy_test, triangulate_mid2

pose = RelativePose(np.eye(3), [-1.0, 0.0, 0.0])
f0 = np.array([0.0, 0.0, 1.0])

# Rays that meet in front of both cameras at (-1, 0, 1).
f1_front = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2)
# The same line through camera 1, pointing the other way: the lines still
# meet at (-1, 0, 1), which is now behind camera 1.
f1_behind = -f1_front

for name, f1 in (("front", f1_front), ("behind", f1_behind)):
    r = triangulate_mid2(f0, f1, pose)
    print(f"{name:>6}: depths = ({r.depths.lam0:.4f}, {r.depths.lam1:.4f})  adequate = {r.adequate}")

# The test can also be called directly on a depth pair.
print("direct call:", adequacy_test(DepthPair(1.0, np.sqrt(2)), f0, f1_behind, pose))
