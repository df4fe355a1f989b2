"""
How a small parallax error affects depth
========================================

Overestimating the parallax angle by half a degree moves the point less
than underestimating it by the same amount. The ratio of the two effects
stays above one and shrinks as the parallax grows.
"""

import numpy as np

from twoview import relative_impact

for deg in (1.0, 2.0, 5.0, 10.0, 20.0, 45.0, 90.0):
    r = relative_impact(np.radians(deg))
    print(f"parallax {deg:5.1f} deg: underestimation hurts {float(r):.4f}x as much")
