"""Reference matrices and white points.

All values are CIE 1931 2-degree observer, XYZ scaled so that Y = 1 for the
white point.
"""

import numpy as np

# Bradford cone-sharpening matrix.
BRADFORD = np.array([
    [0.8951, 0.2664, -0.1614],
    [-0.7502, 1.7135, 0.0367],
    [0.0389, -0.0685, 1.0296],
])

# von Kries: Hunt-Pointer-Estevez cone fundamentals normalized to D65.
VON_KRIES = np.array([
    [0.4002400, 0.7076000, -0.0808100],
    [-0.2263000, 1.1653200, 0.0457000],
    [0.0000000, 0.0000000, 0.9182200],
])

XYZ_SCALING = np.eye(3)

# Linear sRGB (D65) -> XYZ, IEC 61966-2-1 primaries.
SRGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
XYZ_TO_SRGB = np.linalg.inv(SRGB_TO_XYZ)

D65 = np.array([0.95047, 1.00000, 1.08883])
D50 = np.array([0.96422, 1.00000, 0.82521])

STANDARD_WHITES = {"D65": D65, "D50": D50}
