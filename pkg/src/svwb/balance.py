"""White balancing, spatially varying white balancing and multi-color fitting.

Correction matrices act on column XYZ vectors: ``corrected = M @ xyz``.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .color import as_tristimulus, check_image, cone_response, get_model
from .errors import (
    BoundsError,
    ConfigError,
    DegenerateWhiteError,
    ShapeError,
    UnderdeterminedError,
)

DEFICIENCY_THRESHOLD = 1e6

_CONE_NAMES = ("rho", "gamma", "beta")


@dataclass(frozen=True)
class WhitePointAnchor:
    """A source white, its ground-truth white, and where it sits in the image.

    ``coord`` is ``(x, y)`` in continuous pixel units; pixel ``(col, row)``
    covers ``[col, col + 1) x [row, row + 1)``.
    """

    source: np.ndarray
    target: np.ndarray
    coord: tuple

    def __post_init__(self):
        object.__setattr__(self, "source", as_tristimulus(self.source))
        object.__setattr__(self, "target", as_tristimulus(self.target))
        x, y = (float(v) for v in self.coord)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ConfigError(f"anchor coordinate must be finite, got {self.coord}")
        object.__setattr__(self, "coord", (x, y))


@dataclass(frozen=True)
class MultiColorFit:
    matrix: np.ndarray
    condition_number: float
    deficient: bool
    threshold: float = DEFICIENCY_THRESHOLD


def _positive_cone(model, c, role):
    lms = cone_response(model, c)
    for name, value in zip(_CONE_NAMES, lms):
        if not value > 0:
            raise DegenerateWhiteError(
                f"{role} white {c} has non-positive {name} response ({value:.6g}) "
                f"under the {model.name} model",
                component=name,
            )
    return lms


def wb_matrix(model, source, target):
    """Classic white-balance matrix ``M_A^-1 diag(target_cone / source_cone) M_A``."""
    model = get_model(model)
    source = as_tristimulus(source)
    target = as_tristimulus(target)
    src = _positive_cone(model, source, "source")
    dst = _positive_cone(model, target, "target")
    return model.inverse @ np.diag(dst / src) @ model.matrix


def per_anchor_matrix(model, anchor):
    return wb_matrix(model, anchor.source, anchor.target)


def anchor_coords(anchors):
    anchors = list(anchors)
    if not anchors:
        raise ConfigError("at least one white-point anchor is required")
    coords = np.array([a.coord for a in anchors], dtype=np.float64)
    _, first = np.unique(coords, axis=0, return_index=True)
    if len(first) != len(coords):
        seen = {}
        for i, c in enumerate(map(tuple, coords)):
            if c in seen:
                raise ConfigError(
                    f"anchors {seen[c]} and {i} share coordinate {c}", field=f"anchors[{i}].coord"
                )
            seen[c] = i
    return coords[:, 0], coords[:, 1]


def weights(p, anchors):
    """Inverse-distance weights of each anchor for image point ``p = (x, y)``."""
    ax, ay = anchor_coords(anchors)
    x, y = (float(v) for v in p)
    dist = [math.sqrt((xa - x) ** 2 + (ya - y) ** 2) for xa, ya in zip(ax, ay)]
    k = np.zeros(len(dist))
    if 0.0 in dist:
        k[dist.index(0.0)] = 1.0
        return k
    inv = [1.0 / d for d in dist]
    total = sum(inv)
    for m, v in enumerate(inv):
        k[m] = v / total
    return k


def svwb_matrix(p, model, anchors):
    """Weighted sum of per-anchor matrices at image point ``p``."""
    anchors = list(anchors)
    k = weights(p, anchors)
    m = np.zeros((3, 3))
    for km, anchor in zip(k, anchors):
        m = m + km * per_anchor_matrix(model, anchor)
    return m


def correct_pixel(value, matrix):
    return np.asarray(matrix, dtype=np.float64) @ as_tristimulus(value)


def correct_image_wb(img, model, source, target):
    img = check_image(img)
    return _kernels.apply_matrix(img, wb_matrix(model, source, target))


def check_anchors_in_bounds(anchors, width, height):
    for i, a in enumerate(anchors):
        x, y = a.coord
        if not (0 <= x < width and 0 <= y < height):
            raise BoundsError(
                f"coordinate {a.coord} lies outside a {width}x{height} image",
                field=f"anchors[{i}].coord",
            )


def correct_image_svwb(img, model, anchors, backend=None):
    """Spatially varying white balancing of a whole image.

    The per-anchor matrices are built once; the per-pixel weighting and
    blending runs in the numba kernel (or its numpy twin, see ``backend``).
    """
    img = check_image(img)
    anchors = list(anchors)
    ax, ay = anchor_coords(anchors)
    check_anchors_in_bounds(anchors, img.shape[1], img.shape[0])
    mats = np.stack([per_anchor_matrix(model, a) for a in anchors])
    return _kernels.svwb_apply(img, ax, ay, mats, backend=backend)


def correct_image_svwb_reference(img, model, anchors):
    """Slow per-pixel reference: weights and full matrix sum recomputed each pixel."""
    img = check_image(img)
    anchors = list(anchors)
    check_anchors_in_bounds(anchors, img.shape[1], img.shape[0])
    h, w, _ = img.shape
    out = np.empty_like(img)
    for row in range(h):
        for col in range(w):
            m = svwb_matrix((col + 0.5, row + 0.5), model, anchors)
            out[row, col] = correct_pixel(img[row, col], m)
    return out


def multicolor_matrix(sources, targets, threshold=DEFICIENCY_THRESHOLD):
    """Least-squares 3x3 matrix mapping ``sources`` onto ``targets``.

    Minimizes ``sum_i ||M s_i - g_i||^2``. Solved through the normal
    equations with a Cholesky factorization; when the source set is
    ill-conditioned (condition number above ``threshold``) the minimum-norm
    pseudo-inverse solution is returned instead and the fit is flagged.
    """
    src = np.asarray(sources, dtype=np.float64)
    dst = np.asarray(targets, dtype=np.float64)
    if src.ndim != 2 or src.shape[1] != 3 or src.shape != dst.shape:
        raise ShapeError(
            f"sources and targets must both be (n, 3); got {src.shape} and {dst.shape}"
        )
    if len(src) < 3:
        raise UnderdeterminedError(f"multi-color fit needs at least 3 colors, got {len(src)}")
    S = src.T
    G = dst.T
    with np.errstate(divide="ignore"):
        cond = float(np.linalg.cond(S))
    if not np.isfinite(cond):
        cond = np.inf
    deficient = cond > threshold
    if deficient:
        # drop the directions that made the fit ill-conditioned
        matrix = G @ np.linalg.pinv(S, rcond=1.0 / threshold)
    else:
        factor = scipy.linalg.cho_factor(S @ S.T)
        # (S S^T) M^T = S G^T
        matrix = scipy.linalg.cho_solve(factor, S @ G.T).T
    return MultiColorFit(matrix, cond, bool(deficient), threshold)


def correct_image_multicolor(img, fit):
    img = check_image(img)
    return _kernels.apply_matrix(img, fit.matrix)
