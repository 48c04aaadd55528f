"""Per-pixel kernels for spatially varying correction.

Two interchangeable implementations are provided: a numba ``@njit`` loop and a
row-tiled pure-numpy path. Both evaluate the arithmetic in the same order, so
they agree to a few ulps. Set ``SVWB_DISABLE_NUMBA=1`` to force the numpy
path (numba is also skipped when it is not installed).
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_DISABLED = os.environ.get("SVWB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

BACKENDS = ("auto", "numba", "numpy")

# pixels per numpy tile; bounds the (tile, 3, 3) blended-matrix buffer
_TILE_PIXELS = 1 << 15


def default_backend():
    return "numba" if NUMBA_AVAILABLE and not NUMBA_DISABLED else "numpy"


def resolve_backend(backend):
    if backend is None or backend == "auto":
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def idw_weights(px, py, ax, ay):
    """Inverse-distance weights for many points at once.

    ``px, py`` are 1-D point coordinates, ``ax, ay`` the n anchor
    coordinates. Returns an ``(len(px), n)`` array whose rows sum to one. A
    point sitting exactly on an anchor gets weight 1 there (first match)
    and 0 elsewhere.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    n = len(ax)
    dist = np.empty((px.shape[0], n))
    for j in range(n):
        dx = ax[j] - px
        dy = ay[j] - py
        dist[:, j] = np.sqrt(dx * dx + dy * dy)
    with np.errstate(divide="ignore"):
        inv = 1.0 / dist
    total = inv[:, 0].copy()
    for j in range(1, n):
        total += inv[:, j]
    with np.errstate(invalid="ignore"):
        k = inv / total[:, None]
    hit = dist == 0.0
    on_anchor = hit.any(axis=1)
    if on_anchor.any():
        first = np.argmax(hit[on_anchor], axis=1)
        k[on_anchor] = 0.0
        k[np.flatnonzero(on_anchor), first] = 1.0
    return k


def _blend_and_apply(pix, k, mats):
    """out_i = sum_l (sum_m k_m M_m)[i, l] * pix_l, summed in index order."""
    blended = k[:, 0, None, None] * mats[0]
    for j in range(1, mats.shape[0]):
        blended = blended + k[:, j, None, None] * mats[j]
    x, y, z = pix[:, 0], pix[:, 1], pix[:, 2]
    out = np.empty_like(pix)
    for i in range(3):
        out[:, i] = blended[:, i, 0] * x + blended[:, i, 1] * y + blended[:, i, 2] * z
    return out


def _svwb_numpy(img, ax, ay, mats):
    h, w, _ = img.shape
    out = np.empty_like(img)
    cols = np.arange(w) + 0.5
    rows_per_tile = max(1, _TILE_PIXELS // w)
    for r0 in range(0, h, rows_per_tile):
        r1 = min(h, r0 + rows_per_tile)
        py = np.repeat(np.arange(r0, r1) + 0.5, w)
        px = np.tile(cols, r1 - r0)
        k = idw_weights(px, py, ax, ay)
        pix = img[r0:r1].reshape(-1, 3)
        out[r0:r1] = _blend_and_apply(pix, k, mats).reshape(r1 - r0, w, 3)
    return out


if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def _svwb_numba_kernel(img, ax, ay, mats, out):
        h, w, _ = img.shape
        n = ax.shape[0]
        k = np.empty(n)
        m = np.empty((3, 3))
        for r in range(h):
            py = r + 0.5
            for c in range(w):
                px = c + 0.5
                hit = -1
                total = 0.0
                for j in range(n):
                    dx = ax[j] - px
                    dy = ay[j] - py
                    d = np.sqrt(dx * dx + dy * dy)
                    if d == 0.0:
                        hit = j
                        break
                    k[j] = 1.0 / d
                    total += k[j]
                if hit >= 0:
                    for j in range(n):
                        k[j] = 0.0
                    k[hit] = 1.0
                else:
                    for j in range(n):
                        k[j] = k[j] / total
                for i in range(3):
                    for l in range(3):
                        acc = k[0] * mats[0, i, l]
                        for j in range(1, n):
                            acc += k[j] * mats[j, i, l]
                        m[i, l] = acc
                x = img[r, c, 0]
                y = img[r, c, 1]
                z = img[r, c, 2]
                for i in range(3):
                    out[r, c, i] = m[i, 0] * x + m[i, 1] * y + m[i, 2] * z
        return out


def svwb_apply(img, ax, ay, mats, backend=None):
    """Blend ``mats`` per pixel with inverse-distance weights and apply.

    ``img`` is ``(h, w, 3)`` float64, ``mats`` is ``(n, 3, 3)``. Pixel
    ``(col, row)`` is evaluated at its center ``(col + 0.5, row + 0.5)``.
    """
    img = np.ascontiguousarray(img, dtype=np.float64)
    ax = np.ascontiguousarray(ax, dtype=np.float64)
    ay = np.ascontiguousarray(ay, dtype=np.float64)
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    if resolve_backend(backend) == "numba":
        return _svwb_numba_kernel(img, ax, ay, mats, np.empty_like(img))
    return _svwb_numpy(img, ax, ay, mats)


def apply_matrix(img, m):
    """Apply one 3x3 matrix to every pixel."""
    img = np.asarray(img, dtype=np.float64)
    x, y, z = img[..., 0], img[..., 1], img[..., 2]
    out = np.empty_like(img)
    for i in range(3):
        out[..., i] = m[i, 0] * x + m[i, 1] * y + m[i, 2] * z
    return out
