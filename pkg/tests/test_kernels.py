import os
import subprocess
import sys

import numpy as np
import pytest

from svwb import _kernels, balance
from svwb.balance import WhitePointAnchor

from conftest import random_white


def _random_anchors(rng, n, w, h):
    coords = set()
    while len(coords) < n:
        coords.add((float(rng.uniform(0, w)), float(rng.uniform(0, h))))
    return [WhitePointAnchor(random_white(rng), random_white(rng), c) for c in coords]


@pytest.mark.parametrize("n", [1, 2, 5])
def test_backends_match_reference(rng, n):
    img = rng.uniform(0, 1.2, (20, 24, 3))
    anchors = _random_anchors(rng, n, 24, 20)
    ref = balance.correct_image_svwb_reference(img, "bradford", anchors)
    for backend in ("numpy", "numba"):
        out = balance.correct_image_svwb(img, "bradford", anchors, backend=backend)
        assert np.abs(out - ref).max() <= 1e-12, backend


def test_anchor_on_pixel_center(rng):
    img = rng.uniform(0, 1, (10, 10, 3))
    anchors = [
        WhitePointAnchor([1.1, 1.0, 0.7], [0.95, 1.0, 1.09], (2.5, 3.5)),
        WhitePointAnchor([0.8, 1.0, 1.3], [0.95, 1.0, 1.09], (7.5, 6.5)),
    ]
    m0 = balance.per_anchor_matrix("bradford", anchors[0])
    for backend in ("numpy", "numba"):
        out = balance.correct_image_svwb(img, "bradford", anchors, backend=backend)
        assert np.allclose(out[3, 2], m0 @ img[3, 2], rtol=0, atol=1e-15)


def test_numpy_tiling_is_invisible(rng, monkeypatch):
    img = rng.uniform(0, 1, (37, 29, 3))
    anchors = _random_anchors(rng, 3, 29, 37)
    whole = balance.correct_image_svwb(img, "von-kries", anchors, backend="numpy")
    monkeypatch.setattr(_kernels, "_TILE_PIXELS", 50)
    tiled = balance.correct_image_svwb(img, "von-kries", anchors, backend="numpy")
    assert np.array_equal(whole, tiled)


def test_idw_weights_match_scalar_weights(rng):
    anchors = _random_anchors(rng, 4, 50, 50)
    ax = np.array([a.coord[0] for a in anchors])
    ay = np.array([a.coord[1] for a in anchors])
    pts = rng.uniform(0, 50, (200, 2))
    pts[0] = anchors[2].coord
    k = _kernels.idw_weights(pts[:, 0], pts[:, 1], ax, ay)
    for p, row in zip(pts, k):
        assert np.allclose(row, balance.weights(p, anchors), rtol=0, atol=1e-15)
    assert k[0].tolist() == [0.0, 0.0, 1.0, 0.0]


def test_resolve_backend():
    assert _kernels.resolve_backend("numpy") == "numpy"
    assert _kernels.resolve_backend(None) == _kernels.default_backend()
    with pytest.raises(ValueError):
        _kernels.resolve_backend("cuda")


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, SVWB_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from svwb import _kernels; print(_kernels.default_backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    if expected == "numba" and not _kernels.NUMBA_AVAILABLE:
        expected = "numpy"
    assert out.stdout.strip() == expected
