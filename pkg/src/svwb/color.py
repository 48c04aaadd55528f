"""Color representations, sRGB <-> XYZ conversion and adaptation bases.

Tristimulus values are plain float64 arrays whose last axis has length 3.
Images are ``(height, width, 3)`` float64 arrays of linear XYZ.
"""

from dataclasses import dataclass, field

import numpy as np

from . import constants
from .errors import InputRangeError, ShapeError


@dataclass(frozen=True)
class AdaptationModel:
    """A chromatic adaptation basis ``M_A`` and its inverse."""

    name: str
    matrix: np.ndarray
    inverse: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, name, matrix):
        matrix = np.array(matrix, dtype=np.float64)
        matrix.setflags(write=False)
        inverse = np.linalg.inv(matrix)
        inverse.setflags(write=False)
        return cls(name, matrix, inverse)


XYZ_SCALING = AdaptationModel.from_matrix("xyz-scaling", constants.XYZ_SCALING)
VON_KRIES = AdaptationModel.from_matrix("von-kries", constants.VON_KRIES)
BRADFORD = AdaptationModel.from_matrix("bradford", constants.BRADFORD)

_CLIP_SLACK = 1e-6

MODELS = {m.name: m for m in (XYZ_SCALING, VON_KRIES, BRADFORD)}


def get_model(model):
    """Look up an adaptation model by name; models pass through."""
    if isinstance(model, AdaptationModel):
        return model
    try:
        return MODELS[model]
    except KeyError:
        raise InputRangeError(
            f"unknown adaptation model {model!r}; expected one of {sorted(MODELS)}"
        ) from None


def as_tristimulus(c):
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (3,):
        raise ShapeError(f"expected a tristimulus triple, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InputRangeError(f"tristimulus components must be finite, got {c}")
    return c


def check_image(img):
    """Validate and widen an XYZ raster to float64 ``(h, w, 3)``."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ShapeError(f"expected an image of shape (height, width, 3), got {img.shape}")
    return img.astype(np.float64, copy=False)


def cone_response(model, c):
    """Apply ``M_A`` to XYZ values (works on any ``(..., 3)`` array)."""
    model = get_model(model)
    return np.asarray(c, dtype=np.float64) @ model.matrix.T


def srgb_decode(v):
    """sRGB transfer curve, encoded -> linear."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def srgb_encode(v):
    """sRGB transfer curve, linear -> encoded. Input must be in [0, 1]."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.0031308, 12.92 * v, 1.055 * np.power(v, 1 / 2.4) - 0.055)


def linear_rgb_to_xyz(rgb):
    return np.asarray(rgb, dtype=np.float64) @ constants.SRGB_TO_XYZ.T


def xyz_to_linear_rgb(xyz):
    return np.asarray(xyz, dtype=np.float64) @ constants.XYZ_TO_SRGB.T


def srgb_to_linear_xyz(rgb):
    """Encoded sRGB in [0, 1] to linear XYZ."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1:] != (3,):
        raise ShapeError(f"expected (..., 3) RGB values, got shape {rgb.shape}")
    if np.any(~np.isfinite(rgb)) or np.any(rgb < 0) or np.any(rgb > 1):
        raise InputRangeError("sRGB channel values must lie in [0, 1]")
    return linear_rgb_to_xyz(srgb_decode(rgb))


def linear_xyz_to_srgb(xyz, return_clip=False):
    """Linear XYZ to encoded sRGB, clamping out-of-gamut values to [0, 1].

    With ``return_clip=True`` also returns a boolean that is set when any
    channel had to be clamped.
    """
    rgb = xyz_to_linear_rgb(xyz)
    # slack so that D65 itself (rows of the sRGB matrix sum to 1 +- 1e-7) is in gamut
    clipped = bool(np.any(rgb < -_CLIP_SLACK) or np.any(rgb > 1 + _CLIP_SLACK))
    out = srgb_encode(np.clip(rgb, 0.0, 1.0))
    if return_clip:
        return out, clipped
    return out
