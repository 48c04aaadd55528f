"""Source-white estimation: region means and global statistical estimators."""

from dataclasses import dataclass

import numpy as np

from .color import check_image
from .errors import BoundsError, ConfigError, DegenerateEstimateError


@dataclass(frozen=True)
class RegionOfInterest:
    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        for name in ("x0", "y0", "width", "height"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ConfigError(f"roi {name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"roi must be at least 1x1, got {self.width}x{self.height}")

    @classmethod
    def parse(cls, value):
        """Build from ``[x0, y0, w, h]``, ``"x0,y0,w,h"`` or a mapping."""
        if isinstance(value, RegionOfInterest):
            return value
        if isinstance(value, str):
            value = value.split(",")
        if isinstance(value, dict):
            return cls(value["x0"], value["y0"], value["width"], value["height"])
        x0, y0, w, h = (float(v) for v in value)
        return cls(x0, y0, w, h)

    @property
    def center(self):
        return (self.x0 + self.width / 2, self.y0 + self.height / 2)

    def contains(self, x, y):
        return self.x0 <= x < self.x0 + self.width and self.y0 <= y < self.y0 + self.height

    def overlaps(self, other):
        return not (
            self.x0 + self.width <= other.x0
            or other.x0 + other.width <= self.x0
            or self.y0 + self.height <= other.y0
            or other.y0 + other.height <= self.y0
        )

    def check_bounds(self, width, height):
        if self.x0 < 0 or self.y0 < 0 or self.x0 + self.width > width or self.y0 + self.height > height:
            raise BoundsError(f"{self} does not fit inside a {width}x{height} image")

    def slice(self, img):
        return img[self.y0:self.y0 + self.height, self.x0:self.x0 + self.width]

    def as_list(self):
        return [self.x0, self.y0, self.width, self.height]


def region_mean(img, roi):
    """Component-wise mean of the pixels inside ``roi``."""
    img = check_image(img)
    roi = RegionOfInterest.parse(roi)
    roi.check_bounds(img.shape[1], img.shape[0])
    return roi.slice(img).reshape(-1, 3).mean(axis=0)


def _normalize_y(est, name):
    if not (np.all(np.isfinite(est)) and est[1] > 0):
        raise DegenerateEstimateError(
            f"{name} estimate {est} has no positive luminance; image is black or invalid"
        )
    return est / est[1]


def estimate_gray_world(img):
    """Global mean color, scaled to Y = 1."""
    img = check_image(img)
    return _normalize_y(img.reshape(-1, 3).mean(axis=0), "gray-world")


def estimate_max_rgb(img, percentile=99.9):
    """Per-channel high percentile (max with ``percentile=100``), scaled to Y = 1.

    The default stops a handful of hot pixels from defining the white.
    """
    img = check_image(img)
    if not 0 < percentile <= 100:
        raise ConfigError(f"percentile must lie in (0, 100], got {percentile}")
    flat = img.reshape(-1, 3)
    if percentile == 100:
        est = flat.max(axis=0)
    else:
        est = np.percentile(flat, percentile, axis=0)
    return _normalize_y(est, "max-rgb")
