"""Reproduction angular error and chart-level evaluation."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .color import check_image, srgb_to_linear_xyz
from .errors import ConfigError, ShapeError, ZeroNormError
from .estimation import RegionOfInterest, region_mean

DEFAULT_SCALE_MAX = 10.0

# Heat-map ramp: (fraction of scale_max, encoded sRGB). Linear interpolation
# in encoded sRGB between stops; fractions above 1 clip to red.
RAMP = (
    (0.00, (0.0, 0.0, 1.0)),   # blue
    (0.25, (0.0, 1.0, 1.0)),   # cyan
    (0.50, (0.0, 1.0, 0.0)),   # green
    (0.75, (1.0, 1.0, 0.0)),   # yellow
    (1.00, (1.0, 0.0, 0.0)),   # red
)
EXCLUDED_GRAY = (0.5, 0.5, 0.5)


@dataclass(frozen=True)
class Patch:
    label: str
    roi: RegionOfInterest
    is_black: bool = False
    xyz: tuple = None


@dataclass(frozen=True)
class ChartLayout:
    width: int
    height: int
    patches: tuple

    def __post_init__(self):
        object.__setattr__(self, "patches", tuple(self.patches))
        if not any(not p.is_black for p in self.patches):
            raise ConfigError("chart layout needs at least one non-black patch")
        labels = [p.label for p in self.patches]
        if len(set(labels)) != len(labels):
            raise ConfigError("chart patch labels must be unique")
        for i, p in enumerate(self.patches):
            p.roi.check_bounds(self.width, self.height)
            for q in self.patches[:i]:
                if p.roi.overlaps(q.roi):
                    raise ConfigError(f"patches {q.label!r} and {p.label!r} overlap")

    def to_dict(self):
        out = []
        for p in self.patches:
            d = {"label": p.label, "roi": p.roi.as_list(), "is_black": p.is_black}
            if p.xyz is not None:
                d["xyz"] = list(p.xyz)
            out.append(d)
        return {"width": self.width, "height": self.height, "patches": out}

    @classmethod
    def from_dict(cls, doc):
        try:
            width, height = int(doc["width"]), int(doc["height"])
            entries = list(doc["patches"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed layout ({exc!r})", field="layout") from None
        patches = []
        for i, p in enumerate(entries):
            where = f"patches[{i}]"
            try:
                roi = RegionOfInterest.parse(p["roi"])
                xyz = p.get("xyz")
                patches.append(Patch(
                    str(p["label"]),
                    roi,
                    bool(p.get("is_black", False)),
                    None if xyz is None else tuple(float(v) for v in xyz),
                ))
            except ConfigError as exc:
                raise ConfigError(str(exc), field=where) from None
            except (KeyError, TypeError, ValueError, AttributeError) as exc:
                raise ConfigError(f"malformed patch ({exc!r})", field=where) from None
        return cls(width, height, patches)


@dataclass
class ErrorReport:
    per_patch: list  # (label, degrees or None)
    mean_degrees: float
    std_degrees: float
    excluded: list
    reasons: dict = field(default_factory=dict)

    def to_dict(self):
        patches = []
        for label, err in self.per_patch:
            patches.append({
                "label": label,
                "error_degrees": err,
                "excluded": label in self.reasons,
                "reason": self.reasons.get(label),
            })
        return {
            "patches": patches,
            "mean": self.mean_degrees,
            "std": self.std_degrees,
            "excluded": list(self.excluded),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        lines = []
        for label, err in self.per_patch:
            shown = "undefined" if err is None else f"{err:.4f}"
            note = f"  (excluded: {self.reasons[label]})" if label in self.reasons else ""
            lines.append(f"{label:<16} {shown}{note}")
        lines.append(f"Mean {self.mean_degrees:.4f} deg")
        lines.append(f"Std  {self.std_degrees:.4f} deg")
        return "\n".join(lines) + "\n"


def reproduction_error(p, q):
    """Angle in degrees between two color vectors.

    Evaluated as ``atan2(|p x q|, p . q)``, which equals the arccos of the
    normalized dot product but keeps full precision for nearly parallel
    vectors, where arccos loses about half the significant digits.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if not (np.linalg.norm(p) > 0 and np.linalg.norm(q) > 0):
        raise ZeroNormError("angular error is undefined for a zero-length color vector")
    # normalize first so the result is exactly symmetric and scale-free
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    sin = float(np.linalg.norm(np.cross(p, q)))
    cos = float(np.dot(p, q))
    return math.degrees(math.atan2(sin, cos))


def evaluate_chart(adjusted, reference, layout):
    """Per-patch reproduction error of region means, with Mean/Std.

    Black patches and patches whose mean is the zero vector are reported but
    left out of the statistics. Std is the population standard deviation.
    """
    adjusted = check_image(adjusted)
    reference = check_image(reference)
    if adjusted.shape != reference.shape:
        raise ShapeError(f"image shapes differ: {adjusted.shape} vs {reference.shape}")
    if adjusted.shape[:2] != (layout.height, layout.width):
        raise ShapeError(
            f"layout is {layout.width}x{layout.height} but images are "
            f"{adjusted.shape[1]}x{adjusted.shape[0]}"
        )
    per_patch, reasons, counted = [], {}, []
    for patch in layout.patches:
        p = region_mean(adjusted, patch.roi)
        q = region_mean(reference, patch.roi)
        try:
            err = reproduction_error(p, q)
        except ZeroNormError:
            err = None
        per_patch.append((patch.label, err))
        if patch.is_black:
            reasons[patch.label] = "black patch"
        elif err is None:
            reasons[patch.label] = "zero-norm patch mean"
        else:
            counted.append(err)
    if counted:
        mean, std = float(np.mean(counted)), float(np.std(counted))
    else:
        mean = std = float("nan")
    excluded = [label for label, _ in per_patch if label in reasons]
    return ErrorReport(per_patch, mean, std, excluded, reasons)


def ramp_color(fraction):
    """Encoded sRGB color of the heat-map ramp at ``fraction`` of full scale."""
    f = min(1.0, max(0.0, float(fraction)))
    stops = np.array([s for s, _ in RAMP])
    colors = np.array([c for _, c in RAMP])
    return np.array([np.interp(f, stops, colors[:, i]) for i in range(3)])


def heatmap(report, layout, scale_max_degrees=DEFAULT_SCALE_MAX):
    """Render per-patch errors as a linear XYZ image the size of the layout.

    Patches are filled with the ramp color for ``error / scale_max``;
    excluded patches are gray, everything outside the patches black.
    """
    if not scale_max_degrees > 0:
        raise ConfigError(f"scale_max must be positive, got {scale_max_degrees}")
    errors = dict(report.per_patch)
    img = np.zeros((layout.height, layout.width, 3))
    for patch in layout.patches:
        err = errors.get(patch.label)
        if patch.label in report.reasons or err is None:
            rgb = EXCLUDED_GRAY
        else:
            rgb = ramp_color(err / scale_max_degrees)
        patch.roi.slice(img)[...] = srgb_to_linear_xyz(np.asarray(rgb, dtype=np.float64))
    return img
