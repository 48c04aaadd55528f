"""Synthetic chart scenes under uniform, mixed and non-uniform illumination.

Illumination is modelled as a per-pixel diagonal gain on XYZ, so every
observed pixel is exactly ``gain(pixel) * ground_truth(pixel)``. Scene
generation is deterministic.
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import _kernels
from .balance import WhitePointAnchor
from .errors import ConfigError
from .estimation import RegionOfInterest
from .metrics import ChartLayout, Patch

FIELD_KINDS = ("uniform", "two-source-blend", "linear-gradient")
BLENDS = ("harmonic", "linear")

# Gains are artifact constants: a warm tungsten-like cast and a cool
# daylight/sky-like cast, roughly opposite about the D65 neutral axis.
WARM_GAIN = (1.15, 1.0, 0.75)
COOL_GAIN = (0.8, 1.0, 1.25)

BUILTIN_SCENES = ("single", "mixed", "nonuniform")


@dataclass(frozen=True)
class IlluminantField:
    """Spatial map of diagonal XYZ gains.

    ``uniform`` uses ``gains[0]`` everywhere. ``two-source-blend`` mixes the
    gains of light sources at ``coords`` with inverse-distance weights; with
    ``blend="harmonic"`` the reciprocal gains are mixed, which is exactly the
    field that a spatially varying white balance undoes, while ``"linear"``
    mixes the gains themselves. ``linear-gradient`` interpolates from
    ``gains[0]`` at ``start`` to ``gains[1]`` at ``end`` along that axis,
    held constant beyond either end.
    """

    kind: str
    gains: tuple
    coords: tuple = ()
    start: tuple = None
    end: tuple = None
    blend: str = "harmonic"

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ConfigError(f"unknown field kind {self.kind!r}; expected one of {FIELD_KINDS}", field="field.kind")
        gains = tuple(tuple(float(v) for v in g) for g in self.gains)
        if not gains or any(len(g) != 3 for g in gains):
            raise ConfigError("gains must be a list of 3-component triples", field="field.gains")
        if not all(np.isfinite(v) and v > 0 for g in gains for v in g):
            raise ConfigError("all gain components must be finite and > 0", field="field.gains")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "coords", tuple(tuple(float(v) for v in c) for c in self.coords))
        if self.blend not in BLENDS:
            raise ConfigError(f"unknown blend {self.blend!r}; expected one of {BLENDS}", field="field.blend")
        if self.kind == "uniform" and len(gains) != 1:
            raise ConfigError("uniform field takes exactly one gain", field="field.gains")
        if self.kind == "two-source-blend":
            if len(gains) < 2 or len(self.coords) != len(gains):
                raise ConfigError("need one coordinate per gain and at least two sources", field="field.coords")
            if len(set(self.coords)) != len(self.coords):
                raise ConfigError("source coordinates must be distinct", field="field.coords")
        if self.kind == "linear-gradient":
            if len(gains) != 2 or self.start is None or self.end is None:
                raise ConfigError("linear-gradient needs two gains plus start and end", field="field")
            object.__setattr__(self, "start", tuple(float(v) for v in self.start))
            object.__setattr__(self, "end", tuple(float(v) for v in self.end))
            if self.start == self.end:
                raise ConfigError("gradient start and end must differ", field="field.end")

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(
                kind=doc["kind"],
                gains=doc["gains"],
                coords=doc.get("coords", ()),
                start=doc.get("start"),
                end=doc.get("end"),
                blend=doc.get("blend", "harmonic"),
            )
        except KeyError as exc:
            raise ConfigError(f"missing field {exc}", field="field") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed field ({exc!r})", field="field") from None

    def to_dict(self):
        doc = {"kind": self.kind, "gains": [list(g) for g in self.gains]}
        if self.kind == "two-source-blend":
            doc["coords"] = [list(c) for c in self.coords]
            doc["blend"] = self.blend
        if self.kind == "linear-gradient":
            doc["start"] = list(self.start)
            doc["end"] = list(self.end)
        return doc


def field_gain_at(field, px, py):
    """Gains at arrays of points ``(px, py)``; returns ``(len(px), 3)``."""
    px = np.atleast_1d(np.asarray(px, dtype=np.float64))
    py = np.atleast_1d(np.asarray(py, dtype=np.float64))
    gains = np.array(field.gains)
    if field.kind == "uniform":
        return np.broadcast_to(gains[0], (px.shape[0], 3)).copy()
    if field.kind == "two-source-blend":
        coords = np.array(field.coords)
        k = _kernels.idw_weights(px, py, coords[:, 0], coords[:, 1])
        if field.blend == "linear":
            out = k @ gains
        else:
            out = 1.0 / (k @ (1.0 / gains))
        # points on a source take that gain verbatim (1/(1/g) can be off by an ulp)
        on_source = k == 1.0
        for j in range(len(gains)):
            out[on_source[:, j]] = gains[j]
        return out
    sx, sy = field.start
    ex, ey = field.end
    vx, vy = ex - sx, ey - sy
    t = ((px - sx) * vx + (py - sy) * vy) / (vx * vx + vy * vy)
    t = np.clip(t, 0.0, 1.0)[:, None]
    return (1.0 - t) * gains[0] + t * gains[1]


def field_gain(field, p):
    """Gain triple of ``field`` at the image point ``p = (x, y)``."""
    return field_gain_at(field, [p[0]], [p[1]])[0]


def field_gain_image(field, width, height):
    """Gains evaluated at every pixel center, ``(height, width, 3)``."""
    py, px = np.mgrid[0:height, 0:width] + 0.5
    return field_gain_at(field, px.ravel(), py.ravel()).reshape(height, width, 3)


@dataclass(frozen=True)
class Chart:
    layout: ChartLayout
    background: np.ndarray
    white_labels: frozenset

    def patch(self, label):
        for p in self.layout.patches:
            if p.label == label:
                return p
        raise KeyError(label)

    def white_patch_at(self, x, y):
        for p in self.layout.patches:
            if p.label in self.white_labels and p.roi.contains(x, y):
                return p
        return None

    def default_white_coords(self):
        return [self.patch(label).roi.center for label in ("white-card-tr", "white-card-bl")]


def _chart_data(name):
    if name != "default":
        raise ConfigError(f"unknown chart {name!r}; only 'default' ships with the package", field="chart")
    text = resources.files("svwb").joinpath("data", "chart_default.json").read_text()
    return json.loads(text)


def default_chart(size=512):
    """The 4x6 evaluation chart plus two white cards in opposite corners.

    Geometry scales with ``size`` (a multiple of 32): unit ``u = size/32``,
    patches are ``4u`` squares on a ``5u`` pitch, and the white cards sit at
    the top-right and bottom-left corners.
    """
    if size < 32 or size % 32:
        raise ConfigError(f"chart size must be a positive multiple of 32, got {size}", field="size")
    data = _chart_data("default")
    u = size // 32
    inset = u // 2
    rows, cols = data["rows"], data["cols"]
    patches = []
    for i, entry in enumerate(data["patches"]):
        r, c = divmod(i, cols)
        roi = RegionOfInterest(u + inset + 5 * u * c, 6 * u + inset + 5 * u * r, 4 * u, 4 * u)
        patches.append(Patch(entry["label"], roi, entry.get("is_black", False), tuple(entry["xyz"])))
    assert len(patches) == rows * cols
    corners = {"top-right": (size - 5 * u, u), "bottom-left": (u, size - 5 * u)}
    for card in data["white_cards"]:
        x0, y0 = corners[card["corner"]]
        patches.append(Patch(card["label"], RegionOfInterest(x0, y0, 4 * u, 4 * u), False, tuple(card["xyz"])))
    whites = frozenset(["white"] + [card["label"] for card in data["white_cards"]])
    return Chart(ChartLayout(size, size, patches), np.array(data["background_xyz"]), whites)


def render_ground_truth(chart):
    layout = chart.layout
    img = np.empty((layout.height, layout.width, 3))
    img[...] = chart.background
    for p in layout.patches:
        p.roi.slice(img)[...] = p.xyz
    return img


@dataclass(frozen=True)
class SyntheticScene:
    ground_truth: np.ndarray
    observed: np.ndarray
    layout: ChartLayout
    true_anchors: tuple
    field: IlluminantField


def render_scene(chart, field, white_coords=None):
    """Render ``chart`` under ``field``.

    Each white coordinate must sit inside one of the chart's white patches;
    the matching anchor pairs the observed white there (field gain times the
    patch's true XYZ) with that true XYZ.
    """
    layout = chart.layout
    if white_coords is None:
        white_coords = chart.default_white_coords()
    anchors = []
    for i, (x, y) in enumerate(white_coords):
        patch = chart.white_patch_at(x, y)
        if patch is None:
            raise ConfigError(f"({x}, {y}) is not inside a white patch", field=f"white_coords[{i}]")
        white = np.array(patch.xyz)
        anchors.append(WhitePointAnchor(field_gain(field, (x, y)) * white, white, (x, y)))
    truth = render_ground_truth(chart)
    observed = field_gain_image(field, layout.width, layout.height) * truth
    return SyntheticScene(truth, observed, layout, tuple(anchors), field)


@dataclass(frozen=True)
class SceneSpec:
    size: int
    chart: str
    field: IlluminantField
    white_coords: tuple = None

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("scene spec must be a JSON object", field="scene")
        if "field" not in doc:
            raise ConfigError("missing field 'field'", field="scene")
        try:
            size = int(doc.get("size", 512))
            coords = doc.get("white_coords")
            if coords is not None:
                coords = tuple((float(x), float(y)) for x, y in coords)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed scene spec ({exc!r})", field="scene") from None
        return cls(size, str(doc.get("chart", "default")), IlluminantField.from_dict(doc["field"]), coords)

    def to_dict(self):
        doc = {"size": self.size, "chart": self.chart, "field": self.field.to_dict()}
        if self.white_coords is not None:
            doc["white_coords"] = [list(c) for c in self.white_coords]
        return doc

    def resized(self, size):
        """Same scene with every coordinate rescaled to a ``size`` x ``size`` image."""
        s = size / self.size
        f = self.field
        field = IlluminantField(
            f.kind, f.gains,
            coords=tuple((x * s, y * s) for x, y in f.coords),
            start=None if f.start is None else (f.start[0] * s, f.start[1] * s),
            end=None if f.end is None else (f.end[0] * s, f.end[1] * s),
            blend=f.blend,
        )
        coords = None if self.white_coords is None else tuple((x * s, y * s) for x, y in self.white_coords)
        return SceneSpec(size, self.chart, field, coords)

    def render(self):
        if self.chart != "default":
            _chart_data(self.chart)
        return render_scene(default_chart(self.size), self.field, self.white_coords)


def builtin_scene(name, size=None):
    """Load one of the packaged scene specs: single, mixed or nonuniform."""
    if name not in BUILTIN_SCENES:
        raise ConfigError(f"unknown built-in scene {name!r}; expected one of {BUILTIN_SCENES}", field="scene")
    text = resources.files("svwb").joinpath("data", "scenes", f"{name}.json").read_text()
    spec = SceneSpec.from_dict(json.loads(text))
    return spec if size is None else spec.resized(size)
