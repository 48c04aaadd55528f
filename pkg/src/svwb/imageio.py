"""Image and JSON configuration I/O.

Supported rasters: 8/16-bit RGB PNG, binary PPM (P6) and ``.npy`` float XYZ
arrays. PNG/PPM data is treated as sRGB-encoded unless ``linear=True``, in
which case code values are taken as linear sRGB. ``.npy`` files hold linear
XYZ directly and round-trip losslessly.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .balance import WhitePointAnchor, check_anchors_in_bounds, anchor_coords
from .color import (
    check_image,
    get_model,
    linear_rgb_to_xyz,
    srgb_decode,
    srgb_encode,
    xyz_to_linear_rgb,
)
from .constants import STANDARD_WHITES
from .errors import (
    BoundsError,
    ConfigError,
    CorruptImageError,
    ImageIOError,
    InputRangeError,
    UnsupportedFormatError,
)
from .estimation import RegionOfInterest, region_mean
from .metrics import ChartLayout

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
NPY_MAGIC = b"\x93NUMPY"
DEFAULT_MODEL = "bradford"


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ImageIOError(f"cannot read {path}: {exc.strerror or exc}") from None


def _decode_png(data, path):
    if len(data) < 33 or data[12:16] != b"IHDR":
        raise CorruptImageError(f"{path}: truncated PNG header")
    depth = data[24]
    if depth not in (8, 16):
        raise UnsupportedFormatError(f"{path}: PNG bit depth {depth} (only 8 and 16 are supported)")
    # a complete stream ends with the IEND chunk and its CRC
    if data[-12:-4] != b"\x00\x00\x00\x00IEND":
        raise CorruptImageError(f"{path}: PNG stream is truncated (no IEND chunk)")
    codes = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if codes is None:
        raise CorruptImageError(f"{path}: PNG could not be decoded")
    if codes.ndim == 2:
        codes = np.repeat(codes[..., None], 3, axis=2)
    elif codes.shape[2] == 4:
        codes = codes[..., :3]
    return codes[..., ::-1], 255 if codes.dtype == np.uint8 else 65535


def _ppm_header(data, path):
    fields, pos = [], 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise CorruptImageError(f"{path}: truncated PPM header")
        try:
            fields.append(int(data[start:pos]))
        except ValueError:
            raise CorruptImageError(f"{path}: malformed PPM header") from None
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise CorruptImageError(f"{path}: truncated PPM header")
    return fields, pos + 1


def _decode_ppm(data, path):
    (width, height, maxval), offset = _ppm_header(data, path)
    if width < 1 or height < 1:
        raise CorruptImageError(f"{path}: invalid PPM size {width}x{height}")
    if not 0 < maxval < 65536:
        raise UnsupportedFormatError(f"{path}: PPM maxval {maxval} out of range")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    count = width * height * 3
    payload = data[offset:offset + count * dtype.itemsize]
    if len(payload) < count * dtype.itemsize:
        raise CorruptImageError(f"{path}: PPM pixel data is truncated")
    codes = np.frombuffer(payload, dtype=dtype).reshape(height, width, 3)
    return codes, maxval


def load_image(path, linear=False):
    """Read an image file into linear XYZ, ``(height, width, 3)`` float64."""
    data = _read_bytes(path)
    if data.startswith(NPY_MAGIC):
        try:
            arr = np.load(path, allow_pickle=False)
        except ValueError as exc:
            raise CorruptImageError(f"{path}: {exc}") from None
        return check_image(arr).copy()
    if data.startswith(PNG_SIGNATURE):
        codes, maxval = _decode_png(data, path)
    elif data[:2] == b"P6":
        codes, maxval = _decode_ppm(data, path)
    else:
        raise UnsupportedFormatError(f"{path}: not a PNG, binary PPM or .npy file")
    encoded = codes.astype(np.float64) / maxval
    rgb = encoded if linear else srgb_decode(encoded)
    return linear_rgb_to_xyz(rgb)


def encode_codes(img, bit_depth=8, linear=False):
    """XYZ image to integer RGB code values plus a gamut-clip flag."""
    if bit_depth not in (8, 16):
        raise InputRangeError(f"bit depth must be 8 or 16, got {bit_depth}")
    rgb = xyz_to_linear_rgb(check_image(img))
    clipped = bool(np.any(rgb < -1e-6) or np.any(rgb > 1 + 1e-6))
    rgb = np.clip(rgb, 0.0, 1.0)
    encoded = rgb if linear else srgb_encode(rgb)
    maxval = (1 << bit_depth) - 1
    codes = np.rint(encoded * maxval).astype(np.uint8 if bit_depth == 8 else np.uint16)
    return codes, clipped


def save_image(img, path, bit_depth=8, linear=False):
    """Write ``img`` (linear XYZ). The format follows the file extension.

    Returns True when some pixels were outside the sRGB gamut and had to be
    clamped (always False for ``.npy``).
    """
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".npy":
            np.save(path, check_image(img))
            return False
        codes, clipped = encode_codes(img, bit_depth, linear)
        if suffix == ".png":
            ok, buf = cv2.imencode(".png", np.ascontiguousarray(codes[..., ::-1]))
            if not ok:
                raise ImageIOError(f"{path}: PNG encoding failed")
            path.write_bytes(buf.tobytes())
        elif suffix in (".ppm", ".pnm"):
            h, w, _ = codes.shape
            header = f"P6\n{w} {h}\n{(1 << bit_depth) - 1}\n".encode("ascii")
            body = codes.astype(">u2").tobytes() if bit_depth == 16 else codes.tobytes()
            path.write_bytes(header + body)
        else:
            raise UnsupportedFormatError(f"{path}: unsupported output extension {suffix!r}")
    except OSError as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(f"cannot write {path}: {exc.strerror or exc}") from None
    return clipped


def read_json(path):
    try:
        return json.loads(_read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path} is not valid JSON ({exc})") from None


def write_json(path, doc):
    try:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc.strerror or exc}") from None


@dataclass(frozen=True)
class AnchorConfig:
    model: str
    anchors: tuple


def _triple(value, where):
    try:
        out = np.array([float(v) for v in value])
    except (TypeError, ValueError):
        raise ConfigError(f"expected three numbers, got {value!r}", field=where) from None
    if out.shape != (3,) or not np.all(np.isfinite(out)):
        raise ConfigError(f"expected three finite numbers, got {value!r}", field=where)
    return out


def parse_anchor_config(doc, img):
    """Resolve an anchor config document against ``img`` (linear XYZ)."""
    img = check_image(img)
    height, width = img.shape[:2]
    if not isinstance(doc, dict):
        raise ConfigError("anchor config must be a JSON object")
    model = doc.get("model", DEFAULT_MODEL)
    try:
        get_model(model)
    except InputRangeError as exc:
        raise ConfigError(str(exc), field="model") from None
    entries = doc.get("anchors")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("expected a non-empty list", field="anchors")

    anchors = []
    for i, entry in enumerate(entries):
        where = f"anchors[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError("expected an object", field=where)
        if "source" not in entry:
            raise ConfigError("missing field 'source'", field=where)
        source, roi = entry["source"], None
        if isinstance(source, dict):
            if "roi" not in source:
                raise ConfigError("expected an XYZ triple or {\"roi\": [x0, y0, w, h]}", field=f"{where}.source")
            try:
                roi = RegionOfInterest.parse(source["roi"])
            except (ConfigError, TypeError, ValueError, KeyError) as exc:
                raise ConfigError(f"bad roi ({exc})", field=f"{where}.source.roi") from None
            try:
                source = region_mean(img, roi)
            except BoundsError as exc:
                raise BoundsError(str(exc), field=f"{where}.source.roi") from None
        else:
            source = _triple(source, f"{where}.source")

        target = entry.get("target", "D65")
        if isinstance(target, str):
            if target.upper() not in STANDARD_WHITES:
                raise ConfigError(
                    f"unknown white {target!r}; expected one of {sorted(STANDARD_WHITES)}",
                    field=f"{where}.target",
                )
            target = STANDARD_WHITES[target.upper()]
        else:
            target = _triple(target, f"{where}.target")

        coord = entry.get("coord", "roi-center" if roi is not None else None)
        if coord == "roi-center":
            if roi is None:
                raise ConfigError("'roi-center' requires a roi source", field=f"{where}.coord")
            coord = roi.center
        elif coord is None:
            raise ConfigError("missing field 'coord'", field=where)
        else:
            try:
                x, y = (float(v) for v in coord)
            except (TypeError, ValueError):
                raise ConfigError(f"expected [x, y], got {coord!r}", field=f"{where}.coord") from None
            if not (np.isfinite(x) and np.isfinite(y)):
                raise ConfigError(f"coordinate must be finite, got {coord!r}", field=f"{where}.coord")
            coord = (x, y)
        anchors.append(WhitePointAnchor(source, target, coord))

    anchor_coords(anchors)
    check_anchors_in_bounds(anchors, width, height)
    return AnchorConfig(model, tuple(anchors))


def load_anchor_config(path, img):
    return parse_anchor_config(read_json(path), img)


def anchor_config_doc(anchors, model=DEFAULT_MODEL):
    return {
        "model": get_model(model).name,
        "anchors": [
            {"source": a.source.tolist(), "target": a.target.tolist(), "coord": list(a.coord)}
            for a in anchors
        ],
    }


def save_anchor_config(path, anchors, model=DEFAULT_MODEL):
    write_json(path, anchor_config_doc(anchors, model))


def load_layout(path):
    return ChartLayout.from_dict(read_json(path))


def save_layout(path, layout):
    write_json(path, layout.to_dict())
