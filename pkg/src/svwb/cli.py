"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numeric error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import balance, estimation, metrics, synth
from . import imageio as io
from .color import MODELS
from .errors import ConfigError, ImageIOError, SVWBError

METHODS = ("wb", "svwb", "multicolor")
ESTIMATORS = ("gray-world", "max-rgb", "region")
# patches whose reference mean is within this angle of the anchor target
# count as neutral and feed the multi-color baseline in `compare`
NEUTRAL_TOLERANCE_DEGREES = 2.0


def _warn(msg):
    print(f"svwb: warning: {msg}", file=sys.stderr)


def _fmt_matrix(m):
    return "\n".join("  " + " ".join(f"{v: .6f}" for v in row) for row in m)


def _fit_doc(fit):
    cond = fit.condition_number
    return {
        "matrix": fit.matrix.tolist(),
        "condition_number": cond if np.isfinite(cond) else None,
        "deficient": fit.deficient,
        "threshold": fit.threshold,
    }


def cmd_correct(args):
    img = io.load_image(args.input, linear=args.linear)
    cfg = io.load_anchor_config(args.anchors, img)
    model = args.model or cfg.model
    anchors = list(cfg.anchors)
    report = {"method": args.method, "model": model, "anchors": len(anchors)}
    if args.method == "wb":
        if not 0 <= args.anchor_index < len(anchors):
            raise ConfigError(f"anchor index {args.anchor_index} out of range", field="--anchor-index")
        a = anchors[args.anchor_index]
        out = balance.correct_image_wb(img, model, a.source, a.target)
    elif args.method == "svwb":
        out = balance.correct_image_svwb(img, model, anchors, backend=args.backend)
    else:
        fit = balance.multicolor_matrix([a.source for a in anchors], [a.target for a in anchors])
        report["fit"] = _fit_doc(fit)
        if fit.deficient:
            _warn(
                f"multi-color fit is rank deficient (condition number {fit.condition_number:.3g} "
                f"> {fit.threshold:.3g}); using the minimum-norm solution"
            )
        out = balance.correct_image_multicolor(img, fit)
    clipped = io.save_image(out, args.output, bit_depth=args.bit_depth, linear=args.linear)
    report["clipped"] = clipped
    if clipped:
        _warn("output exceeded the sRGB gamut and was clamped")
    if args.json:
        print(json.dumps(report, indent=2))
    elif "fit" in report:
        fit = report["fit"]
        print("multi-color matrix:")
        print(_fmt_matrix(fit["matrix"]))
        print(f"condition number: {fit['condition_number']}")
        print(f"deficient: {str(fit['deficient']).lower()}")
    return 0


def _write_report(report, path, as_json):
    text = report.to_json() + "\n" if as_json or str(path).endswith(".json") else report.to_text()
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc.strerror or exc}") from None


def cmd_evaluate(args):
    adjusted = io.load_image(args.adjusted, linear=args.linear)
    reference = io.load_image(args.reference, linear=args.linear)
    layout = io.load_layout(args.layout)
    report = metrics.evaluate_chart(adjusted, reference, layout)
    if args.report:
        _write_report(report, args.report, args.json)
    if args.heatmap:
        io.save_image(metrics.heatmap(report, layout, args.scale_max), args.heatmap)
    sys.stdout.write(report.to_json() + "\n" if args.json else report.to_text())
    return 0


def cmd_estimate(args):
    img = io.load_image(args.input, linear=args.linear)
    if args.estimator == "gray-world":
        est = estimation.estimate_gray_world(img)
    elif args.estimator == "max-rgb":
        est = estimation.estimate_max_rgb(img, percentile=args.percentile)
    else:
        if args.roi is None:
            raise ConfigError("the region estimator needs --roi x0,y0,w,h", field="--roi")
        try:
            roi = estimation.RegionOfInterest.parse(args.roi)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise ConfigError(str(exc), field="--roi") from None
            raise ConfigError(f"expected x0,y0,w,h, got {args.roi!r}", field="--roi") from None
        est = estimation.region_mean(img, roi)
    if args.json:
        print(json.dumps({"estimator": args.estimator, "xyz": est.tolist()}))
    else:
        print(" ".join(f"{v:.6f}" for v in est))
    return 0


def _scene_spec(arg, size=None):
    if arg in synth.BUILTIN_SCENES:
        spec = synth.builtin_scene(arg)
    else:
        spec = synth.SceneSpec.from_dict(io.read_json(arg))
    return spec if size is None else spec.resized(size)


def cmd_synth(args):
    spec = _scene_spec(args.scene, args.size)
    scene = spec.render()
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ImageIOError(f"cannot create {out}: {exc.strerror or exc}") from None
    io.save_image(scene.observed, out / "observed.npy")
    io.save_image(scene.ground_truth, out / "ground_truth.npy")
    io.save_image(scene.observed, out / "observed.png")
    io.save_image(scene.ground_truth, out / "ground_truth.png")
    io.save_anchor_config(out / "anchors.json", scene.true_anchors, model=args.model)
    io.save_layout(out / "layout.json", scene.layout)
    io.write_json(out / "scene.json", spec.to_dict())
    print(f"wrote scene to {out}")
    return 0


def _neutral_pairs(observed, reference, layout, white):
    """(source, target) region means of the neutral, non-black patches."""
    sources, targets = [], []
    for patch in layout.patches:
        if patch.is_black:
            continue
        q = estimation.region_mean(reference, patch.roi)
        if np.linalg.norm(q) == 0:
            continue
        if metrics.reproduction_error(q, white) <= NEUTRAL_TOLERANCE_DEGREES:
            sources.append(estimation.region_mean(observed, patch.roi))
            targets.append(q)
    return sources, targets


def compare(observed, reference, layout, anchors, model, backend=None):
    """Evaluate every method on one scene.

    Runs: no correction, classic WB from each anchor, the multi-color
    least-squares baseline fitted on the neutral patches, and spatially
    varying WB. Returns ``(rows, fit)`` where each row is
    ``(name, ErrorReport)``.
    """
    rows = [("input", metrics.evaluate_chart(observed, reference, layout))]
    for i, a in enumerate(anchors, 1):
        out = balance.correct_image_wb(observed, model, a.source, a.target)
        rows.append((f"wb-anchor{i}", metrics.evaluate_chart(out, reference, layout)))
    sources, targets = _neutral_pairs(observed, reference, layout, anchors[0].target)
    fit = None
    if len(sources) >= 3:
        fit = balance.multicolor_matrix(sources, targets)
        out = balance.correct_image_multicolor(observed, fit)
        rows.append(("multicolor", metrics.evaluate_chart(out, reference, layout)))
    out = balance.correct_image_svwb(observed, model, anchors, backend=backend)
    rows.append(("svwb", metrics.evaluate_chart(out, reference, layout)))
    return rows, fit


def cmd_compare(args):
    if args.observed or args.reference:
        if not (args.observed and args.reference and args.anchors and args.layout):
            raise ConfigError("image-set mode needs --observed, --reference, --anchors and --layout")
        observed = io.load_image(args.observed, linear=args.linear)
        reference = io.load_image(args.reference, linear=args.linear)
        layout = io.load_layout(args.layout)
        cfg = io.load_anchor_config(args.anchors, observed)
        anchors, model, label = list(cfg.anchors), args.model or cfg.model, str(args.observed)
    else:
        spec = _scene_spec(args.scene or "mixed", args.size)
        scene = spec.render()
        observed, reference, layout = scene.observed, scene.ground_truth, scene.layout
        anchors, model = list(scene.true_anchors), args.model or io.DEFAULT_MODEL
        label = args.scene or "mixed"
    rows, fit = compare(observed, reference, layout, anchors, model, backend=args.backend)
    ranked = sorted((r for r in rows if r[0] != "input"), key=lambda r: r[1].mean_degrees)
    rank = {name: i for i, (name, _) in enumerate(ranked, 1)}
    if args.json:
        doc = {
            "scene": label,
            "model": model,
            "results": [
                {"method": name, "mean": rep.mean_degrees, "std": rep.std_degrees, "rank": rank.get(name)}
                for name, rep in rows
            ],
            "multicolor_fit": None if fit is None else _fit_doc(fit),
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"scene: {label}   model: {model}")
        print(f"{'method':<12} {'mean':>9} {'std':>9}  rank")
        for name, rep in rows:
            r = rank.get(name, "-")
            print(f"{name:<12} {rep.mean_degrees:9.4f} {rep.std_degrees:9.4f}  {r}")
        if fit is not None and fit.deficient:
            print(f"multicolor fit rank deficient (condition number {fit.condition_number:.3g})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="svwb", description="Spatially varying white balancing and evaluation tools."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    models = sorted(MODELS)

    def add_common(p, linear=True):
        if linear:
            p.add_argument("--linear", action="store_true",
                           help="treat PNG/PPM code values as linear (skip the sRGB curve)")
        p.add_argument("--json", action="store_true", help="JSON output")

    p = sub.add_parser("correct", help="correct an image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--method", choices=METHODS, default="svwb")
    p.add_argument("--anchors", required=True, help="anchor config JSON")
    p.add_argument("--model", choices=models, help="override the config's adaptation model")
    p.add_argument("--anchor-index", type=int, default=0, help="anchor used by --method wb")
    p.add_argument("--bit-depth", type=int, choices=(8, 16), default=8)
    p.add_argument("--backend", choices=("auto", "numba", "numpy"), default="auto")
    add_common(p)
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("evaluate", help="reproduction angular error against a reference")
    p.add_argument("adjusted")
    p.add_argument("reference")
    p.add_argument("--layout", required=True, help="chart layout JSON")
    p.add_argument("--report", help="write the report here (.json for JSON)")
    p.add_argument("--heatmap", help="write a per-patch error heat map image here")
    p.add_argument("--scale-max", type=float, default=metrics.DEFAULT_SCALE_MAX,
                   help="error in degrees shown as full red (default %(default)s)")
    add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("estimate", help="estimate the source white of an image")
    p.add_argument("input")
    p.add_argument("--estimator", choices=ESTIMATORS, default="gray-world")
    p.add_argument("--roi", help="x0,y0,w,h for the region estimator")
    p.add_argument("--percentile", type=float, default=99.9, help="max-rgb percentile (100 = strict max)")
    add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("synth", help="render a synthetic scene")
    p.add_argument("scene", help=f"scene spec JSON or one of {', '.join(synth.BUILTIN_SCENES)}")
    p.add_argument("out_dir")
    p.add_argument("--size", type=int, help="rescale the scene to this size")
    p.add_argument("--model", choices=models, default=io.DEFAULT_MODEL, help="model written to anchors.json")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="compare WB, multi-color and SVWB on one scene")
    p.add_argument("scene", nargs="?", help="scene spec JSON or built-in name (default: mixed)")
    p.add_argument("--size", type=int)
    p.add_argument("--model", choices=models)
    p.add_argument("--observed")
    p.add_argument("--reference")
    p.add_argument("--anchors")
    p.add_argument("--layout")
    p.add_argument("--backend", choices=("auto", "numba", "numpy"), default="auto")
    add_common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SVWBError as exc:
        print(f"svwb: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
