"""Time per-pixel SVWB correction on the numba and numpy backends.

    python benchmarks/bench_svwb.py --size 512 --anchors 2 5 --repeat 5

The naive per-pixel reference is timed on a small image only, since it is
orders of magnitude slower.
"""

import argparse
import time

import numpy as np

from svwb import _kernels, balance
from svwb.balance import WhitePointAnchor


def make_case(rng, size, n):
    img = rng.uniform(0, 1, (size, size, 3))
    coords = rng.uniform(0, size, (n, 2))
    anchors = [
        WhitePointAnchor(rng.uniform(0.5, 1.5, 3), (0.95047, 1.0, 1.08883), tuple(c))
        for c in coords
    ]
    return img, anchors


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--anchors", type=int, nargs="+", default=[1, 2, 5])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--model", default="bradford")
    ap.add_argument("--reference-size", type=int, default=32, help="image size for the naive reference (0 skips it)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    backends = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])
    if not _kernels.NUMBA_AVAILABLE:
        print("numba not importable; timing the numpy path only")

    print(f"{'n':>3} {'backend':>8} {'seconds':>10} {'Mpix/s':>8}  max |diff vs numpy|")
    for n in args.anchors:
        img, anchors = make_case(rng, args.size, n)
        baseline = balance.correct_image_svwb(img, args.model, anchors, backend="numpy")
        for backend in backends:
            run = lambda: balance.correct_image_svwb(img, args.model, anchors, backend=backend)  # noqa: E731
            diff = float(np.abs(run() - baseline).max())  # also warms up the jit
            t = best_of(run, args.repeat)
            print(f"{n:>3} {backend:>8} {t:>10.4f} {args.size ** 2 / t / 1e6:>8.2f}  {diff:.1e}")

    if args.reference_size:
        img, anchors = make_case(rng, args.reference_size, max(args.anchors))
        t = best_of(lambda: balance.correct_image_svwb_reference(img, args.model, anchors), 1)
        print(f"reference ({args.reference_size}x{args.reference_size}, n={max(args.anchors)}): "
              f"{t:.4f} s, {args.reference_size ** 2 / t / 1e6:.4f} Mpix/s")


if __name__ == "__main__":
    main()
