"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--n 256] [--repeat 5]
"""
import argparse
import importlib
import time

import numpy as np

from weightlab._kernels import _pykernels


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        ck = importlib.import_module("weightlab._kernels._ckernels")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(0)
    a = np.cumsum(rng.random(args.n + 1))
    cases = {
        "conv_max": lambda k: k.conv_max(a, a),
        "compose_layers": lambda k: k.compose_layers(a, True, args.n),
        "pair_excess": lambda k: k.pair_excess(a, a, a),
        "subadditive_violation": lambda k: k.subadditive_violation(a),
    }
    print(f"N={args.n}, best of {args.repeat}")
    print(f"{'kernel':24s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, call in cases.items():
        r1, r2 = call(_pykernels), call(ck)
        for x, y in zip(np.atleast_1d(r1), np.atleast_1d(r2)):
            np.testing.assert_array_equal(x, y)
        tp = _time(lambda: call(_pykernels), args.repeat)
        tc = _time(lambda: call(ck), args.repeat)
        print(f"{name:24s} {tp:12.5f} {tc:12.5f} {tp / tc:9.1f}x")


if __name__ == "__main__":
    main()
