"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/compare_backends.py [--repeat N]

Each kernel runs on the same inputs under both backends; outputs are
checked for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from advfid._core import _fallback, compiled_available


def cases(rng):
    plane = rng.uniform(0, 255, (299, 299))
    return {
        "correlate_valid 299x299 * 11x11": ("correlate_valid", (plane, rng.normal(size=(11, 11)))),
        "correlate_valid 299x299 * 3x3": ("correlate_valid", (plane, rng.normal(size=(3, 3)))),
        "block_moments 299x299 b16 s4": ("block_moments", (plane, 16, 4)),
        "average_ranks n=360 (ties)": ("average_ranks", (rng.integers(0, 40, 360).astype(np.float64),)),
        "average_ranks n=100000": ("average_ranks", (rng.normal(size=100_000),)),
    }


def agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(agree(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-9, atol=1e-9)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not compiled_available():
        print("compiled extension not built; run `pip install -e .` with Cython available", file=sys.stderr)
        return 1
    from advfid._core import _kernels

    rng = np.random.default_rng(0)
    print(f"{'kernel':<36} {'cython ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for label, (name, inputs) in cases(rng).items():
        fast, slow = getattr(_kernels, name), getattr(_fallback, name)
        if not agree(fast(*inputs), slow(*inputs)):
            print(f"{label}: backends disagree", file=sys.stderr)
            return 1
        t_fast = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat)) * 1e3
        t_slow = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat)) * 1e3
        print(f"{label:<36} {t_fast:10.2f} {t_slow:10.2f} {t_slow / t_fast:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
