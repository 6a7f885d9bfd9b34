"""Benchmark the compiled kernels against the numpy fallback.

Run as:  python -m parabext.benchmark [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _kernels_py
from .field import make_field
from .fourier import _grid_digit_rows
from .geometry import Paraboloid, sample_subset

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _energy_cases(rng):
    cases = []
    f13 = make_field(13)
    E = sample_subset(f13, 4, 1200, rng)
    cases.append(("energy q=13 d=4 |E|=1200 (dense)", E.digit_rows(), 13))
    f3 = make_field(3, 3)
    E = sample_subset(f3, 7, 2500, rng)
    cases.append(("energy q=27 d=7 |E|=2500 (sparse)", E.digit_rows(), 3))
    return cases


def _transform_cases():
    cases = []
    f9 = make_field(3, 2)
    v = Paraboloid(f9, 4)
    weights = np.ones(v.size, dtype=np.complex128) / v.size
    cases.append(("transform q=9 d=4 (729 -> 6561)", v.trace_rows(), weights, _grid_digit_rows(f9, 4), 3))
    f17 = make_field(17)
    v = Paraboloid(f17, 3)
    weights = np.ones(v.size, dtype=np.complex128) / v.size
    cases.append(("transform q=17 d=3 (289 -> 4913)", v.trace_rows(), weights, _grid_digit_rows(f17, 3), 17))
    return cases


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    print(f"{'case':45s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, rows, p in _energy_cases(rng):
        t_py = _time(lambda: _kernels_py.pair_energy(rows, p), args.repeat)
        if _compiled is not None:
            t_c = _time(lambda: _compiled.pair_energy(rows, p), args.repeat)
            assert _compiled.pair_energy(rows, p) == _kernels_py.pair_energy(rows, p)
            print(f"{name:45s} {t_py:9.4f}s {t_c:9.4f}s {t_py / t_c:7.1f}x")
        else:
            print(f"{name:45s} {t_py:9.4f}s {'n/a':>10s}")
    for name, tr, w, ev, p in _transform_cases():
        t_py = _time(lambda: _kernels_py.char_transform(tr, w, ev, p, +1), args.repeat)
        if _compiled is not None:
            t_c = _time(lambda: _compiled.char_transform(tr, w, ev, p, +1), args.repeat)
            print(f"{name:45s} {t_py:9.4f}s {t_c:9.4f}s {t_py / t_c:7.1f}x")
        else:
            print(f"{name:45s} {t_py:9.4f}s {'n/a':>10s}")
    if _compiled is None:
        print("compiled extension not available; showing numpy fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
