"""Time the amoeba kernels in their numba and numpy flavours.

    python benchmarks/bench_kernels.py [--repeat 5] [--points 20000]

Numba timings exclude the first (compiling) call.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fanikit import kernels
from fanikit._accel import HAVE_NUMBA
from fanikit.amoeba import LaurentFamily, complex_arrays
from fanikit.tropical import Triangulation, dual_complex


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(points: int, seed: int):
    rng = np.random.default_rng(seed)
    T = Triangulation(((0, 0), (1, 0), (0, 1), (-1, -1)), ((0, 1, 2), (0, 2, 3), (0, 1, 3)))
    arrs = complex_arrays(dual_complex(T, [0, 1, 1, 1]))
    X = rng.uniform(-3, 3, size=(points, 2))
    yield "distance", (X, *arrs, 1e-12), kernels._nb_distance, kernels._np_distance

    fam = LaurentFamily.from_pl([(0, 0), (1, 0), (0, 1), (-1, -1)], [0, 1, 1, 1], 1e3)
    Z = np.exp(rng.uniform(-3, 3, size=(points, 2)) + 1j * rng.uniform(0, 2 * np.pi, size=(points, 2)))
    yield "eval", (fam.coefficients(), fam.exponents(), Z), kernels._nb_eval, kernels._np_eval

    fam3 = LaurentFamily.from_pl([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], [0, 0, 0, 0], 1e2)
    axis = np.linspace(-4, 4, 16)
    ph = 2 * np.pi * np.arange(6) / 6
    yield "scan3", (fam3.coefficients(), fam3.exponents(), axis, axis, axis, ph, 1e-1), \
        kernels._nb_scan3, kernels._np_scan3


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--points", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    print(f"{'kernel':<10} {'numpy [s]':>12} {'numba [s]':>12} {'speedup':>9}")
    for name, a, nb, npf in cases(args.points, args.seed):
        t_np = _best(lambda: npf(*a), args.repeat)
        if HAVE_NUMBA:
            nb(*a)
            t_nb = _best(lambda: nb(*a), args.repeat)
            print(f"{name:<10} {t_np:12.5f} {t_nb:12.5f} {t_np / t_nb:9.1f}")
        else:
            print(f"{name:<10} {t_np:12.5f} {'n/a':>12} {'':>9}")


if __name__ == "__main__":
    main()
