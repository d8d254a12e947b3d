#!/usr/bin/env python3
"""Benchmark: compiled extension vs pure-Python kernels on the hot path
(sample a random lattice, LLL-reduce, enumerate the short vectors).

Run from the repository root after building the extension:

    python benchmarks/bench_kernels.py [--trials 20] [--n 14]

Both backends are fed identical bases and must produce identical spectra;
the script asserts that before reporting timings.
"""

from __future__ import annotations

import argparse
import math
import time

from latticezeta import _kernels_py as pure
from latticezeta import kernels
from latticezeta.lattice import sample_lattice
from latticezeta.zeta import unit_ball_volume_log


def pipeline(backend_lll, backend_enum, rows, radius_sq):
    reduced = backend_lll([r[:] for r in rows], 0.99)
    return backend_enum(reduced, radius_sq)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--n", type=int, default=14)
    parser.add_argument("--cutoff", type=float, default=100.0)
    parser.add_argument("--prime-bits", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if kernels.BACKEND != "compiled":
        print("note: compiled extension not built; timing the pure path only")

    cases = []
    for i in range(args.trials):
        basis = sample_lattice(args.n, args.prime_bits, args.seed, i)
        log_thresh = (2.0 / args.n) * (
            math.log(args.cutoff)
            + math.log(basis.det_abs)
            - unit_ball_volume_log(args.n)
        )
        radius_sq = int(math.exp(log_thresh)) + 1
        cases.append(([list(r) for r in basis.rows], radius_sq))

    timings = {}
    spectra = {}
    backends = [("pure", pure.lll_reduce_rows, pure.enumerate_sqnorms)]
    if kernels.BACKEND == "compiled":
        backends.append(("compiled", kernels.lll_reduce_rows, kernels.enumerate_sqnorms))

    for name, lll, enum in backends:
        t0 = time.perf_counter()
        spectra[name] = [pipeline(lll, enum, rows, r2) for rows, r2 in cases]
        timings[name] = (time.perf_counter() - t0) / args.trials

    if len(spectra) == 2:
        assert spectra["pure"] == spectra["compiled"], "backends disagree!"
        print(f"backends agree on all {args.trials} spectra")

    print(f"\nper-lattice pipeline at n={args.n}, cutoff={args.cutoff}:")
    for name, seconds in timings.items():
        print(f"  {name:>9}: {1000 * seconds:8.2f} ms")
    if len(timings) == 2:
        print(f"  speedup: {timings['pure'] / timings['compiled']:.1f}x")


if __name__ == "__main__":
    main()
