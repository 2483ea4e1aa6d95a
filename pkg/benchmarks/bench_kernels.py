#!/usr/bin/env python3
"""Compare the numba and numpy simplex kernels.

Times the float phase of the grid LP for eps(delta) on uniform grids, once per
backend, and the end-to-end float-certified solve.  The exact solver is
included for scale.

Usage:
    python benchmarks/bench_kernels.py [--sizes 11 21 31] [--repeat 3] [--json out.json]
"""

import argparse
import json
import os
import time
from fractions import Fraction

import numpy as np

from coherent import lp
from coherent.extremal import Grid, TargetFunction, attaining_points, extremal_lp
from coherent.lp import kernels
from coherent.lp.exact import phase_one_cost
from coherent.lp.standard import standardize

DELTA = Fraction(1, 4)


def build(n):
    grid = Grid.uniform(n).augment(attaining_points(DELTA))
    return extremal_lp(grid, TargetFunction.gap_indicator(DELTA).evaluate(grid))


def phase_one_tableau(problem):
    sf = standardize(problem.canonical())
    m, n = sf.n_rows, sf.n_cols
    T = np.zeros((m + 1, n + 1))
    for i, row in enumerate(sf.matrix):
        T[i, :n] = [float(v) for v in row]
        T[i, -1] = float(sf.rhs[i])
    T[m, :n] = [float(v) for v in phase_one_cost(sf)]
    basis = np.array(sf.identity, dtype=np.int64)
    for r, b in enumerate(basis):
        if T[m, b]:
            T[m] -= T[m, b] * T[r]
    return sf, T, basis


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_size(n, repeat, with_exact):
    problem = build(n)
    sf, T, basis = phase_one_tableau(problem)
    row = {"grid": n, "rows": sf.n_rows, "cols": sf.n_cols}
    for name, run in (("numpy", kernels.run_phase_numpy), ("numba", kernels.run_phase_numba)):
        row[f"phase1_{name}"] = best_of(
            lambda: run(T.copy(), basis.copy(), sf.n_cols, 100_000, 1e-9, 50), repeat
        )
    for name, flag in (("numpy", "1"), ("numba", "")):
        os.environ["COHERENT_DISABLE_NUMBA"] = flag
        row[f"solve_{name}"] = best_of(lambda: lp.solve(problem, "float-certified"), repeat)
    os.environ.pop("COHERENT_DISABLE_NUMBA", None)
    if with_exact:
        row["solve_exact"] = best_of(lambda: lp.solve(problem, "exact"), 1)
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[11, 21, 31])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--no-exact", action="store_true", help="skip the exact solver column")
    parser.add_argument("--json", help="also write the rows here")
    args = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    # warm up the JIT so compile time is not measured
    sf, T, basis = phase_one_tableau(build(3))
    kernels.run_phase_numba(T, basis, sf.n_cols, 1000, 1e-9, 50)

    rows = [bench_size(n, args.repeat, not args.no_exact) for n in args.sizes]
    cols = ["grid", "rows", "cols", "phase1_numpy", "phase1_numba", "solve_numpy", "solve_numba", "solve_exact"]
    print(" ".join(f"{c:>13}" for c in cols))
    for row in rows:
        print(" ".join(f"{row[c]:>13.4f}" if isinstance(row.get(c), float) else f"{row.get(c, '-')!s:>13}"
                       for c in cols))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
