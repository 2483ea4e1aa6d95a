"""Double-precision simplex kernels.

Two interchangeable implementations of the same pivoting loop:

* ``run_phase_numba`` -- explicit loops compiled with ``numba.njit``;
* ``run_phase_numpy`` -- vectorized numpy, used when numba is unavailable or
  when ``COHERENT_DISABLE_NUMBA=1`` is set in the environment.

Both make identical pivot choices (same tie-breaking, same tolerances), so
they return identical bases up to floating-point noise in the tableau.

Tableau layout: ``T`` has shape ``(m + 1, N + 1)``; rows ``0..m-1`` are the
constraint rows ``B^-1 [M | r]``, row ``m`` holds reduced costs and ``-z``.
Entering columns are restricted to ``j < n_enter``.  Dantzig's rule is used
until ``bland_after`` consecutive degenerate pivots, then Bland's rule for the
rest of the phase.

Return value ``(status, column, iterations)`` with status 0 = optimal,
1 = unbounded in ``column``, 2 = iteration limit.
"""

from __future__ import annotations

import os

import numpy as np

RATIO_TOL = 1e-11

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2


def numba_disabled() -> bool:
    return os.environ.get("COHERENT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


def _pivot_numpy(T, basis, r, c):
    T[r] /= T[r, c]
    f = T[:, c].copy()
    f[r] = 0.0
    T -= np.outer(f, T[r])
    T[:, c] = 0.0
    T[r, c] = 1.0
    basis[r] = c


def run_phase_numpy(T, basis, n_enter, max_iter, tol, bland_after):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    it = 0
    stall = 0
    bland = False
    while it < max_iter:
        d = T[m, :n_enter]
        if bland:
            cand = np.flatnonzero(d > tol)
            if cand.size == 0:
                return OPTIMAL, -1, it
            c = int(cand[0])
        else:
            c = int(np.argmax(d))
            if d[c] <= tol:
                return OPTIMAL, -1, it
        col = T[:m, c]
        pos = np.flatnonzero(col > tol)
        if pos.size == 0:
            return UNBOUNDED, c, it
        ratios = T[pos, n] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + RATIO_TOL]
        r = int(ties[np.argmin(basis[ties])])
        if best <= tol:
            stall += 1
            if stall > bland_after:
                bland = True
        else:
            stall = 0
        _pivot_numpy(T, basis, r, c)
        it += 1
    return ITERATION_LIMIT, -1, it


def _pivot_loops(T, basis, r, c):
    rows, cols = T.shape
    pv = T[r, c]
    for k in range(cols):
        T[r, k] /= pv
    for i in range(rows):
        if i == r:
            continue
        f = T[i, c]
        if f != 0.0:
            for k in range(cols):
                T[i, k] -= f * T[r, k]
            T[i, c] = 0.0
    T[r, c] = 1.0
    basis[r] = c


def _run_phase_loops(T, basis, n_enter, max_iter, tol, bland_after):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    it = 0
    stall = 0
    bland = False
    while it < max_iter:
        c = -1
        if bland:
            for j in range(n_enter):
                if T[m, j] > tol:
                    c = j
                    break
        else:
            best_d = tol
            for j in range(n_enter):
                if T[m, j] > best_d:
                    best_d = T[m, j]
                    c = j
        if c < 0:
            return OPTIMAL, -1, it
        best = np.inf
        for i in range(m):
            a = T[i, c]
            if a > tol:
                ratio = T[i, n] / a
                if ratio < best:
                    best = ratio
        if best == np.inf:
            return UNBOUNDED, c, it
        r = -1
        for i in range(m):
            a = T[i, c]
            if a > tol and T[i, n] / a <= best + RATIO_TOL:
                if r < 0 or basis[i] < basis[r]:
                    r = i
        if best <= tol:
            stall += 1
            if stall > bland_after:
                bland = True
        else:
            stall = 0
        _pivot_numba(T, basis, r, c)
        it += 1
    return ITERATION_LIMIT, -1, it


try:
    import numba

    _pivot_numba = numba.njit(cache=True)(_pivot_loops)
    _run_phase_jit = numba.njit(cache=True)(_run_phase_loops)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def run_phase_numba(T, basis, n_enter, max_iter, tol, bland_after):
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    status, col, it = _run_phase_jit(T, basis, n_enter, max_iter, tol, bland_after)
    return int(status), int(col), int(it)


def pivot_numba(T, basis, r, c):
    _pivot_numba(T, basis, r, c)


def backend() -> str:
    return "numba" if HAVE_NUMBA and not numba_disabled() else "numpy"


def run_phase(T, basis, n_enter, max_iter, tol=1e-9, bland_after=50):
    if backend() == "numba":
        return run_phase_numba(T, basis, n_enter, max_iter, tol, bland_after)
    return run_phase_numpy(T, basis, n_enter, max_iter, tol, bland_after)


def pivot(T, basis, r, c):
    if backend() == "numba":
        pivot_numba(T, basis, r, c)
    else:
        _pivot_numpy(T, basis, r, c)
