"""Floating-point simplex whose answer is re-derived in exact arithmetic.

The float engine only proposes a basis.  The basis matrix is then factorized
over the rationals: primal values, multipliers and reduced costs are computed
exactly, and only a basis that is exactly optimal (or an exact Farkas vector)
is accepted.  A primal-feasible but suboptimal basis warm-starts the exact
simplex; anything else falls back to :func:`solve_exact`.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .exact import DEFAULT_MAX_PIVOTS, continue_from_basis, phase_one_cost, solve_exact
from .model import LinearProgram, LpOutcome, Status, verify_farkas
from .standard import StandardForm, standardize

log = logging.getLogger(__name__)

_ZERO = Fraction(0)


def solve_linear_system(a: list[list[Fraction]], b: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Exact Gauss-Jordan solve of a square system; None if singular."""
    n = len(a)
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        pv = prow[col]
        if pv != 1:
            prow = [v / pv if v else v for v in prow]
            aug[col] = prow
        nz = [k for k in range(col, n + 1) if prow[k]]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if f:
                    row = aug[r]
                    for k in nz:
                        row[k] -= f * prow[k]
    return [aug[r][n] for r in range(n)]


def _columns(sf: StandardForm) -> list[list[tuple[int, Fraction]]]:
    cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(sf.n_cols)]
    for i, row in enumerate(sf.matrix):
        for j, v in enumerate(row):
            if v:
                cols[j].append((i, v))
    return cols


def _basis_matrix(sf: StandardForm, basis: Sequence[int]) -> list[list[Fraction]]:
    return [[sf.matrix[i][j] for j in basis] for i in range(sf.n_rows)]


def _multipliers(sf, basis, cost) -> Optional[list[Fraction]]:
    bt = [[sf.matrix[i][j] for i in range(sf.n_rows)] for j in basis]
    return solve_linear_system(bt, [cost[j] for j in basis])


def certify_optimal_basis(lp: LinearProgram, sf: StandardForm, basis: Sequence[int]) -> Optional[LpOutcome]:
    """Exact optimality check of a proposed basis; None when it fails."""
    can = lp.canonical()
    xb = solve_linear_system(_basis_matrix(sf, basis), sf.rhs)
    if xb is None or any(v < 0 for v in xb):
        return None
    if any(j >= sf.art_start and v != 0 for j, v in zip(basis, xb)):
        return None
    pi = _multipliers(sf, basis, sf.cost)
    if pi is None:
        return None
    for j, col in enumerate(_columns(sf)[: sf.art_start]):
        if sf.cost[j] - sum((pi[i] * v for i, v in col), _ZERO) > 0:
            return None
    x = [_ZERO] * sf.n_cols
    for j, v in zip(basis, xb):
        x[j] = v
    n = sf.n_structural
    solution = tuple(v + s for v, s in zip(x[:n], can.shift))
    value = sum((c * v for c, v in zip(can.cost, x[:n]) if c and v), _ZERO) + can.constant
    return LpOutcome(
        Status.OPTIMAL, solution=solution, value=value,
        certificate=sf.duals_to_canonical(pi), mode="float-certified", basis=tuple(basis),
    )


def certify_infeasible_basis(lp: LinearProgram, sf: StandardForm, basis: Sequence[int]) -> Optional[LpOutcome]:
    pi = _multipliers(sf, basis, phase_one_cost(sf))
    if pi is None:
        return None
    y = sf.duals_to_canonical(pi)
    if not verify_farkas(lp.canonical(), y):
        return None
    return LpOutcome(Status.INFEASIBLE, certificate=y, mode="float-certified")


def _set_cost(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> None:
    m = T.shape[0] - 1
    T[m, :-1] = cost
    T[m, -1] = 0.0
    cb = cost[basis]
    nz = np.flatnonzero(cb)
    if nz.size:
        T[m] -= cb[nz] @ T[nz]


def float_basis(sf: StandardForm, max_iter: int, tol: float, bland_after: int):
    """Run both phases in float64. Returns (kind, basis, iterations).

    ``kind`` is ``"optimal"``, ``"infeasible"``, ``"unbounded"`` or ``"limit"``.
    """
    m, n_cols = sf.n_rows, sf.n_cols
    T = np.zeros((m + 1, n_cols + 1))
    for i, row in enumerate(sf.matrix):
        for j, v in enumerate(row):
            if v:
                T[i, j] = float(v)
        T[i, -1] = float(sf.rhs[i])
    basis = np.array(sf.identity, dtype=np.int64)
    total = 0
    if sf.art_start < n_cols:
        _set_cost(T, basis, np.array([float(v) for v in phase_one_cost(sf)]))
        status, _, it = kernels.run_phase(T, basis, n_cols, max_iter, tol, bland_after)
        total += it
        if status == kernels.ITERATION_LIMIT:
            return "limit", basis.tolist(), total
        scale = max(1.0, float(np.abs(T[:m, -1]).max(initial=0.0)))
        if T[m, -1] > tol * scale:
            return "infeasible", basis.tolist(), total
        for r in range(m):
            if basis[r] >= sf.art_start:
                row = np.abs(T[r, : sf.art_start])
                k = int(np.argmax(row)) if row.size else 0
                if row.size and row[k] > tol:
                    kernels.pivot(T, basis, r, k)
    _set_cost(T, basis, np.array([float(v) for v in sf.cost]))
    status, _, it = kernels.run_phase(T, basis, sf.art_start, max_iter, tol, bland_after)
    total += it
    kind = {kernels.OPTIMAL: "optimal", kernels.UNBOUNDED: "unbounded"}.get(status, "limit")
    return kind, basis.tolist(), total


def solve_float_then_certify(
    lp: LinearProgram,
    max_pivots: int = DEFAULT_MAX_PIVOTS,
    tol: float = 1e-9,
    bland_after: int = 50,
) -> LpOutcome:
    """Float simplex to find a basis, exact re-verification, exact fallback."""
    sf = standardize(lp.canonical())
    kind, basis, iters = float_basis(sf, max_pivots, tol, bland_after)
    out = None
    if kind == "optimal":
        out = certify_optimal_basis(lp, sf, basis)
    elif kind == "infeasible":
        out = certify_infeasible_basis(lp, sf, basis)
    if out is not None:
        return _with_pivots(out, iters)
    if kind in ("optimal", "unbounded", "limit"):
        log.debug("float basis (%s) not certified; warm-starting exact simplex", kind)
        out = continue_from_basis(lp, sf, basis, max_pivots)
        if out is not None:
            return _with_pivots(out, iters + out.pivots)
    log.debug("falling back to the exact solver")
    out = solve_exact(lp, max_pivots)
    return _with_pivots(out, iters + out.pivots, mode="float-fallback-exact")


def _with_pivots(out: LpOutcome, pivots: int, mode: Optional[str] = None) -> LpOutcome:
    from dataclasses import replace

    return replace(out, pivots=pivots, mode=mode or out.mode)
