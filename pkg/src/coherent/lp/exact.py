"""Exact two-phase simplex over rationals (dense tableau, Bland's rule)."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .model import LinearProgram, LpError, LpOutcome, Status
from .standard import StandardForm, standardize

DEFAULT_MAX_PIVOTS = 200_000

_ZERO = Fraction(0)


class PivotLimitExceeded(LpError):
    pass


class Tableau:
    """``B^-1 [M | r]`` plus a reduced-cost row, stored as lists of Fractions.

    The reduced-cost row holds ``c_j - c_B B^-1 M_j`` and, in its last slot,
    minus the current objective value.
    """

    def __init__(self, sf: StandardForm, rows: list[list[Fraction]], basis: list[int]):
        self.sf = sf
        self.rows = rows
        self.basis = basis
        self.obj: list[Fraction] = [_ZERO] * (sf.n_cols + 1)
        self.pivots = 0

    @classmethod
    def initial(cls, sf: StandardForm) -> "Tableau":
        rows = [list(r) + [b] for r, b in zip(sf.matrix, sf.rhs)]
        return cls(sf, rows, list(sf.identity))

    @classmethod
    def from_basis(cls, sf: StandardForm, basis: Sequence[int]) -> Optional["Tableau"]:
        """Pivot the given columns into a fresh tableau; None if singular."""
        tab = cls.initial(sf)
        assigned = [False] * sf.n_rows
        for col in basis:
            row = next(
                (i for i in range(sf.n_rows) if not assigned[i] and tab.rows[i][col]), None
            )
            if row is None:
                return None
            tab.pivot(row, col)
            assigned[row] = True
        tab.pivots = 0
        return tab

    def set_cost(self, cost: Sequence[Fraction]) -> None:
        obj = list(cost) + [_ZERO]
        for r, j in enumerate(self.basis):
            cj = cost[j]
            if cj:
                for k, v in enumerate(self.rows[r]):
                    if v:
                        obj[k] -= cj * v
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        pv = prow[c]
        if pv != 1:
            prow = [v / pv if v else v for v in prow]
            self.rows[r] = prow
        nz = [k for k, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
        f = self.obj[c]
        if f:
            obj = self.obj
            for k in nz:
                obj[k] -= f * prow[k]
        self.basis[r] = c
        self.pivots += 1

    def run(self, n_enter: int, max_pivots: int) -> Optional[int]:
        """Bland-rule iterations; returns an unbounded entering column or None."""
        rhs = self.sf.n_cols
        rows, basis = self.rows, self.basis
        while True:
            obj = self.obj
            c = next((j for j in range(n_enter) if obj[j] > 0), None)
            if c is None:
                return None
            best, best_ratio = -1, None
            for i, row in enumerate(rows):
                a = row[c]
                if a > 0:
                    ratio = row[rhs] / a
                    if (
                        best < 0
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[best])
                    ):
                        best, best_ratio = i, ratio
            if best < 0:
                return c
            if self.pivots >= max_pivots:
                raise PivotLimitExceeded(f"pivot ceiling {max_pivots} reached")
            self.pivot(best, c)

    def drive_out_artificials(self) -> None:
        """Swap zero-valued artificials out of the basis where a real column can replace them.

        Rows whose non-artificial entries are all zero are redundant; their
        artificial stays basic at zero and can never become positive.
        """
        start = self.sf.art_start
        for r, j in enumerate(self.basis):
            if j < start:
                continue
            row = self.rows[r]
            c = next((k for k in range(start) if row[k]), None)
            if c is not None:
                self.pivot(r, c)

    @property
    def value(self) -> Fraction:
        return -self.obj[-1]

    def primal(self) -> list[Fraction]:
        x = [_ZERO] * self.sf.n_cols
        for r, j in enumerate(self.basis):
            x[j] = self.rows[r][-1]
        return x

    def multipliers(self, cost: Sequence[Fraction]) -> list[Fraction]:
        return [cost[j] - self.obj[j] for j in self.sf.identity]


def phase_one_cost(sf: StandardForm) -> list[Fraction]:
    return [_ZERO] * sf.art_start + [Fraction(-1)] * (sf.n_cols - sf.art_start)


def _finish(lp: LinearProgram, sf: StandardForm, tab: Tableau, ray_col, mode, pivots) -> LpOutcome:
    can = lp.canonical()
    n = sf.n_structural
    x = tab.primal()
    solution = tuple(v + s for v, s in zip(x[:n], can.shift))
    if ray_col is not None:
        d = [_ZERO] * sf.n_cols
        d[ray_col] = Fraction(1)
        for r, j in enumerate(tab.basis):
            d[j] = -tab.rows[r][ray_col]
        return LpOutcome(
            Status.UNBOUNDED, solution=solution, ray=tuple(d[:n]),
            pivots=pivots, mode=mode, basis=tuple(tab.basis),
        )
    y = sf.duals_to_canonical(tab.multipliers(sf.cost))
    return LpOutcome(
        Status.OPTIMAL, solution=solution, value=tab.value + can.constant,
        certificate=y, pivots=pivots, mode=mode, basis=tuple(tab.basis),
    )


def solve_exact(lp: LinearProgram, max_pivots: int = DEFAULT_MAX_PIVOTS) -> LpOutcome:
    """Solve ``lp`` exactly. Certificates are produced but not re-verified here."""
    sf = standardize(lp.canonical())
    tab = Tableau.initial(sf)
    if sf.art_start < sf.n_cols:
        c1 = phase_one_cost(sf)
        tab.set_cost(c1)
        tab.run(sf.n_cols, max_pivots)
        if tab.value < 0:
            y = sf.duals_to_canonical(tab.multipliers(c1))
            return LpOutcome(Status.INFEASIBLE, certificate=y, pivots=tab.pivots, mode="exact")
        tab.drive_out_artificials()
    tab.set_cost(sf.cost)
    ray_col = tab.run(sf.art_start, max_pivots)
    return _finish(lp, sf, tab, ray_col, "exact", tab.pivots)


def continue_from_basis(
    lp: LinearProgram, sf: StandardForm, basis: Sequence[int], max_pivots: int
) -> Optional[LpOutcome]:
    """Phase two started from a supplied basis; None if it is singular or infeasible."""
    tab = Tableau.from_basis(sf, basis)
    if tab is None:
        return None
    if any(row[-1] < 0 for row in tab.rows):
        return None
    if any(j >= sf.art_start and tab.rows[r][-1] != 0 for r, j in enumerate(tab.basis)):
        return None
    tab.drive_out_artificials()
    tab.pivots = 0
    tab.set_cost(sf.cost)
    ray_col = tab.run(sf.art_start, max_pivots)
    return _finish(lp, sf, tab, ray_col, "float-certified+exact", tab.pivots)
