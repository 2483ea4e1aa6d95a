"""Suprema of ``E t(X, Y)`` over coherent laws supported on a fixed grid.

With the grid fixed, the coherence constraints are linear in the cell masses
``a_ij`` (on A) and ``b_ij`` (off A), so every supremum here is one LP.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import lp as lpmod
from .coherence import check_independent_pair, witness_satisfies_marginals
from .laws import DiscreteJointLaw, EventSplitWitness, MarginalLaw, independent_attaining_marginal, make_law
from .numeric import RationalLike, as_rational, fmt

log = logging.getLogger(__name__)

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)


class ExtremalError(Exception):
    pass


class InfeasibleTarget(ExtremalError):
    """No coherent law on the grid meets the mean constraint."""

    def __init__(self, message: str, outcome: lpmod.LpOutcome):
        super().__init__(message)
        self.outcome = outcome


class InvariantViolation(ExtremalError):
    pass


def _sorted_unit(values) -> tuple[Fraction, ...]:
    vals = tuple(sorted({as_rational(v) for v in values}))
    if not vals:
        raise ValueError("grid axes must be non-empty")
    if vals[0] < 0 or vals[-1] > 1:
        raise ValueError("grid values must lie in [0,1]")
    return vals


@dataclass(frozen=True)
class Grid:
    x_values: tuple[Fraction, ...]
    y_values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "x_values", _sorted_unit(self.x_values))
        object.__setattr__(self, "y_values", _sorted_unit(self.y_values))

    @classmethod
    def uniform(cls, n: int) -> "Grid":
        if n < 1:
            raise ValueError("uniform grid needs n >= 1 points")
        axis = [Fraction(0)] if n == 1 else [Fraction(i, n - 1) for i in range(n)]
        return cls(tuple(axis), tuple(axis))

    @classmethod
    def square(cls, values) -> "Grid":
        return cls(tuple(values), tuple(values))

    def augment(self, extra_x=(), extra_y=None) -> "Grid":
        extra_y = extra_x if extra_y is None else extra_y
        return Grid(self.x_values + tuple(extra_x), self.y_values + tuple(extra_y))

    def swapped(self) -> "Grid":
        return Grid(self.y_values, self.x_values)

    def complemented(self) -> "Grid":
        return Grid(tuple(1 - v for v in self.x_values), tuple(1 - v for v in self.y_values))

    def issuperset(self, other: "Grid") -> bool:
        return set(other.x_values) <= set(self.x_values) and set(other.y_values) <= set(self.y_values)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.x_values), len(self.y_values)

    def to_dict(self) -> dict:
        return {"x": [fmt(v) for v in self.x_values], "y": [fmt(v) for v in self.y_values]}


def attaining_points(delta: Fraction) -> tuple[Fraction, ...]:
    d = as_rational(delta)
    return (_ZERO, 1 - d, d, _ONE)


@dataclass(frozen=True)
class TargetFunction:
    """``t(x, y)`` evaluated on grid points.

    ``kind`` is one of ``gap_indicator`` (param: delta), ``max_xy``,
    ``abs_diff_pow`` (param: r), ``product_xy`` or ``custom_table``.
    """

    kind: str
    param: Optional[object] = None
    table: Optional[tuple[tuple[Fraction, ...], ...]] = None

    @classmethod
    def gap_indicator(cls, delta: RationalLike) -> "TargetFunction":
        return cls("gap_indicator", as_rational(delta))

    @classmethod
    def max_xy(cls) -> "TargetFunction":
        return cls("max_xy")

    @classmethod
    def product_xy(cls) -> "TargetFunction":
        return cls("product_xy")

    @classmethod
    def abs_diff_pow(cls, r) -> "TargetFunction":
        if isinstance(r, (int, Fraction)) and Fraction(r).denominator == 1:
            r = int(r)
            if r < 1:
                raise ValueError("exponent must be >= 1")
            return cls("abs_diff_pow", r)
        r = float(r)
        if r <= 0:
            raise ValueError("exponent must be positive")
        return cls("abs_diff_pow", r)

    @classmethod
    def custom(cls, table) -> "TargetFunction":
        return cls("custom_table", table=tuple(tuple(as_rational(v) for v in row) for row in table))

    @property
    def exact(self) -> bool:
        return not (self.kind == "abs_diff_pow" and isinstance(self.param, float))

    def __call__(self, x: Fraction, y: Fraction) -> Fraction:
        k = self.kind
        if k == "gap_indicator":
            return _ONE if abs(x - y) >= 1 - self.param else _ZERO
        if k == "max_xy":
            return max(x, y)
        if k == "product_xy":
            return x * y
        if k == "abs_diff_pow":
            if isinstance(self.param, int):
                return abs(x - y) ** self.param
            # rounded to the nearest double, then taken exactly
            return Fraction(float(abs(x - y)) ** self.param)
        raise ValueError(f"{k} needs a grid to evaluate")

    def evaluate(self, grid: Grid) -> list[list[Fraction]]:
        if self.kind == "custom_table":
            m, n = grid.shape
            if len(self.table) != m or any(len(row) != n for row in self.table):
                raise ValueError("custom table does not match the grid shape")
            return [list(row) for row in self.table]
        return [[self(x, y) for y in grid.y_values] for x in grid.x_values]

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if isinstance(self.param, Fraction):
            out["param"] = fmt(self.param)
        elif self.param is not None:
            out["param"] = self.param
        return out


@dataclass(frozen=True)
class ExtremalResult:
    value: Fraction
    law: DiscreteJointLaw
    witness: EventSplitWitness
    grid: Grid
    mean_constraint: Optional[Fraction] = None
    exact: bool = True
    lp_mode: str = "exact"
    pivots: int = 0

    def to_dict(self) -> dict:
        return {
            "value": fmt(self.value),
            "value_float": float(self.value),
            "exact": self.exact,
            "mean_constraint": None if self.mean_constraint is None else fmt(self.mean_constraint),
            "grid": self.grid.to_dict(),
            "law": self.law.to_dict(),
            "witness": self.witness.to_list(),
            "lp_mode": self.lp_mode,
        }


def extremal_lp(grid: Grid, table, mean_constraint: Optional[Fraction] = None) -> lpmod.LinearProgram:
    """Variables ``a_ij`` (block 0) then ``b_ij`` (block 1), cell index ``i*n + j``."""
    xs, ys = grid.x_values, grid.y_values
    m, n = len(xs), len(ys)
    mn = m * n
    rows = [([_ONE] * (2 * mn), lpmod.EQ, _ONE)]
    for i, x in enumerate(xs):
        coeffs = [_ZERO] * (2 * mn)
        for j in range(n):
            coeffs[i * n + j] = 1 - x
            coeffs[mn + i * n + j] = -x
        rows.append((coeffs, lpmod.EQ, _ZERO))
    for j, y in enumerate(ys):
        coeffs = [_ZERO] * (2 * mn)
        for i in range(m):
            coeffs[i * n + j] = 1 - y
            coeffs[mn + i * n + j] = -y
        rows.append((coeffs, lpmod.EQ, _ZERO))
    if mean_constraint is not None:
        coeffs = [xs[c // n] for c in range(mn)] * 2
        rows.append((coeffs, lpmod.EQ, mean_constraint))
    flat = [table[i][j] for i in range(m) for j in range(n)]
    return lpmod.LinearProgram(
        tuple(flat * 2),
        tuple(lpmod.Constraint(tuple(c), rel, rhs) for c, rel, rhs in rows),
    )


def optimize_target(
    grid: Grid,
    target: TargetFunction,
    mean_constraint: Optional[RationalLike] = None,
    mode: str = "exact",
) -> ExtremalResult:
    """Maximize ``E t(X,Y)`` over coherent laws on ``grid`` (optionally with ``E X = p``)."""
    p = None if mean_constraint is None else as_rational(mean_constraint)
    table = target.evaluate(grid)
    lp = extremal_lp(grid, table, p)
    out = lpmod.solve(lp, mode)
    if out.status is lpmod.Status.INFEASIBLE:
        raise InfeasibleTarget(f"no coherent law on the grid has mean {p}", out)
    if out.status is not lpmod.Status.OPTIMAL:
        raise InvariantViolation(f"extremal LP returned {out.status.value}")
    xs, ys = grid.x_values, grid.y_values
    n = len(ys)
    mn = len(xs) * n
    sol = out.solution
    cells = {}
    for c in range(mn):
        a, b = sol[c], sol[mn + c]
        if a or b:
            cells[(xs[c // n], ys[c % n])] = (a, b)
    law = make_law([(pt, a + b) for pt, (a, b) in cells.items()])
    witness = EventSplitWitness(tuple(cells[pt] for pt in law.points))
    res = ExtremalResult(out.value, law, witness, grid, p, target.exact, out.mode, out.pivots)
    _check_result(res, table)
    return res


def _check_result(res: ExtremalResult, table) -> None:
    if not witness_satisfies_marginals(res.law, res.witness):
        raise InvariantViolation("optimal law fails the coherence equations")
    xi = {v: i for i, v in enumerate(res.grid.x_values)}
    yi = {v: j for j, v in enumerate(res.grid.y_values)}
    value = sum((w * table[xi[x]][yi[y]] for (x, y), w in res.law), _ZERO)
    if value != res.value:
        raise InvariantViolation("objective does not re-evaluate to the LP value")
    mx, my = res.law.means()
    if mx != my:
        raise InvariantViolation("coherent law with unequal means")
    if res.mean_constraint is not None and mx != res.mean_constraint:
        raise InvariantViolation("mean constraint not met")


def eps_grid(delta: RationalLike, grid: Grid, mode: str = "exact") -> ExtremalResult:
    """Grid-restricted ``sup P(|X - Y| >= 1 - delta)``."""
    d = as_rational(delta)
    if not 0 <= d <= 1:
        raise ValueError("delta must lie in [0,1]")
    return optimize_target(grid, TargetFunction.gap_indicator(d), mode=mode)


def eps_fixed_mean(delta: RationalLike, p: RationalLike, grid: Grid, mode: str = "exact") -> ExtremalResult:
    d, p = as_rational(delta), as_rational(p)
    if not (0 <= d <= 1 and 0 <= p <= 1):
        raise ValueError("delta and p must lie in [0,1]")
    return optimize_target(grid, TargetFunction.gap_indicator(d), mean_constraint=p, mode=mode)


def sup_moment(r, grid: Grid, mean_constraint: Optional[RationalLike] = None, mode: str = "exact") -> ExtremalResult:
    return optimize_target(grid, TargetFunction.abs_diff_pow(r), mean_constraint, mode)


def eps_one_by_n(delta: RationalLike, y_grid: Sequence, mode: str = "exact") -> ExtremalResult:
    """Best single X value: maximize over grids ``{x} x y_grid``, ``x`` in ``y_grid u {delta}``."""
    d = as_rational(delta)
    ys = _sorted_unit(y_grid)
    best = None
    for x in sorted(set(ys) | {d}):
        try:
            res = eps_grid(d, Grid((x,), ys), mode)
        except InfeasibleTarget:
            continue
        if best is None or res.value > best.value:
            best = res
    if best is None:
        raise ExtremalError("no single-valued X is coherent with this Y grid")
    return best


def markov_bound_check(delta: RationalLike, p: RationalLike) -> Fraction:
    d, p = as_rational(delta), as_rational(p)
    if d >= 1:
        raise ValueError("Markov bound needs delta < 1")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0,1]")
    return 2 * p * (1 - p) / (1 - d)


@dataclass(frozen=True)
class SweepRow:
    delta: Fraction
    value: Fraction
    lower: Fraction
    upper: Fraction
    lower_applicable: bool
    result: ExtremalResult = field(repr=False, compare=False)

    @property
    def within_bounds(self) -> bool:
        low_ok = self.value >= self.lower or not self.lower_applicable
        return low_ok and self.value <= self.upper

    @property
    def excess(self) -> bool:
        """Strictly above ``2 delta / (1 + delta)`` for ``delta < 1/2``."""
        return self.delta < _HALF and self.value > self.lower

    def to_dict(self) -> dict:
        return {
            "delta": fmt(self.delta), "delta_float": float(self.delta),
            "value": fmt(self.value), "value_float": float(self.value),
            "lower": fmt(self.lower), "upper": fmt(self.upper),
            "within_bounds": self.within_bounds, "excess": self.excess,
            "grid_shape": list(self.result.grid.shape),
        }


def eps_sweep(
    deltas: Sequence[RationalLike],
    grid_family: Callable[[Fraction], Grid],
    mode: str = "exact",
    jobs: int = 1,
) -> list[SweepRow]:
    """``eps_grid`` for each delta with bounds ``2d/(1+d)`` and ``min(2d, 1)``."""
    ds = [as_rational(d) for d in deltas]
    grids = [grid_family(d) for d in ds]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(eps_grid, ds, grids, [mode] * len(ds)))
    else:
        results = [eps_grid(d, g, mode) for d, g in zip(ds, grids)]
    rows = []
    for d, g, res in zip(ds, grids, results):
        lower = 2 * d / (1 + d)
        applicable = {_ZERO, 1 - d} <= set(g.x_values) and {_ZERO, 1 - d} <= set(g.y_values)
        row = SweepRow(d, res.value, lower, min(2 * d, _ONE), applicable, res)
        if row.excess:
            log.warning("grid value %s exceeds 2d/(1+d) at delta=%s: counterexample candidate", res.value, d)
        rows.append(row)
    return rows


# --- independent pairs -----------------------------------------------------


def _gap_prob(mu_x: MarginalLaw, mu_y: MarginalLaw, d: Fraction) -> Fraction:
    return sum(
        (px * py for x, px in mu_x for y, py in mu_y if abs(x - y) >= 1 - d), _ZERO
    )


def _mean(mu) -> Fraction:
    return sum((v * w for v, w in mu), _ZERO)


def _best_response(fixed: MarginalLaw, support: Sequence[Fraction], d: Fraction, p: Fraction):
    """Optimal weights on ``support`` for the free marginal, given the fixed one.

    Constraints: a probability vector with mean ``p`` such that every
    upper-threshold coherence inequality for the independent pair holds.
    Returns None if infeasible.
    """
    support = sorted(set(support))
    k = len(support)
    tails = []
    acc_p = acc_e = _ZERO
    for v, w in sorted(fixed, reverse=True):
        acc_p += w
        acc_e += v * w
        tails.append((acc_p, acc_e))
    rows = [([_ONE] * k, lpmod.EQ, _ONE), (list(support), lpmod.EQ, p)]
    for fp, fe in tails:
        for l, t in enumerate(support):
            coeffs = [(y - fp) if j >= l else _ZERO for j, y in enumerate(support)]
            rows.append((coeffs, lpmod.LE, p - fe))
    obj = [sum((w for x, w in fixed if abs(x - y) >= 1 - d), _ZERO) for y in support]
    out = lpmod.solve_exact(lpmod.LinearProgram.build(obj, rows))
    if not out.optimal:
        return None
    return tuple((y, w) for y, w in zip(support, out.solution) if w)


@dataclass(frozen=True)
class IndependentSearchResult:
    delta: Fraction
    best_value: Fraction
    best_mu_x: MarginalLaw
    best_mu_y: MarginalLaw
    bound: Fraction
    restarts: int
    seeded_value: Optional[Fraction] = None

    @property
    def conjecture_margin(self) -> Fraction:
        return self.bound - self.best_value

    @property
    def counterexample(self) -> bool:
        return self.best_value > self.bound

    def to_dict(self) -> dict:
        mu = lambda m: [[fmt(v), fmt(w)] for v, w in m]  # noqa: E731
        return {
            "delta": fmt(self.delta),
            "best_value": fmt(self.best_value), "best_value_float": float(self.best_value),
            "bound": fmt(self.bound), "conjecture_margin": fmt(self.conjecture_margin),
            "best_mu_x": mu(self.best_mu_x), "best_mu_y": mu(self.best_mu_y),
            "restarts": self.restarts,
            "seeded_value": None if self.seeded_value is None else fmt(self.seeded_value),
            "counterexample": self.counterexample,
        }


def alternate(mu_x: MarginalLaw, mu_y: MarginalLaw, d: Fraction, x_support=None, y_support=None, max_rounds: int = 25):
    """Alternating best responses from a coherent independent pair.

    The objective never decreases because the current marginal is always
    feasible for the next LP.
    """
    xs = sorted(set(x_support or ()) | {v for v, _ in mu_x})
    ys = sorted(set(y_support or ()) | {v for v, _ in mu_y})
    value = _gap_prob(mu_x, mu_y, d)
    for _ in range(max_rounds):
        p = _mean(mu_x)
        new_y = _best_response(mu_x, ys, d, p)
        new_x = _best_response(new_y, xs, d, p) if new_y is not None else None
        if new_x is None:
            break
        new_value = _gap_prob(new_x, new_y, d)
        if new_value <= value:
            break
        mu_x, mu_y, value = new_x, new_y, new_value
    return mu_x, mu_y, value


def independent_search(
    delta: RationalLike,
    support_budget: tuple[int, int] = (2, 2),
    restarts: int = 100,
    rng_seed: int = 0,
    grid_step: Fraction = Fraction(1, 20),
    seed_marginals: Optional[tuple[MarginalLaw, MarginalLaw]] = None,
    report_path: Optional[Path] = None,
) -> IndependentSearchResult:
    """Heuristic search for independent coherent pairs maximizing ``P(|X-Y| >= 1-delta)``.

    Each restart draws ``m`` support points for X and ``n`` for Y from the
    uniform grid of spacing ``grid_step`` (Y also gets the mean of X so the
    starting point is feasible), random integer weights for X and a point
    mass at the mean for Y, then runs :func:`alternate`.  No global optimality
    is claimed.
    """
    d = as_rational(delta)
    if not 0 < d < _HALF:
        raise ValueError("delta must lie in (0, 1/2)")
    m, n = support_budget
    rng = random.Random(rng_seed)
    steps = int(1 / grid_step)
    axis = [Fraction(i, steps) for i in range(steps + 1)]
    bound = 2 * d * (1 - d)

    if seed_marginals is None:
        seed_marginals = (independent_attaining_marginal(d),) * 2
    sx, sy, seeded_value = alternate(*seed_marginals, d)
    best = (seeded_value, sx, sy)

    for _ in range(restarts):
        xs = sorted(rng.sample(axis, min(m, len(axis))))
        ws = [rng.randint(1, 10) for _ in xs]
        total = sum(ws)
        mu_x = tuple((x, Fraction(w, total)) for x, w in zip(xs, ws))
        p = _mean(mu_x)
        ys = rng.sample(axis, min(n, len(axis))) + [p]
        mu_y = ((p, _ONE),)
        ax, ay, value = alternate(mu_x, mu_y, d, xs, ys)
        if value > best[0]:
            best = (value, ax, ay)

    value, bx, by = best
    verdict = check_independent_pair(bx, by)
    if not verdict.coherent:
        raise InvariantViolation("search produced an incoherent independent pair")
    res = IndependentSearchResult(d, value, bx, by, bound, restarts, seeded_value)
    if res.counterexample:
        log.warning("independent pair beats 2d(1-d) at delta=%s", d)
        if report_path is not None:
            Path(report_path).write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
    return res


# --- 2x2 extreme-law probe ------------------------------------------------


@dataclass(frozen=True)
class ProbeRow:
    trial: int
    grid: Grid
    full_value: Fraction
    best_2x2: Fraction

    @property
    def gap(self) -> Fraction:
        return self.full_value - self.best_2x2

    def to_dict(self) -> dict:
        return {
            "trial": self.trial, "grid": self.grid.to_dict(),
            "full_value": fmt(self.full_value), "best_2x2": fmt(self.best_2x2),
            "gap": fmt(self.gap), "counterexample": self.gap > 0,
        }


def two_by_two_probe(
    shape: tuple[int, int] = (2, 3),
    trials: int = 20,
    rng_seed: int = 0,
    grid_step: Fraction = Fraction(1, 10),
    mode: str = "exact",
) -> list[ProbeRow]:
    """Random linear objectives on random ``m x n`` grids vs all 2x2 sub-grids.

    A positive gap would exhibit an extreme coherent law that is not 2x2.
    """
    m, n = shape
    rng = random.Random(rng_seed)
    steps = int(1 / grid_step)
    axis = [Fraction(i, steps) for i in range(steps + 1)]
    rows = []
    for trial in range(trials):
        while True:
            xs = sorted(rng.sample(axis, m))
            ys = sorted(rng.sample(axis, n))
            if max(xs[0], ys[0]) < min(xs[-1], ys[-1]):
                break
        table = [[Fraction(rng.randint(-20, 20)) for _ in ys] for _ in xs]
        grid = Grid(tuple(xs), tuple(ys))
        full = optimize_target(grid, TargetFunction.custom(table), mode=mode).value
        best = None
        for ii in combinations(range(m), min(2, m)):
            for jj in combinations(range(n), min(2, n)):
                sub = Grid(tuple(xs[i] for i in ii), tuple(ys[j] for j in jj))
                sub_table = [[table[i][j] for j in jj] for i in ii]
                try:
                    v = optimize_target(sub, TargetFunction.custom(sub_table), mode=mode).value
                except InfeasibleTarget:
                    continue
                best = v if best is None else max(best, v)
        rows.append(ProbeRow(trial, grid, full, best))
    return rows
