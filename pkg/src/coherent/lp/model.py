"""Linear programs, outcomes, and exact certificate checks.

Every LP is a maximization.  Internally it is rewritten in a *canonical* form

    maximize  c.x'   subject to   A_i x' (rel_i) b_i,   x' >= 0

where ``x' = x - lower`` and every finite upper bound becomes an extra ``<=``
row appended after the user's constraints.  Dual and Farkas certificates are
indexed by canonical rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..numeric import as_rational, fmt

LE, EQ, GE = "<=", "=", ">="


class LpError(Exception):
    pass


class LpDimensionError(LpError, ValueError):
    pass


class CertificateError(LpError):
    """An outcome failed exact re-verification."""


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    rel: str
    rhs: Fraction


@dataclass(frozen=True)
class CanonicalLP:
    rows: tuple[tuple[Fraction, ...], ...]
    rels: tuple[str, ...]
    rhs: tuple[Fraction, ...]
    cost: tuple[Fraction, ...]
    shift: tuple[Fraction, ...]
    constant: Fraction

    @property
    def n_vars(self) -> int:
        return len(self.cost)

    @property
    def n_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...] = ()
    lower: Optional[tuple[Fraction, ...]] = None
    upper: Optional[tuple[Optional[Fraction], ...]] = None

    def __post_init__(self):
        n = len(self.objective)
        if n == 0:
            raise LpDimensionError("objective must have at least one variable")
        for k, con in enumerate(self.constraints):
            if len(con.coeffs) != n:
                raise LpDimensionError(
                    f"constraint {k} has {len(con.coeffs)} coefficients, expected {n}"
                )
            if con.rel not in (LE, EQ, GE):
                raise LpError(f"constraint {k}: unknown relation {con.rel!r}")
        for name in ("lower", "upper"):
            bounds = getattr(self, name)
            if bounds is not None and len(bounds) != n:
                raise LpDimensionError(f"{name} bounds have length {len(bounds)}, expected {n}")
        if self.lower is not None and self.upper is not None:
            for j, (lo, hi) in enumerate(zip(self.lower, self.upper)):
                if hi is not None and hi < lo:
                    raise LpError(f"variable {j}: upper bound below lower bound")

    @classmethod
    def build(cls, objective, constraints=(), lower=None, upper=None) -> "LinearProgram":
        """Convenience constructor accepting ints/strings/Fractions.

        ``constraints`` is an iterable of ``(coeffs, rel, rhs)``.
        """
        obj = tuple(as_rational(v) for v in objective)
        cons = tuple(
            Constraint(tuple(as_rational(v) for v in coeffs), rel, as_rational(rhs))
            for coeffs, rel, rhs in constraints
        )
        lo = None if lower is None else tuple(as_rational(v) for v in lower)
        hi = None if upper is None else tuple(None if v is None else as_rational(v) for v in upper)
        return cls(obj, cons, lo, hi)

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def canonical(self) -> CanonicalLP:
        n = self.n_vars
        shift = self.lower if self.lower is not None else (Fraction(0),) * n
        rows, rels, rhs = [], [], []
        for con in self.constraints:
            rows.append(con.coeffs)
            rels.append(con.rel)
            rhs.append(con.rhs - sum((a * l for a, l in zip(con.coeffs, shift) if l), Fraction(0)))
        if self.upper is not None:
            for j, hi in enumerate(self.upper):
                if hi is None:
                    continue
                e = [Fraction(0)] * n
                e[j] = Fraction(1)
                rows.append(tuple(e))
                rels.append(LE)
                rhs.append(hi - shift[j])
        constant = sum((c * l for c, l in zip(self.objective, shift) if l), Fraction(0))
        return CanonicalLP(tuple(rows), tuple(rels), tuple(rhs), self.objective, tuple(shift), constant)

    def dump(self) -> str:
        """Line-oriented text rendering, for debugging only."""
        lines = ["max " + " ".join(fmt(c) for c in self.objective)]
        for con in self.constraints:
            lines.append(" ".join(fmt(c) for c in con.coeffs) + f" {con.rel} {fmt(con.rhs)}")
        if self.lower is not None:
            lines.append("lower " + " ".join(fmt(v) for v in self.lower))
        if self.upper is not None:
            lines.append("upper " + " ".join("inf" if v is None else fmt(v) for v in self.upper))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LpOutcome:
    """Result of a solve.

    ``certificate`` holds canonical-row duals for ``Optimal`` and a Farkas
    vector for ``Infeasible``.  ``Unbounded`` carries a feasible ``solution``
    and an improving ``ray`` instead.
    """

    status: Status
    solution: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    certificate: Optional[tuple[Fraction, ...]] = None
    ray: Optional[tuple[Fraction, ...]] = None
    pivots: int = 0
    mode: str = "exact"
    basis: Optional[tuple[int, ...]] = field(default=None, compare=False, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


def _row_ok(lhs: Fraction, rel: str, rhs: Fraction) -> bool:
    if rel == LE:
        return lhs <= rhs
    if rel == GE:
        return lhs >= rhs
    return lhs == rhs


def _dual_sign_ok(y: Fraction, rel: str) -> bool:
    if rel == LE:
        return y >= 0
    if rel == GE:
        return y <= 0
    return True


def _column_sums(can: CanonicalLP, y: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * can.n_vars
    for yi, row in zip(y, can.rows):
        if not yi:
            continue
        for j, a in enumerate(row):
            if a:
                out[j] += yi * a
    return out


def primal_feasible(can: CanonicalLP, xs: Sequence[Fraction]) -> bool:
    if len(xs) != can.n_vars or any(v < 0 for v in xs):
        return False
    return all(_row_ok(_dot(row, xs), rel, b) for row, rel, b in zip(can.rows, can.rels, can.rhs))


def verify_optimal(can: CanonicalLP, xs: Sequence[Fraction], y: Sequence[Fraction]) -> bool:
    """Primal feasibility, dual feasibility and zero duality gap, all exact."""
    if len(y) != can.n_rows or not primal_feasible(can, xs):
        return False
    if not all(_dual_sign_ok(yi, rel) for yi, rel in zip(y, can.rels)):
        return False
    if any(s < c for s, c in zip(_column_sums(can, y), can.cost)):
        return False
    return _dot(y, can.rhs) == _dot(can.cost, xs)


def verify_farkas(can: CanonicalLP, y: Sequence[Fraction]) -> bool:
    """``y`` proves infeasibility: sign-adjusted, ``y^T A >= 0`` and ``y^T b < 0``."""
    if len(y) != can.n_rows:
        return False
    if not all(_dual_sign_ok(yi, rel) for yi, rel in zip(y, can.rels)):
        return False
    if any(s < 0 for s in _column_sums(can, y)):
        return False
    return _dot(y, can.rhs) < 0


def verify_ray(can: CanonicalLP, xs: Sequence[Fraction], d: Sequence[Fraction]) -> bool:
    if not primal_feasible(can, xs) or len(d) != can.n_vars or any(v < 0 for v in d):
        return False
    zero = Fraction(0)
    if not all(_row_ok(_dot(row, d), rel, zero) for row, rel in zip(can.rows, can.rels)):
        return False
    return _dot(can.cost, d) > 0


def verify_outcome(lp: LinearProgram, outcome: LpOutcome) -> None:
    """Raise :class:`CertificateError` unless ``outcome`` checks out exactly."""
    can = lp.canonical()
    if outcome.status is Status.INFEASIBLE:
        if outcome.certificate is None or not verify_farkas(can, outcome.certificate):
            raise CertificateError("Farkas certificate does not verify")
        return
    if outcome.solution is None:
        raise CertificateError(f"{outcome.status.value} outcome without a solution")
    xs = [v - s for v, s in zip(outcome.solution, can.shift)]
    if outcome.status is Status.UNBOUNDED:
        if outcome.ray is None or not verify_ray(can, xs, outcome.ray):
            raise CertificateError("unboundedness ray does not verify")
        return
    if outcome.certificate is None or not verify_optimal(can, xs, outcome.certificate):
        raise CertificateError("optimality certificate does not verify")
    if outcome.value != _dot(lp.objective, outcome.solution):
        raise CertificateError("reported value differs from objective at solution")
