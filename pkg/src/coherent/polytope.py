"""Extreme coherent laws on the four corners of a rectangle.

Coherent laws on the corners of ``R = [x1,x2] x [y1,y2]`` form a convex set
that lives in a 2-dimensional affine slice of the probability simplex on the
corners.  We use the masses of the two corners with ``X = x1`` as affine
coordinates ``(u, v) = (P(x1, y1), P(x1, y2))``; when ``y1 < y2`` the other two
corner masses are determined by total mass one and ``E X = E Y``.

Vertices are found by gift wrapping with an LP support oracle: each edge of
the current hull is tested by maximizing its outward normal over the full
8-variable coherence polytope, lexicographically tie-broken so the returned
point is a true vertex of the projection.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import lp as lpmod
from .extremal import Grid, extremal_lp
from .laws import DiscreteJointLaw, make_law
from .numeric import RationalLike, as_rational, fmt

_ZERO = Fraction(0)

EMPTY, DEGENERATE, NONEMPTY, POLYGON = "Empty", "Degenerate", "Nonempty", "Polygon"

Coord = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Rect:
    x1: Fraction
    x2: Fraction
    y1: Fraction
    y2: Fraction

    def __post_init__(self):
        for name in ("x1", "x2", "y1", "y2"):
            v = as_rational(getattr(self, name))
            object.__setattr__(self, name, v)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} = {v} is outside [0,1]")
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError("rectangle sides must satisfy x1 <= x2 and y1 <= y2")

    @classmethod
    def of(cls, x1: RationalLike, x2: RationalLike, y1: RationalLike, y2: RationalLike) -> "Rect":
        return cls(as_rational(x1), as_rational(x2), as_rational(y1), as_rational(y2))

    @property
    def corners(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Order: (x1,y1), (x1,y2), (x2,y1), (x2,y2)."""
        return ((self.x1, self.y1), (self.x1, self.y2), (self.x2, self.y1), (self.x2, self.y2))

    def swapped(self) -> "Rect":
        return Rect(self.y1, self.y2, self.x1, self.x2)

    def complemented(self) -> "Rect":
        return Rect(1 - self.x2, 1 - self.x1, 1 - self.y2, 1 - self.y1)

    def to_list(self) -> list[str]:
        return [fmt(self.x1), fmt(self.x2), fmt(self.y1), fmt(self.y2)]


def rect_feasibility(R: Rect) -> tuple[str, Optional[Fraction]]:
    """Diagonal criterion: (status, p) with p set only for the degenerate case."""
    lo, hi = max(R.x1, R.y1), min(R.x2, R.y2)
    if lo > hi:
        return EMPTY, None
    if lo == hi:
        return DEGENERATE, lo
    return NONEMPTY, None


@dataclass(frozen=True)
class PolygonResult:
    status: str
    rect: Rect
    vertices: tuple[DiscreteJointLaw, ...] = ()
    coords: tuple[Coord, ...] = ()
    point: Optional[Fraction] = None
    lp_calls: int = 0

    @property
    def count(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "rect": self.rect.to_list(),
            "point": None if self.point is None else fmt(self.point),
            "vertex_count": self.count,
            "coords": [[fmt(u), fmt(v)] for u, v in self.coords],
            "vertices": [law.to_dict() for law in self.vertices],
        }


def affine_coords(law: DiscreteJointLaw, R: Rect) -> Coord:
    mass = dict(law.atoms)
    return mass.get((R.x1, R.y1), _ZERO), mass.get((R.x1, R.y2), _ZERO)


class _Oracle:
    def __init__(self, R: Rect):
        self.R = R
        self.grid = Grid((R.x1, R.x2), (R.y1, R.y2))
        self.calls = 0

    def _lp(self, direction: Coord, pinned=None) -> lpmod.LinearProgram:
        du, dv = direction
        lp = extremal_lp(self.grid, [[du, dv], [_ZERO, _ZERO]])
        if pinned is None:
            return lp
        (pu, pv), value = pinned
        # a-block and b-block both carry the corner mass
        coeffs = (pu, pv, _ZERO, _ZERO) * 2
        return lpmod.LinearProgram(
            lp.objective, lp.constraints + (lpmod.Constraint(coeffs, lpmod.EQ, value),)
        )

    def _solve(self, lp) -> tuple:
        self.calls += 1
        out = lpmod.solve_exact(lp)
        if not out.optimal:
            raise lpmod.LpError(f"support LP returned {out.status.value}")
        return out

    def lexmax(self, primary: Coord, secondary: Coord) -> tuple[Coord, DiscreteJointLaw]:
        first = self._solve(self._lp(primary))
        out = self._solve(self._lp(secondary, pinned=(primary, first.value)))
        sol = out.solution
        weights = [sol[c] + sol[4 + c] for c in range(4)]
        law = make_law(zip(self.R.corners, weights))
        return (weights[0], weights[1]), law


def _dot(a: Coord, b: Coord) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def enumerate_vertices(R: Rect) -> PolygonResult:
    status, p = rect_feasibility(R)
    if status == EMPTY:
        return PolygonResult(EMPTY, R)
    if status == DEGENERATE:
        law = make_law([((p, p), 1)])
        return PolygonResult(DEGENERATE, R, (law,), point=p)
    if not (R.x1 < R.x2 and R.y1 < R.y2):
        raise ValueError("vertex enumeration needs x1 < x2 and y1 < y2")

    oracle = _Oracle(R)
    right = oracle.lexmax((1, 0), (0, 1))
    left = oracle.lexmax((-1, 0), (0, -1))
    hull = [right] if right[0] == left[0] else [right, left]
    i = 0
    while len(hull) > 1 and i < len(hull):
        (P, _), (Q, _) = hull[i], hull[(i + 1) % len(hull)]
        edge = (Q[0] - P[0], Q[1] - P[1])
        normal = (edge[1], -edge[0])
        cand = oracle.lexmax(normal, edge)
        if _dot(normal, cand[0]) > _dot(normal, P):
            hull.insert(i + 1, cand)
        else:
            i += 1
    return PolygonResult(
        POLYGON, R, tuple(law for _, law in hull), tuple(c for c, _ in hull), lp_calls=oracle.calls
    )


def in_polygon(law: DiscreteJointLaw, result: PolygonResult) -> bool:
    """Exact membership of a corner law in the convex hull of the vertices."""
    target = affine_coords(law, result.rect)
    k = len(result.coords)
    rows = [([1] * k, lpmod.EQ, 1),
            ([c[0] for c in result.coords], lpmod.EQ, target[0]),
            ([c[1] for c in result.coords], lpmod.EQ, target[1])]
    return lpmod.solve_exact(lpmod.LinearProgram.build([0] * k, rows)).optimal


def is_extreme(result: PolygonResult, index: int) -> bool:
    """True when vertex ``index`` is not a convex combination of the others."""
    others = [c for j, c in enumerate(result.coords) if j != index]
    if not others:
        return True
    u, v = result.coords[index]
    rows = [([1] * len(others), lpmod.EQ, 1),
            ([c[0] for c in others], lpmod.EQ, u),
            ([c[1] for c in others], lpmod.EQ, v)]
    return not lpmod.solve_exact(lpmod.LinearProgram.build([0] * len(others), rows)).optimal


def is_counterclockwise(coords) -> bool:
    n = len(coords)
    if n < 3:
        return True
    for i in range(n):
        a, b, c = coords[i], coords[(i + 1) % n], coords[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross <= 0:
            return False
    return True


def random_rectangles(count: int, seed: int, denominator: int = 24) -> list[Rect]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        xs = sorted(Fraction(rng.randint(0, denominator), denominator) for _ in range(2))
        ys = sorted(Fraction(rng.randint(0, denominator), denominator) for _ in range(2))
        if xs[0] < xs[1] and ys[0] < ys[1]:
            out.append(Rect(xs[0], xs[1], ys[0], ys[1]))
    return out


def central_rectangles() -> list[Rect]:
    """Rectangles straddling the center of the square."""
    out = []
    for a in (Fraction(1, 10), Fraction(1, 5), Fraction(3, 10)):
        for b in (Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)):
            out.append(Rect(a, 1 - b, b, 1 - a))
            out.append(Rect(a, 1 - a, b, 1 - b))
    return out


def vertex_histogram(results) -> dict[int, int]:
    return dict(sorted(Counter(r.count for r in results if r.status == POLYGON).items()))
