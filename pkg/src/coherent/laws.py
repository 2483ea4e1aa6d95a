"""Finite-support joint laws of opinion vectors and the example constructions."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

from .numeric import RationalLike, as_rational, fmt, parse_rational

Point = tuple[Fraction, ...]
MarginalLaw = tuple[tuple[Fraction, Fraction], ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LawError(ValueError):
    pass


class Atom(NamedTuple):
    point: Point
    weight: Fraction


@dataclass(frozen=True)
class DiscreteJointLaw:
    """Law of ``(X_1, ..., X_k)`` on ``[0,1]^k`` with finitely many atoms.

    Atoms are distinct, have positive weight, and are kept sorted by point.
    Build instances with :func:`make_law`; the constructor only validates.
    """

    k: int
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if self.k < 1:
            raise LawError("k must be at least 1")
        if not self.atoms:
            raise LawError("a law needs at least one atom")
        seen = set()
        for pt, w in self.atoms:
            if len(pt) != self.k:
                raise LawError(f"atom {pt} has dimension {len(pt)}, expected {self.k}")
            if any(v < 0 or v > 1 for v in pt):
                raise LawError(f"atom {pt} leaves [0,1]^{self.k}")
            if w <= 0:
                raise LawError("atom weights must be positive")
            if pt in seen:
                raise LawError(f"duplicate atom {pt}")
            seen.add(pt)
        if sum(w for _, w in self.atoms) != 1:
            raise LawError("weights must sum to exactly 1")

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    @property
    def points(self) -> list[Point]:
        return [a.point for a in self.atoms]

    @property
    def weights(self) -> list[Fraction]:
        return [a.weight for a in self.atoms]

    def prob(self, pred: Callable[[Point], bool]) -> Fraction:
        return sum((w for pt, w in self.atoms if pred(pt)), _ZERO)

    def expect(self, f: Callable[[Point], Fraction]) -> Fraction:
        return sum((w * f(pt) for pt, w in self.atoms), _ZERO)

    def marginal(self, i: int) -> MarginalLaw:
        acc: dict[Fraction, Fraction] = defaultdict(Fraction)
        for pt, w in self.atoms:
            acc[pt[i]] += w
        return tuple(sorted(acc.items()))

    def marginals(self) -> list[MarginalLaw]:
        return [self.marginal(i) for i in range(self.k)]

    def support(self, i: int) -> list[Fraction]:
        return sorted({pt[i] for pt in self.points})

    def means(self) -> tuple[Fraction, ...]:
        return tuple(self.expect(lambda pt, i=i: pt[i]) for i in range(self.k))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "atoms": [{"point": [fmt(v) for v in pt], "weight": fmt(w)} for pt, w in self.atoms],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteJointLaw":
        try:
            k = int(data["k"])
            atoms = [
                ([parse_rational(str(v)) for v in a["point"]], parse_rational(str(a["weight"])))
                for a in data["atoms"]
            ]
        except (KeyError, TypeError) as exc:
            raise LawError(f"malformed law document: {exc}") from exc
        law = make_law(atoms, k=k)
        return law

    @classmethod
    def from_json(cls, text: str) -> "DiscreteJointLaw":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EventSplitWitness:
    """Per-atom split of the law's mass between ``A`` and its complement."""

    masses: tuple[tuple[Fraction, Fraction], ...]

    def phi(self, law: DiscreteJointLaw) -> list[Fraction]:
        return [a / w for (a, _), w in zip(self.masses, law.weights)]

    def mass_on_a(self) -> list[Fraction]:
        return [a for a, _ in self.masses]

    def is_valid_for(self, law: DiscreteJointLaw) -> bool:
        if len(self.masses) != len(law):
            return False
        return all(a >= 0 and b >= 0 and a + b == w for (a, b), w in zip(self.masses, law.weights))

    def to_list(self) -> list[dict]:
        return [{"mass_on_A": fmt(a), "mass_on_Ac": fmt(b)} for a, b in self.masses]


def make_law(atoms: Iterable, k: int | None = None) -> DiscreteJointLaw:
    """Normalize, merge and validate ``(point, weight)`` pairs.

    Weights are rescaled to sum to one, zero weights dropped and duplicate
    points merged by exact equality.
    """
    acc: dict[Point, Fraction] = defaultdict(Fraction)
    dim = k
    for point, weight in atoms:
        pt = tuple(as_rational(v) for v in point)
        w = as_rational(weight)
        if dim is None:
            dim = len(pt)
        if len(pt) != dim:
            raise LawError(f"atom {pt} has dimension {len(pt)}, expected {dim}")
        if w < 0:
            raise LawError("negative weight")
        if any(v < 0 or v > 1 for v in pt):
            raise LawError(f"coordinate out of [0,1] in {pt}")
        acc[pt] += w
    total = sum(acc.values(), _ZERO)
    if total == 0:
        raise LawError("total weight is zero")
    kept = sorted((pt, w / total) for pt, w in acc.items() if w)
    return DiscreteJointLaw(dim, tuple(Atom(pt, w) for pt, w in kept))


def _open_unit(name: str, value: Fraction) -> Fraction:
    value = as_rational(value)
    if not 0 < value < 1:
        raise LawError(f"{name} must lie in (0,1), got {value}")
    return value


def deldis(delta: RationalLike) -> DiscreteJointLaw:
    d = _open_unit("delta", delta)
    q = 1 - d
    return make_law(
        [((q, q), (1 - d) / (1 + d)), ((_ZERO, q), d / (1 + d)), ((q, _ZERO), d / (1 + d))]
    )


def bernoulli_center() -> DiscreteJointLaw:
    half = Fraction(1, 2)
    return make_law([((half, _ZERO), half), ((half, _ONE), half)])


def daisy_pn(n: int, p: RationalLike) -> Fraction:
    p = as_rational(p)
    return n * p / (n * p - p + 1)


def daisy(n: int, p: RationalLike) -> DiscreteJointLaw:
    """The ``(n, p)``-daisy: a center of mass ``p`` and ``n`` equal petals.

    Each coordinate equals ``p_n`` on the center and on its own petal, 0 on
    the other petals.
    """
    if n < 1:
        raise LawError("daisy needs n >= 1")
    p = as_rational(p)
    if not 0 <= p <= 1:
        raise LawError("p must lie in [0,1]")
    pn = daisy_pn(n, p)
    atoms = [((pn,) * n, p)]
    for i in range(n):
        atoms.append((tuple(pn if j == i else _ZERO for j in range(n)), (1 - p) / n))
    return make_law(atoms, k=n)


def dp80_attaining(n: int, p: RationalLike) -> DiscreteJointLaw:
    """(n-1, p)-daisy coordinates plus the indicator of the daisy center."""
    if n < 2:
        raise LawError("dp80_attaining needs n >= 2")
    p = as_rational(p)
    if not 0 <= p <= 1:
        raise LawError("p must lie in [0,1]")
    m = n - 1
    pm = daisy_pn(m, p)
    atoms = [((pm,) * m + (_ONE,), p)]
    for i in range(m):
        atoms.append((tuple(pm if j == i else _ZERO for j in range(m)) + (_ZERO,), (1 - p) / m))
    return make_law(atoms, k=n)


def product_law(mu_x: Sequence[tuple], mu_y: Sequence[tuple]) -> DiscreteJointLaw:
    return make_law(
        [((as_rational(x), as_rational(y)), as_rational(px) * as_rational(py))
         for x, px in mu_x for y, py in mu_y]
    )


def independent_attaining_marginal(delta: RationalLike) -> MarginalLaw:
    d = as_rational(delta)
    return ((_ZERO, d), (1 - d, 1 - d))


def independent_attaining(delta: RationalLike) -> DiscreteJointLaw:
    """Independent X, Y each distributed as ``(1-delta) * Bernoulli(1-delta)``."""
    d = as_rational(delta)
    if not 0 < d < Fraction(1, 2):
        raise LawError(f"delta must lie in (0,1/2), got {d}")
    mu = independent_attaining_marginal(d)
    return product_law(mu, mu)


REFLECTIONS = ("swap", "complement", "both")


def reflect(law: DiscreteJointLaw, mode: str) -> DiscreteJointLaw:
    if law.k != 2:
        raise LawError("reflections are defined for pairs (k = 2)")
    maps = {
        "swap": lambda x, y: (y, x),
        "complement": lambda x, y: (1 - x, 1 - y),
        "both": lambda x, y: (1 - y, 1 - x),
    }
    if mode not in maps:
        raise LawError(f"unknown reflection {mode!r}")
    f = maps[mode]
    return make_law([(f(*pt), w) for pt, w in law])


def mix(laws: Sequence[DiscreteJointLaw], weights: Sequence[RationalLike]) -> DiscreteJointLaw:
    if len(laws) != len(weights) or not laws:
        raise LawError("need one weight per law")
    ws = [as_rational(w) for w in weights]
    if any(w < 0 for w in ws) or sum(ws) != 1:
        raise LawError("mixture weights must be non-negative and sum to 1")
    k = laws[0].k
    if any(law.k != k for law in laws):
        raise LawError("cannot mix laws of different dimension")
    return make_law([(pt, lam * w) for law, lam in zip(laws, ws) for pt, w in law], k=k)


def means(law: DiscreteJointLaw) -> tuple[Fraction, ...]:
    return law.means()


def marginals(law: DiscreteJointLaw) -> list[MarginalLaw]:
    return law.marginals()


@dataclass(frozen=True)
class Correlation:
    covariance: Fraction
    variance_product: Fraction

    @property
    def value(self) -> float:
        return float(self.covariance) / math.sqrt(float(self.variance_product))

    @property
    def squared(self) -> Fraction:
        return self.covariance**2 / self.variance_product


def correlation(law: DiscreteJointLaw) -> Correlation:
    """Pearson correlation of a pair as an exact (cov, varX*varY) pair."""
    if law.k != 2:
        raise LawError("correlation needs k = 2")
    mx, my = law.means()
    cov = law.expect(lambda pt: (pt[0] - mx) * (pt[1] - my))
    vx = law.expect(lambda pt: (pt[0] - mx) ** 2)
    vy = law.expect(lambda pt: (pt[1] - my) ** 2)
    if vx == 0 or vy == 0:
        raise LawError("correlation undefined: a coordinate is constant")
    return Correlation(cov, vx * vy)
