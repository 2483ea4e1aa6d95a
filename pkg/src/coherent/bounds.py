"""Closed-form evaluations and bounds, exact where the formula is rational."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

from .numeric import RationalLike, as_rational

_HALF = Fraction(1, 2)


class BoundDomainError(ValueError):
    pass


def _unit(name: str, v: RationalLike) -> Fraction:
    v = as_rational(v)
    if not 0 <= v <= 1:
        raise BoundDomainError(f"{name} must lie in [0,1], got {v}")
    return v


def eps_1xn(delta: RationalLike) -> Fraction:
    d = _unit("delta", delta)
    return d if d < _HALF else Fraction(1)


def eps_2x2(delta: RationalLike) -> Fraction:
    d = _unit("delta", delta)
    return 2 * d / (1 + d) if d < _HALF else Fraction(1)


def upper_2delta(delta: RationalLike) -> Fraction:
    d = _unit("delta", delta)
    return min(2 * d, Fraction(1))


def daisy_pn(n: int, p: RationalLike) -> Fraction:
    if int(n) != n or n < 1:
        raise BoundDomainError("n must be an integer >= 1")
    p = _unit("p", p)
    return n * p / (n * p - p + 1)


def dp80_max(n: int, p: RationalLike) -> Fraction:
    """Upper bound on ``E max_i X_i`` for a coherent n-family with mean p."""
    if int(n) != n or n < 1:
        raise BoundDomainError("n must be an integer >= 1")
    p = _unit("p", p)
    return p * (n - p) / (1 + p * (n - 2))


def abs_diff_mean(p: RationalLike) -> Fraction:
    p = _unit("p", p)
    return 2 * p * (1 - p)


def markov(delta: RationalLike, p: RationalLike) -> Fraction:
    d = _unit("delta", delta)
    if d == 1:
        raise BoundDomainError("Markov bound needs delta < 1")
    p = _unit("p", p)
    return 2 * p * (1 - p) / (1 - d)


def moment_integral(r: int) -> Fraction:
    """``(2 - 2^-r) / (1 + r)``: integral of ``r u^(r-1) min(2(1-u), 1)``."""
    if int(r) != r or r < 1:
        raise BoundDomainError("r must be an integer >= 1")
    r = int(r)
    return (2 - Fraction(1, 2**r)) / (1 + r)


def conj_independent(delta: RationalLike) -> Fraction:
    d = _unit("delta", delta)
    return 2 * d * (1 - d)


BOUNDS: dict[str, tuple[Callable[..., Fraction], tuple[str, ...]]] = {
    "eps_1xn": (eps_1xn, ("delta",)),
    "eps_2x2": (eps_2x2, ("delta",)),
    "upper_2delta": (upper_2delta, ("delta",)),
    "daisy_pn": (daisy_pn, ("n", "p")),
    "dp80_max": (dp80_max, ("n", "p")),
    "abs_diff_mean": (abs_diff_mean, ("p",)),
    "markov": (markov, ("delta", "p")),
    "moment_integral": (moment_integral, ("r",)),
    "conj_independent": (conj_independent, ("delta",)),
}


def evaluate(bound_id: str, *args) -> Fraction:
    try:
        fn, names = BOUNDS[bound_id]
    except KeyError:
        raise BoundDomainError(f"unknown bound {bound_id!r}; known: {', '.join(BOUNDS)}") from None
    if len(args) != len(names):
        raise BoundDomainError(f"{bound_id} takes {len(names)} argument(s): {', '.join(names)}")
    coerced = [int(a) if n in ("n", "r") else as_rational(a) for a, n in zip(args, names)]
    return fn(*coerced)


def moment_integral_numeric(r: float, eps: Callable[[float], float] | None = None) -> float:
    """``int_0^1 r u^(r-1) eps(1-u) du`` by quadrature.

    ``eps`` defaults to ``min(2d, 1)``, which reproduces :func:`moment_integral`;
    pass :func:`eps_2x2_float` to integrate the conjectured exact tail instead.
    """
    from scipy.integrate import quad

    eps = eps or (lambda d: min(2 * d, 1.0))
    f = lambda u: r * u ** (r - 1) * eps(1 - u)  # noqa: E731
    pieces = [quad(f, 0.0, 0.5, epsabs=1e-13, epsrel=1e-13)[0],
              quad(f, 0.5, 1.0, epsabs=1e-13, epsrel=1e-13)[0]]
    return math.fsum(pieces)


def eps_2x2_float(d: float) -> float:
    return 2 * d / (1 + d) if d < 0.5 else 1.0


def claim_moment_integral_r1() -> float:
    """Closed form of the r = 1 integral under the 2x2 tail: ``3/2 + log 4 - log 9``."""
    return 1.5 + math.log(4) - math.log(9)
