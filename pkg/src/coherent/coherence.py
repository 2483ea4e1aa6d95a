"""Exact coherence decisions, witnesses, certificates and auxiliary checkers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import chain, combinations
from typing import Iterable, Optional, Sequence

from . import lp as lpmod
from .laws import DiscreteJointLaw, EventSplitWitness, LawError, MarginalLaw
from .numeric import as_rational, fmt, parse_rational

_ZERO = Fraction(0)
COHERENT, INCOHERENT = "Coherent", "Incoherent"


@dataclass(frozen=True)
class QuickCertificate:
    """Thresholds with ``(X - a)(Y - b) < 0`` surely and ``P(Y > b) > 0``.

    With ``swapped`` the roles of the two coordinates are exchanged.
    """

    a: Fraction
    b: Fraction
    swapped: bool = False

    def holds_for(self, law: DiscreteJointLaw) -> bool:
        if law.k != 2 or not 0 <= self.a <= self.b <= 1:
            return False
        pts = [(y, x) if self.swapped else (x, y) for x, y in law.points]
        if any((x - self.a) * (y - self.b) >= 0 for x, y in pts):
            return False
        return any(y > self.b for _, y in pts)

    def to_dict(self) -> dict:
        return {"a": fmt(self.a), "b": fmt(self.b), "swapped": self.swapped}


@dataclass(frozen=True)
class CoherenceVerdict:
    status: str
    witness: Optional[EventSplitWitness] = None
    certificate: Optional[tuple[Fraction, ...]] = None
    quick: Optional[QuickCertificate] = None

    @property
    def coherent(self) -> bool:
        return self.status == COHERENT

    def to_dict(self, law: DiscreteJointLaw) -> dict:
        out: dict = {"status": self.status}
        if self.witness is not None:
            out["witness"] = [
                {"point": [fmt(v) for v in pt], **m, "phi": fmt(f)}
                for pt, m, f in zip(law.points, self.witness.to_list(), self.witness.phi(law))
            ]
        if self.certificate is not None:
            _, labels = coherence_lp(law)
            out["certificate"] = [
                {"row": label, "multiplier": fmt(y)} for label, y in zip(labels, self.certificate)
            ]
        if self.quick is not None:
            out["quick_certificate"] = self.quick.to_dict()
        return out


def coherence_lp(law: DiscreteJointLaw) -> tuple[lpmod.LinearProgram, list[str]]:
    """Feasibility LP in the masses ``a_s`` (on A) and ``b_s`` (off A) per atom.

    Rows: ``a_s + b_s = w_s`` for every atom, then for every coordinate ``i``
    and value ``v`` of its support ``sum_{s_i = v} a_s = v P(X_i = v)``.
    """
    S = len(law)
    n = 2 * S
    rows, labels = [], []
    for s, (pt, w) in enumerate(law):
        coeffs = [_ZERO] * n
        coeffs[s] = coeffs[S + s] = Fraction(1)
        rows.append((coeffs, lpmod.EQ, w))
        labels.append(f"split[{s}]")
    for i in range(law.k):
        for v, pv in law.marginal(i):
            coeffs = [_ZERO] * n
            for s, pt in enumerate(law.points):
                if pt[i] == v:
                    coeffs[s] = Fraction(1)
            rows.append((coeffs, lpmod.EQ, v * pv))
            labels.append(f"marginal[{i}]={fmt(v)}")
    return lpmod.LinearProgram.build([0] * n, rows), labels


def witness_satisfies_marginals(law: DiscreteJointLaw, witness: EventSplitWitness) -> bool:
    if not witness.is_valid_for(law):
        return False
    mass_a = witness.mass_on_a()
    for i in range(law.k):
        for v, pv in law.marginal(i):
            total = sum((m for m, pt in zip(mass_a, law.points) if pt[i] == v), _ZERO)
            if total != v * pv:
                return False
    return True


def check_coherence(law: DiscreteJointLaw, mode: str = "exact") -> CoherenceVerdict:
    lp, _ = coherence_lp(law)
    out = lpmod.solve(lp, mode)
    if out.status is lpmod.Status.INFEASIBLE:
        return CoherenceVerdict(INCOHERENT, certificate=out.certificate)
    S = len(law)
    sol = out.solution
    witness = EventSplitWitness(tuple((sol[s], sol[S + s]) for s in range(S)))
    return CoherenceVerdict(COHERENT, witness=witness)


def verify_verdict(law: DiscreteJointLaw, verdict: CoherenceVerdict) -> bool:
    """Exact re-check of whatever evidence the verdict carries."""
    if verdict.coherent:
        return verdict.witness is not None and witness_satisfies_marginals(law, verdict.witness)
    if verdict.quick is not None and verdict.quick.holds_for(law):
        return True
    if verdict.certificate is None:
        return False
    lp, _ = coherence_lp(law)
    return lpmod.model.verify_farkas(lp.canonical(), verdict.certificate)


def _threshold_candidates(values: Iterable[Fraction]) -> list[Fraction]:
    vals = sorted(set(values) | {Fraction(0), Fraction(1)})
    mids = [(u + v) / 2 for u, v in zip(vals, vals[1:])]
    return sorted(set(vals) | set(mids))


def quick_incoherence(law: DiscreteJointLaw) -> Optional[QuickCertificate]:
    """Search thresholds ``a <= b`` for the opposite-sign incoherence pattern."""
    if law.k != 2:
        raise LawError("quick_incoherence needs k = 2")
    cands = _threshold_candidates(v for pt in law.points for v in pt)
    for swapped in (False, True):
        for a in cands:
            for b in cands:
                if a <= b:
                    cert = QuickCertificate(a, b, swapped)
                    if cert.holds_for(law):
                        return cert
    return None


@dataclass(frozen=True)
class IndependentPairVerdict:
    coherent: bool
    means_equal: bool
    violations: tuple[tuple[Fraction, Fraction], ...] = ()


def _upper_moments(mu: MarginalLaw):
    """For each support value v: (P(V >= v), E[V; V >= v])."""
    out = {}
    tail_p, tail_e = _ZERO, _ZERO
    for v, pv in sorted(mu, reverse=True):
        tail_p += pv
        tail_e += v * pv
        out[v] = (tail_p, tail_e)
    return out


def _as_marginal(mu) -> MarginalLaw:
    return tuple(sorted((as_rational(v), as_rational(p)) for v, p in mu))


def check_independent_pair(mu_x, mu_y) -> IndependentPairVerdict:
    """Coherence of independent X ~ mu_x, Y ~ mu_y via upper-threshold inequalities.

    A violation ``(s, t)`` means the inequality fails for ``B = {X >= s}``,
    ``C = {Y >= t}``, i.e. thresholds just below the support values s and t.
    """
    mu_x, mu_y = _as_marginal(mu_x), _as_marginal(mu_y)
    p = sum((v * w for v, w in mu_x), _ZERO)
    if p != sum((v * w for v, w in mu_y), _ZERO):
        return IndependentPairVerdict(False, False)
    ux, uy = _upper_moments(mu_x), _upper_moments(mu_y)
    bad = []
    for s, (ps, es) in sorted(ux.items()):
        for t, (pt, et) in sorted(uy.items()):
            if es + et > p + ps * pt:
                bad.append((s, t))
    return IndependentPairVerdict(not bad, True, tuple(bad))


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    closed_lo: bool = True
    closed_hi: bool = True

    def __post_init__(self):
        if self.lo > self.hi or (self.lo == self.hi and not (self.closed_lo and self.closed_hi)):
            raise ValueError(f"empty or inverted interval {self}")

    def __contains__(self, v: Fraction) -> bool:
        above = v >= self.lo if self.closed_lo else v > self.lo
        below = v <= self.hi if self.closed_hi else v < self.hi
        return above and below

    @classmethod
    def point(cls, v: Fraction) -> "Interval":
        return cls(v, v)


IntervalUnion = tuple[Interval, ...]

_INTERVAL_RE = re.compile(r"^\s*([\[\(])\s*([^,\s]+)\s*,\s*([^\]\)\s]+)\s*([\]\)])\s*$")


def parse_interval_union(text: str) -> IntervalUnion:
    """Parse e.g. ``"[0,1/2) U {3/4} U (7/8,1]"``; ``"{}"`` is the empty set."""
    text = text.strip()
    if text in ("{}", "", "empty"):
        return ()
    parts = []
    for chunk in re.split(r"\s*[Uu]\s*", text):
        if chunk.startswith("{") and chunk.endswith("}"):
            for v in chunk[1:-1].split(","):
                parts.append(Interval.point(parse_rational(v)))
            continue
        m = _INTERVAL_RE.match(chunk)
        if not m:
            raise ValueError(f"malformed interval {chunk!r}")
        parts.append(
            Interval(parse_rational(m.group(2)), parse_rational(m.group(3)),
                     m.group(1) == "[", m.group(4) == "]")
        )
    return tuple(parts)


def _in_union(v: Fraction, union: IntervalUnion) -> bool:
    return any(v in iv for iv in union)


@dataclass(frozen=True)
class StrassenResult:
    holds: bool
    slack: Fraction


def strassen_check(law: DiscreteJointLaw, B: IntervalUnion, C: IntervalUnion) -> StrassenResult:
    """Evaluate ``E[X;X in B] + E[Y;Y in C] - p - P(X in B, Y in C)``; holds iff <= 0."""
    if law.k != 2:
        raise LawError("strassen_check needs k = 2")
    for union in (B, C):
        if not all(isinstance(iv, Interval) for iv in union):
            raise ValueError("B and C must be unions of Interval objects")
    mx, my = law.means()
    if mx != my:
        raise LawError("strassen_check requires equal means")
    slack = (
        law.expect(lambda pt: pt[0] if _in_union(pt[0], B) else _ZERO)
        + law.expect(lambda pt: pt[1] if _in_union(pt[1], C) else _ZERO)
        - mx
        - law.prob(lambda pt: _in_union(pt[0], B) and _in_union(pt[1], C))
    )
    return StrassenResult(slack <= 0, slack)


def _subsets(values: Sequence[Fraction]):
    return chain.from_iterable(combinations(values, r) for r in range(len(values) + 1))


def strassen_verdict(law: DiscreteJointLaw) -> tuple[bool, Optional[tuple]]:
    """Exhaustive inequality check over all unions of support points.

    Returns ``(holds, worst)``, ``worst = (B values, C values, slack)`` for the
    largest slack seen (None when means differ).
    """
    mx, my = law.means()
    if mx != my:
        return False, None
    worst = None
    for bs in _subsets(law.support(0)):
        B = tuple(Interval.point(v) for v in bs)
        for cs in _subsets(law.support(1)):
            C = tuple(Interval.point(v) for v in cs)
            res = strassen_check(law, B, C)
            if worst is None or res.slack > worst[2]:
                worst = (bs, cs, res.slack)
    return worst[2] <= 0, worst


GAP_CASES = ("disjoint, A=G", "G in H, A=G", "H in G, A=G\\H")


@dataclass(frozen=True)
class GapLemmaResult:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    equality: bool
    case: Optional[str]
    swapped: bool = False


def _cond(num: Fraction, den: Fraction) -> Fraction:
    return num / den if den else _ZERO


def _classify(p, q, r, a, b, c) -> Optional[str]:
    if p > 0 and q == 0 and r > 0 and a == 1 and b == 0 and c == 0:
        return GAP_CASES[0]
    if p == 0 and q > 0 and r > 0 and a == 0 and b == 1 and c == 0:
        return GAP_CASES[1]
    if p > 0 and q > 0 and r == 0 and a == 1 and b == 0 and c == 0:
        return GAP_CASES[2]
    return None


def verify_gap_lemma(weights: Sequence, A: Iterable[int], G: Iterable[int], H: Iterable[int]) -> GapLemmaResult:
    """``|P(A|G) - P(A|H)|`` against ``1 - P(GH) / P(G u H)`` on a finite space.

    Atoms are indices into ``weights``.  On equality the matching case is
    reported (``swapped`` when it matches with G and H exchanged).  When G and
    H coincide up to null atoms both sides vanish; this is reported as
    equality with case ``"G=H a.s."``.
    """
    w = [as_rational(x) for x in weights]
    A, G, H = set(A), set(G), set(H)
    P = lambda S: sum((w[i] for i in S), _ZERO)  # noqa: E731
    pG, pH = P(G), P(H)
    if pG == 0 or pH == 0:
        raise ValueError("conditioning sets need positive probability")
    p, q, r = P(G - H), P(G & H), P(H - G)
    a = _cond(P(A & (G - H)), p)
    b = _cond(P(A & G & H), q)
    c = _cond(P(A & (H - G)), r)
    diff = P(A & G) / pG - P(A & H) / pH
    lhs = abs(diff)
    rhs = 1 - q / (pG + pH - q)
    equality = lhs == rhs
    case, swapped = None, False
    if equality:
        if p == 0 and r == 0:
            case = "G=H a.s."
        elif diff >= 0 and (case := _classify(p, q, r, a, b, c)):
            pass
        elif diff <= 0 and (case := _classify(r, q, p, c, b, a)):
            swapped = True
    return GapLemmaResult(lhs, rhs, lhs <= rhs, equality, case, swapped)
