"""Equality standard form shared by the exact and floating-point engines."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import EQ, GE, LE, CanonicalLP

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class StandardForm:
    """``M z = r, z >= 0`` with ``r >= 0``.

    Columns are laid out as structural variables, then one slack/surplus per
    inequality row, then one artificial per row lacking a ``+1`` slack.
    ``identity[i]`` is the column that equals ``e_i`` (a slack or an
    artificial); those columns form the starting basis.  ``signs[i]`` is +1 or
    -1 depending on whether row ``i`` was negated to make its rhs non-negative.
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    cost: tuple[Fraction, ...]
    signs: tuple[int, ...]
    identity: tuple[int, ...]
    n_structural: int
    art_start: int

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    @property
    def n_cols(self) -> int:
        return len(self.cost)

    def duals_to_canonical(self, pi):
        return tuple(s * p for s, p in zip(self.signs, pi))


def standardize(can: CanonicalLP) -> StandardForm:
    m, n = can.n_rows, can.n_vars
    signs, rels = [], []
    for rel, b in zip(can.rels, can.rhs):
        s = -1 if b < 0 else 1
        signs.append(s)
        if s < 0 and rel != EQ:
            rel = GE if rel == LE else LE
        rels.append(rel)
    n_slack = sum(1 for r in rels if r != EQ)
    n_art = sum(1 for r in rels if r != LE)
    art_start = n + n_slack
    width = art_start + n_art

    matrix, identity = [], []
    slack_col, art_col = n, art_start
    for i in range(m):
        s = signs[i]
        row = [a if s > 0 else -a for a in can.rows[i]] + [_ZERO] * (width - n)
        if rels[i] == LE:
            row[slack_col] = _ONE
            identity.append(slack_col)
            slack_col += 1
        else:
            if rels[i] == GE:
                row[slack_col] = -_ONE
                slack_col += 1
            row[art_col] = _ONE
            identity.append(art_col)
            art_col += 1
        matrix.append(tuple(row))
    rhs = tuple(b if s > 0 else -b for b, s in zip(can.rhs, signs))
    cost = tuple(can.cost) + (_ZERO,) * (width - n)
    return StandardForm(tuple(matrix), rhs, cost, tuple(signs), tuple(identity), n, art_start)
