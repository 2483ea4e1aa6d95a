import random
from fractions import Fraction

import numpy as np
import pytest

from coherent import lp
from coherent.extremal import Grid, TargetFunction, extremal_lp
from coherent.lp import kernels
from coherent.lp.exact import phase_one_cost
from coherent.lp.standard import standardize

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def _tableau(problem):
    sf = standardize(problem.canonical())
    m, n = sf.n_rows, sf.n_cols
    T = np.zeros((m + 1, n + 1))
    for i, row in enumerate(sf.matrix):
        T[i, :n] = [float(v) for v in row]
        T[i, -1] = float(sf.rhs[i])
    T[m, :n] = [float(v) for v in phase_one_cost(sf)]
    basis = np.array(sf.identity, dtype=np.int64)
    for r, b in enumerate(basis):
        if T[m, b]:
            T[m] -= T[m, b] * T[r]
    return sf, T, basis


def _problems():
    yield extremal_lp(Grid.uniform(6), TargetFunction.gap_indicator(Fraction(1, 4)).evaluate(Grid.uniform(6)))
    rng = random.Random(5)
    for _ in range(5):
        rows = [([rng.randint(-5, 5) for _ in range(6)], rng.choice(["<=", ">=", "="]), rng.randint(0, 6))
                for _ in range(4)]
        yield lp.LinearProgram.build([rng.randint(-3, 3) for _ in range(6)], rows + [([1] * 6, "<=", 9)])


@pytest.mark.parametrize("idx,problem", list(enumerate(_problems())))
def test_backends_make_identical_pivots(idx, problem):
    sf, T, basis = _tableau(problem)
    T2, basis2 = T.copy(), basis.copy()
    a = kernels.run_phase_numpy(T, basis, sf.n_cols, 10_000, 1e-9, 50)
    b = kernels.run_phase_numba(T2, basis2, sf.n_cols, 10_000, 1e-9, 50)
    assert a == b
    assert basis.tolist() == basis2.tolist()
    np.testing.assert_allclose(T, T2, rtol=1e-9, atol=1e-9)


def test_env_flag_selects_backend(monkeypatch):
    monkeypatch.setenv("COHERENT_DISABLE_NUMBA", "1")
    assert kernels.backend() == "numpy"
    g = Grid.uniform(11)
    out_np = lp.solve(extremal_lp(g, TargetFunction.gap_indicator(Fraction(1, 5)).evaluate(g)), "float-certified")
    monkeypatch.delenv("COHERENT_DISABLE_NUMBA")
    assert kernels.backend() == "numba"
    out_nb = lp.solve(extremal_lp(g, TargetFunction.gap_indicator(Fraction(1, 5)).evaluate(g)), "float-certified")
    assert out_np.value == out_nb.value == Fraction(1, 3)
