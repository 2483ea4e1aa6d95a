from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent import laws
from coherent.coherence import check_coherence
from coherent.laws import LawError, make_law
from strategies import joint_laws, open_half, partition_laws

F = Fraction
HALF = F(1, 2)


def _invariants(law):
    assert sum(law.weights) == 1
    assert all(w > 0 for w in law.weights)
    assert all(0 <= v <= 1 for pt in law.points for v in pt)
    assert len(set(law.points)) == len(law)


def test_make_law_merges_and_drops():
    law = make_law([((0, 1), 1), ((0, 1), 1), ((1, 0), 2), ((1, 1), 0)])
    assert law.atoms == (((F(0), F(1)), HALF), ((F(1), F(0)), HALF))


@pytest.mark.parametrize(
    "atoms",
    [[((0, 2), 1)], [((0, 1), -1), ((1, 1), 2)], [((0, 1), 0)], [((0,), 1), ((0, 1), 1)]],
)
def test_make_law_rejects(atoms):
    with pytest.raises(LawError):
        make_law(atoms)


def test_constructor_validates():
    with pytest.raises(LawError):
        laws.DiscreteJointLaw(2, (laws.Atom((F(0), F(0)), HALF),))


def test_deldis_one_third():
    law = laws.deldis(F(1, 3))
    two3 = F(2, 3)
    assert dict(law.atoms) == {(two3, two3): HALF, (F(0), two3): F(1, 4), (two3, F(0)): F(1, 4)}


def test_deldis_half_diagonal_mass():
    law = laws.deldis(HALF)
    assert law.prob(lambda pt: pt[0] == pt[1]) == F(1, 3)


@given(open_half)
def test_deldis_means_and_correlation(d):
    law = laws.deldis(d)
    m = (1 - d) / (1 + d)
    assert law.means() == (m, m)
    corr = laws.correlation(law)
    assert corr.covariance < 0 and corr.squared == d * d
    assert check_coherence(law).coherent


def test_bernoulli_center():
    law = laws.bernoulli_center()
    assert law.means() == (HALF, HALF)
    assert law.prob(lambda pt: abs(pt[0] - pt[1]) == HALF) == 1
    for d in (HALF, F(3, 4), F(1)):
        assert law.prob(lambda pt: abs(pt[0] - pt[1]) >= 1 - d) == 1
    assert check_coherence(law).coherent


def test_daisy_examples():
    assert laws.daisy_pn(2, HALF) == F(2, 3)
    d = F(1, 5)
    pair = laws.daisy(2, (1 - d) / (1 + d))
    assert pair == laws.deldis(d)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("p", [F(1, 10), HALF, F(9, 10)])
def test_daisy_properties(n, p):
    law = laws.daisy(n, p)
    _invariants(law)
    pn = laws.daisy_pn(n, p)
    assert all(max(pt) == pn for pt in law.points)
    assert law.means() == (p,) * n
    assert check_coherence(law).coherent


def test_dp80_attaining_n2():
    law = laws.dp80_attaining(2, HALF)
    assert dict(law.atoms) == {(HALF, F(1)): HALF, (HALF, F(0)): HALF}
    assert law.expect(max) == F(3, 4)


@given(st.integers(1, 9).map(lambda k: F(k, 10)))
def test_dp80_pair_abs_diff(p):
    law = laws.dp80_attaining(2, p)
    assert law.expect(lambda pt: abs(pt[0] - pt[1])) == 2 * p * (1 - p)
    assert check_coherence(law).coherent


def test_independent_attaining():
    law = laws.independent_attaining(F(1, 4))
    assert law.prob(lambda pt: abs(pt[0] - pt[1]) >= F(3, 4)) == F(3, 8)
    assert check_coherence(law).coherent
    with pytest.raises(LawError):
        laws.independent_attaining(HALF)


def test_mixture_of_deldis_and_complement():
    d = F(1, 3)
    law = laws.mix([laws.deldis(d), laws.reflect(laws.deldis(d), "complement")], [HALF, HALF])
    assert len(law) == 6 and len(law.support(0)) == 4
    assert check_coherence(law).coherent


@given(partition_laws(), st.sampled_from(laws.REFLECTIONS))
def test_reflection_preserves_coherence(law, mode):
    assert check_coherence(laws.reflect(law, mode)).coherent


@given(joint_laws(max_atoms=4), st.sampled_from(laws.REFLECTIONS))
def test_reflection_verdict_invariant(law, mode):
    assert check_coherence(laws.reflect(law, mode)).status == check_coherence(law).status
    assert laws.reflect(laws.reflect(law, mode), mode) == law


@given(partition_laws(), partition_laws(), st.integers(0, 8))
def test_mixture_is_coherent(a, b, k):
    lam = F(k, 8)
    assert check_coherence(laws.mix([a, b], [lam, 1 - lam])).coherent


@given(joint_laws(k=3))
def test_json_round_trip(law):
    _invariants(law)
    assert laws.DiscreteJointLaw.from_json(law.to_json()) == law


def test_from_dict_rejects_garbage():
    with pytest.raises(LawError):
        laws.DiscreteJointLaw.from_dict({"atoms": []})
    with pytest.raises(LawError):
        laws.DiscreteJointLaw.from_dict({"k": 2, "atoms": [{"point": ["0", "1"], "weight": "0"}]})
