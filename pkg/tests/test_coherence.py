from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent import coherence as co
from coherent import laws
from coherent.laws import make_law
from strategies import joint_laws, open_half, partition_laws

F = Fraction
HALF = F(1, 2)
ANTI = make_law([((0, 1), 1), ((1, 0), 1)])


def test_deldis_witness_puts_a_on_diagonal():
    d = F(1, 4)
    law = laws.deldis(d)
    v = co.check_coherence(law)
    assert v.coherent and co.verify_verdict(law, v)
    q = 1 - d
    expected = [w if pt == (q, q) else 0 for pt, w in law]
    assert v.witness.mass_on_a() == expected


@pytest.mark.parametrize("mode", ["exact", "float-certified"])
def test_antidiagonal_incoherent(mode):
    v = co.check_coherence(ANTI, mode)
    assert v.status == co.INCOHERENT
    assert co.verify_verdict(ANTI, v)
    lp, labels = co.coherence_lp(ANTI)
    assert len(v.certificate) == len(labels)


def test_quick_certificate_examples():
    cert = co.quick_incoherence(ANTI)
    assert cert is not None and cert.holds_for(ANTI)
    assert co.QuickCertificate(HALF, HALF).holds_for(ANTI)
    center = make_law([((HALF, HALF), 1)])
    assert not co.QuickCertificate(F(1, 4), F(3, 4)).holds_for(center)
    assert co.quick_incoherence(center) is None


def test_verdict_serializes():
    out = co.check_coherence(ANTI).to_dict(ANTI)
    assert out["status"] == "Incoherent" and out["certificate"][0]["row"] == "split[0]"
    out = co.check_coherence(laws.deldis(F(1, 3))).to_dict(laws.deldis(F(1, 3)))
    assert {"point", "mass_on_A", "mass_on_Ac", "phi"} <= set(out["witness"][0])


@given(joint_laws())
def test_soundness_random(law):
    v = co.check_coherence(law)
    assert co.verify_verdict(law, v)
    if v.coherent:
        assert len(set(law.means())) == 1
        assert all(0 <= f <= 1 for f in v.witness.phi(law))
    if co.quick_incoherence(law) is not None:
        assert not v.coherent


@given(partition_laws(k=3))
def test_partition_laws_coherent_three(law):
    v = co.check_coherence(law)
    assert v.coherent and co.witness_satisfies_marginals(law, v.witness)


@given(joint_laws(max_atoms=4))
def test_modes_agree(law):
    a, b = co.check_coherence(law, "exact"), co.check_coherence(law, "float-certified")
    assert a.status == b.status
    assert co.verify_verdict(law, b)


def test_independent_pair_bernoulli_half():
    mu = [(0, HALF), (1, HALF)]
    v = co.check_independent_pair(mu, mu)
    assert v.means_equal and not v.coherent
    assert not co.check_coherence(laws.product_law(mu, mu)).coherent


@given(open_half)
def test_independent_attaining_marginals(d):
    mu = laws.independent_attaining_marginal(d)
    assert co.check_independent_pair(mu, mu).coherent


marginals = st.lists(st.tuples(st.integers(0, 4).map(lambda k: F(k, 4)), st.integers(1, 4)), min_size=1, max_size=3)


@given(marginals, marginals)
def test_independent_pair_matches_lp(mx, my):
    def norm(m):
        tot = sum(w for _, w in m)
        return [(v, F(w, tot)) for v, w in m]

    mx, my = norm(mx), norm(my)
    law = laws.product_law(mx, my)
    assert co.check_independent_pair(mx, my).coherent == co.check_coherence(law).coherent


def test_strassen_example():
    res = co.strassen_check(ANTI, (co.Interval.point(F(1)),), (co.Interval.point(F(1)),))
    assert not res.holds and res.slack == HALF


def test_strassen_deldis_all_subsets():
    ok, worst = co.strassen_verdict(laws.deldis(F(1, 3)))
    assert ok and worst[2] <= 0


def test_strassen_unequal_means_raises():
    with pytest.raises(laws.LawError):
        co.strassen_check(make_law([((0, 1), 1)]), (), ())


def test_parse_interval_union():
    u = co.parse_interval_union("[0,1/2) U {3/4} U (7/8,1]")
    assert [F(0) in u[0], HALF in u[0], F(3, 4) in u[1], F(7, 8) in u[2], F(1) in u[2]] == [
        True, False, True, False, True]
    assert co.parse_interval_union("{}") == ()
    with pytest.raises(ValueError):
        co.parse_interval_union("[1,0]")


@given(joint_laws(max_atoms=5))
def test_strassen_matches_lp(law):
    if max(len(law.support(0)), len(law.support(1))) > 4:
        return
    assert co.strassen_verdict(law)[0] == co.check_coherence(law).coherent


def test_gap_lemma_disjoint_case():
    res = co.verify_gap_lemma([1, 1, 1], A={0}, G={0}, H={1})
    assert res.holds and res.equality and res.case == "disjoint, A=G"


def test_gap_lemma_subset_cases():
    res = co.verify_gap_lemma([1, 1, 1], A={0}, G={0}, H={0, 1})
    assert res.equality and res.case == "G in H, A=G"
    res = co.verify_gap_lemma([1, 1, 1], A={1}, G={0, 1}, H={0})
    assert res.equality and res.case == "H in G, A=G\\H"
    res = co.verify_gap_lemma([1, 1, 1], A={1}, G={0}, H={1})
    assert res.equality and res.swapped


def test_gap_lemma_equal_events():
    res = co.verify_gap_lemma([1, 0, 1], A={0}, G={0, 1}, H={0})
    assert res.lhs == res.rhs == 0 and res.case == "G=H a.s."


def test_gap_lemma_zero_probability_raises():
    with pytest.raises(ValueError):
        co.verify_gap_lemma([1, 0], A=set(), G={1}, H={0})


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6), st.data())
def test_gap_lemma_random(ws, data):
    if sum(ws) == 0:
        return
    n = len(ws)
    subset = st.sets(st.integers(0, n - 1))
    A, G, H = data.draw(subset), data.draw(subset), data.draw(subset)
    if sum(ws[i] for i in G) == 0 or sum(ws[i] for i in H) == 0:
        return
    res = co.verify_gap_lemma(ws, A, G, H)
    assert res.holds
    assert res.case is None or res.equality
