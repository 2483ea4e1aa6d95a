"""Acceptance criteria 1-10.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible with ``-v``/``-s``
and in the tee'd log).  Tolerances are the pinned ones: exact equality
everywhere except criterion 5, which compares floats at 1e-4 and 1e-9.
"""

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from coherent import bounds, laws
from coherent import coherence as co
from coherent import extremal as ex
from coherent import polytope as pt
from oracles import conditional_law
from polyutil import oracle_weights, vertex_weights

F = Fraction
HALF = F(1, 2)
DELTAS = [F(1, 10), F(1, 4), F(1, 3), F(2, 5), F(9, 20)]
ARTIFACTS = Path(__file__).parent / "artifacts"


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return emit


def lower(d):
    return 2 * d / (1 + d)


def test_criterion_01_two_by_two_grid(report):
    bad, slow = [], []
    for d in DELTAS:
        t0 = time.perf_counter()
        v = ex.eps_grid(d, ex.Grid.square([0, d, 1 - d, 1])).value
        if time.perf_counter() - t0 >= 1.0:
            slow.append(d)
        if v != lower(d):
            bad.append((d, v))
    for d in (HALF, F(3, 4)):
        t0 = time.perf_counter()
        v = ex.eps_grid(d, ex.Grid((HALF,), (F(0), F(1)))).value
        if time.perf_counter() - t0 >= 1.0:
            slow.append(d)
        if v != 1:
            bad.append((d, v))
    report(1, not bad and not slow, f"eps_grid on {{0,d,1-d,1}}^2 exact; mismatches={bad} over-1s={slow}")


def _counterexample(name, payload):
    ARTIFACTS.mkdir(exist_ok=True)
    path = ARTIFACTS / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


@pytest.mark.parametrize("mode,limit", [("float-certified", 60.0), ("exact", None)])
def test_criterion_02_uniform_21(report, mode, limit):
    grid = ex.Grid.uniform(21)
    bad, times = [], []
    for d in DELTAS:
        t0 = time.perf_counter()
        res = ex.eps_grid(d, grid.augment(ex.attaining_points(d)), mode)
        times.append(time.perf_counter() - t0)
        if res.value != lower(d):
            bad.append((str(d), str(res.value)))
            if res.value > lower(d):
                _counterexample(f"eps_excess_{d.numerator}_{d.denominator}.json",
                                {"delta": str(d), "value": str(res.value), "law": res.law.to_dict()})
    over = [t for t in times if limit is not None and t >= limit]
    report(2, not bad and not over,
           f"[{mode}] 21-point grids + attaining points equal 2d/(1+d); mismatches={bad} "
           f"max time {max(times):.2f}s")


def test_criterion_03_sandwich(report):
    ds = [F(k, 20) for k in range(1, 20)]
    rows = ex.eps_sweep(ds, lambda d: ex.Grid.uniform(11).augment(ex.attaining_points(d)), "float-certified")
    bad = [(str(r.delta), str(r.value)) for r in rows
           if not (lower(r.delta) <= r.value <= min(2 * r.delta, 1))]
    report(3, not bad, f"{len(rows)} sweep rows within [2d/(1+d), min(2d,1)]; violations={bad}")


def test_criterion_04_max_and_absdiff(report):
    bad = []
    for p in (F(1, 10), F(1, 4), HALF, F(3, 4)):
        grids = [ex.Grid.square([0, p, 1]), ex.Grid.uniform(5).augment([p]),
                 ex.Grid.uniform(11).augment([p]), ex.Grid.square([0, p, 1, F(1, 3), F(7, 8)])]
        for g in grids:
            m = ex.optimize_target(g, ex.TargetFunction.max_xy(), p).value
            a = ex.optimize_target(g, ex.TargetFunction.abs_diff_pow(1), p).value
            if m != p * (2 - p) or a != 2 * p * (1 - p) or a != 2 * m - 2 * p:
                bad.append((str(p), g.shape, str(m), str(a)))
    report(4, not bad, f"max = p(2-p), |x-y| = 2p(1-p), identity holds; failures={bad}")


def test_criterion_05_moment(report):
    values = [ex.sup_moment(1, ex.Grid.uniform(n)).value for n in (3, 11, 21)]
    at_half = ex.sup_moment(1, ex.Grid.uniform(11), HALF).value
    integral = bounds.moment_integral_numeric(1, bounds.eps_2x2_float)
    closed = bounds.claim_moment_integral_r1()
    ok = (
        all(v == HALF for v in values)
        and at_half == HALF
        and HALF < bounds.moment_integral(1) == F(3, 4)
        and float(HALF) < 0.68907
        and abs(integral - 0.68907) < 1e-4
        and abs(integral - closed) < 1e-9
    )
    report(5, ok, f"sup E|X-Y| = {[str(v) for v in values]} (p=1/2: {at_half}) < 3/4; integral {integral:.10f} "
                  f"vs 0.68907 and closed form {closed:.10f}")


def _corpus():
    rng = random.Random(2024)
    vals = [F(0), F(1, 4), F(1, 3), HALF, F(2, 3), F(3, 4), F(1)]
    corpus = []

    def rand_law(max_atoms=5):
        n = rng.randint(1, max_atoms)
        return laws.make_law([((rng.choice(vals), rng.choice(vals)), rng.randint(1, 6)) for _ in range(n)])

    for _ in range(350):
        corpus.append(("random", rand_law()))
    for _ in range(250):
        law = rand_law(3)
        corpus.append(("symmetrized", laws.mix([law, laws.reflect(law, "swap")], [HALF, HALF])))
    for _ in range(300):
        n = rng.randint(1, 6)
        ws = [rng.randint(1, 5) for _ in range(n)]
        A = {i for i in range(n) if rng.random() < 0.5}
        parts = []
        for _ in range(2):
            lab = [rng.randint(0, 2) for _ in range(n)]
            parts.append([[i for i in range(n) if lab[i] == c] for c in set(lab)])
        corpus.append(("partition", laws.make_law(list(conditional_law(ws, A, parts).items()))))
    paper = [laws.bernoulli_center()]
    for d in (F(1, 10), F(1, 4), F(1, 3), HALF, F(2, 3)):
        paper.append(laws.deldis(d))
        paper.append(laws.mix([laws.deldis(d), laws.reflect(laws.deldis(d), "complement")], [HALF, HALF]))
    for d in (F(1, 10), F(1, 4), F(1, 3)):
        paper.append(laws.independent_attaining(d))
    for p in (F(1, 10), HALF, F(9, 10)):
        paper.append(laws.dp80_attaining(2, p))
        paper.append(laws.daisy(2, p))
        for n in (3, 4):
            corpus.append(("daisy-k", laws.daisy(n, p)))
            corpus.append(("dp80-k", laws.dp80_attaining(n, p)))
    for law in paper:
        corpus.append(("paper", law))
        for mode in laws.REFLECTIONS:
            corpus.append(("reflection", laws.reflect(law, mode)))
    coherent_pairs = [law for kind, law in corpus if kind == "partition"]
    for _ in range(100):
        a, b = rng.sample(coherent_pairs, 2)
        lam = F(rng.randint(0, 6), 6)
        corpus.append(("mixture", laws.mix([a, b], [lam, 1 - lam])))
    return corpus


def _products():
    rng = random.Random(99)
    quarters = [F(k, 4) for k in range(5)]
    out = []
    for d in (F(1, 10), F(1, 4), F(1, 3)):
        mu = laws.independent_attaining_marginal(d)
        out.append((mu, mu))
    while len(out) < 150:
        def rand_marginal():
            vs = rng.sample(quarters, rng.randint(1, 3))
            ws = [rng.randint(1, 4) for _ in vs]
            return tuple((v, F(w, sum(ws))) for v, w in zip(vs, ws))

        mx = rand_marginal()
        my = mx if rng.random() < 0.3 else rand_marginal()
        out.append((mx, my))
    return out


def test_criterion_06_checker_soundness(report):
    corpus = _corpus()
    problems = []
    strassen_checked = 0
    for kind, law in corpus:
        v = co.check_coherence(law)
        if not co.verify_verdict(law, v):
            problems.append((kind, "evidence", law.to_dict()))
        if v.coherent and len(set(law.means())) != 1:
            problems.append((kind, "means", law.to_dict()))
        if kind in ("partition", "mixture") and not v.coherent:
            problems.append((kind, "constructed coherent law rejected", law.to_dict()))
        if law.k != 2:
            continue
        if co.quick_incoherence(law) is not None and v.coherent:
            problems.append((kind, "quick", law.to_dict()))
        if max(len(law.support(0)), len(law.support(1))) <= 4:
            strassen_checked += 1
            if co.strassen_verdict(law)[0] != v.coherent:
                problems.append((kind, "strassen", law.to_dict()))
    products = _products()
    for mx, my in products:
        if co.check_independent_pair(mx, my).coherent != co.check_coherence(laws.product_law(mx, my)).coherent:
            problems.append(("product", "threshold", [mx, my]))
    n = len(corpus) + len(products)
    report(6, n >= 1000 and not problems,
           f"{n} laws ({len(products)} products, {strassen_checked} exhaustive Strassen); problems={problems[:3]}")


def _gap_vectors():
    from itertools import product

    vecs = []
    for n in (1, 2, 3):
        vecs += [w for w in product((0, 1, 2), repeat=n) if sum(w)]
    vecs += [(1, 1, 1, 1), (1, 2, 3, 4), (0, 1, 1, 2), (3, 0, 0, 1), (1, 0, 2, 0), (2, 2, 1, 0)]
    vecs += [(1, 1, 1, 1, 1), (1, 2, 3, 4, 5), (0, 1, 2, 0, 3), (5, 1, 0, 1, 1)]
    return vecs


def test_criterion_07_gap_lemma(report):
    fails, equalities, classified, trivial, unclassified = 0, 0, 0, 0, []
    for w in _gap_vectors():
        n = len(w)
        masks = range(1 << n)
        sets = [{i for i in range(n) if m >> i & 1} for m in masks]
        positive = [S for S in sets if sum(w[i] for i in S) > 0]
        for A in sets:
            for G in positive:
                for H in positive:
                    res = co.verify_gap_lemma(w, A, G, H)
                    if not res.holds:
                        fails += 1
                    if res.equality:
                        equalities += 1
                        if res.case in co.GAP_CASES:
                            classified += 1
                        elif res.case == "G=H a.s.":
                            trivial += 1
                        else:
                            unclassified.append((w, A, G, H))
    # G = H up to null atoms gives 0 = 0, outside the three listed cases;
    # counted separately, see the decisions ledger.
    report(7, fails == 0 and not unclassified,
           f"inequality failures={fails}; {equalities} equalities: {classified} in the three cases "
           f"(up to swap), {trivial} with G=H a.s. (0=0), unclassified={unclassified[:3]}")


def test_criterion_08_polygons(report):
    t0 = time.perf_counter()
    rects = pt.random_rectangles(200, 7) + pt.central_rectangles()
    mismatch, bad_count, bad_status = [], [], []
    counts = []
    for R in rects:
        res = pt.enumerate_vertices(R)
        status, p = pt.rect_feasibility(R)
        lo, hi = max(R.x1, R.y1), min(R.x2, R.y2)
        diag = pt.EMPTY if lo > hi else pt.DEGENERATE if lo == hi else pt.POLYGON
        if res.status != diag:
            bad_status.append(R)
        if res.status == pt.DEGENERATE and (res.point, res.point) not in R.corners:
            bad_status.append(R)
        if res.status != pt.POLYGON:
            continue
        counts.append(res.count)
        if not 2 <= res.count <= 8:
            bad_count.append(R)
        if vertex_weights(res) != oracle_weights(R):
            mismatch.append(R)
    elapsed = time.perf_counter() - t0
    ok = not mismatch and not bad_count and not bad_status and max(counts) >= 6 and elapsed < 300
    report(8, ok, f"{len(rects)} rectangles, {len(counts)} polygons, counts {min(counts)}..{max(counts)}; "
                  f"oracle mismatches={len(mismatch)} status errors={len(bad_status)} in {elapsed:.1f}s")


@pytest.mark.parametrize("delta", [F(1, 4), F(1, 3)])
def test_criterion_09_independent_conjecture(report, delta):
    res = ex.independent_search(delta, restarts=100, rng_seed=0,
                                report_path=ARTIFACTS / f"independent_counterexample_{delta.denominator}.json")
    bound = 2 * delta * (1 - delta)
    if res.counterexample:
        ARTIFACTS.mkdir(exist_ok=True)
        _counterexample(f"independent_counterexample_{delta.denominator}.json", res.to_dict())
        report(9, False, f"delta={delta}: RESEARCH FINDING, independent pair with {res.best_value} > {bound}")
    ok = res.seeded_value == bound and res.best_value == bound
    report(9, ok, f"delta={delta}: seeded {res.seeded_value}, best over 100 restarts {res.best_value}, "
                  f"bound {bound}")


def test_criterion_10_daisies(report):
    bad = []
    for n in range(1, 7):
        for p in (F(1, 10), HALF, F(9, 10)):
            law = laws.daisy(n, p)
            pn = bounds.daisy_pn(n, p)
            if not co.check_coherence(law).coherent:
                bad.append((n, p, "coherence"))
            if law.means() != (p,) * n:
                bad.append((n, p, "means"))
            if any(max(pt_) != pn for pt_ in law.points):
                bad.append((n, p, "max"))
            if n >= 2 and laws.dp80_attaining(n, p).expect(max) != p * (n - p) / (1 + p * (n - 2)):
                bad.append((n, p, "dp80"))
    report(10, not bad, f"daisy n=1..6, p in {{1/10,1/2,9/10}}; failures={bad}")
