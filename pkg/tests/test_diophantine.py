import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from lacunary import CapabilityError, ValidationError
from lacunary.diophantine import (PTermQuery, TwoTermQuery, Verdict, certify_Ap, certify_Aomega,
                                  certify_B2, count_p_term_nondegenerate, count_two_term,
                                  p_term_solutions, two_term_solutions)
from lacunary.sequences import (GapSequence, OmegaSchedule, Provenance, gen_geometric,
                                gen_random_aomega)

from oracles import two_term_bruteforce


def _seq(*terms):
    return GapSequence(tuple(terms), Provenance.USER_FILE)


increasing = st.lists(st.integers(1, 400), min_size=1, max_size=30, unique=True).map(
    lambda xs: _seq(*sorted(xs)))
coeff = st.integers(-4, 4).filter(bool)


def test_two_term_examples():
    g = gen_geometric(2, 12)
    assert count_two_term(g, TwoTermQuery(1, -1, 0, 12)) == 12
    assert count_two_term(g, TwoTermQuery(1, -1, 0, 12, exclude_diagonal=True)) == 0
    assert two_term_solutions(_seq(2, 4, 8, 16), TwoTermQuery(1, 1, 6, 4)) == [(1, 2), (2, 1)]
    with pytest.raises(ValidationError):
        count_two_term(g, TwoTermQuery(1, 1, 6, 13))
    with pytest.raises(ValidationError):
        TwoTermQuery(0, 1, 1, 3)


@given(increasing, coeff, coeff, st.integers(-300, 300), st.booleans())
@settings(max_examples=200, deadline=None)
def test_two_term_matches_bruteforce(seq, a, b, c, excl):
    n = len(seq)
    sols = two_term_solutions(seq, TwoTermQuery(a, b, c, n, excl))
    assert sols == sorted(two_term_bruteforce(seq.terms, a, b, c, excl))
    swapped = two_term_solutions(seq, TwoTermQuery(b, a, c, n, excl))
    assert sorted((l, k) for k, l in swapped) == sols


@given(increasing, coeff, coeff, st.integers(-100, 100), st.integers(2, 9))
@settings(max_examples=100, deadline=None)
def test_two_term_scaling(seq, a, b, c, m):
    scaled = _seq(*(m * t for t in seq.terms))
    n = len(seq)
    assert count_two_term(scaled, TwoTermQuery(a, b, c * m, n)) == \
        count_two_term(seq, TwoTermQuery(a, b, c, n))


@given(increasing)
def test_injectivity(seq):
    assert count_two_term(seq, TwoTermQuery(1, -1, 0, len(seq), exclude_diagonal=True)) == 0


def test_b2_examples():
    cert = certify_B2(gen_geometric(2, 30), "strong", 30, 1)
    assert cert.observed_max_count <= 2 and cert.verdict is Verdict.CONSISTENT
    lin = _seq(*range(1, 101))
    weak = certify_B2(lin, "weak", 100, 1)
    assert weak.verdict is Verdict.VIOLATED
    assert count_two_term(lin, TwoTermQuery(1, -1, 1, 100)) == 99
    assert weak.notes["linear_family"] == [1, -1, 1]
    assert all(w[:3] == (1, -1, 1) for w in weak.witnesses)
    one = certify_B2(_seq(5), "plain", 1, 3)
    assert one.observed_max_count in (0, 1) and one.verdict is Verdict.CONSISTENT


def test_b2_max_is_exact():
    rng = random.Random(4)
    for _ in range(20):
        seq = _seq(*sorted(rng.sample(range(1, 300), 25)))
        cert = certify_B2(seq, "plain", 25, 2)
        brute = 0
        for a in (1, 2):
            for b in (-2, -1, 1, 2):
                vals = {}
                for x in seq.terms:
                    for y in seq.terms:
                        c = a * x + b * y
                        if c:
                            vals[c] = vals.get(c, 0) + 1
                brute = max([brute, *vals.values()])
        assert cert.observed_max_count == brute


def test_b2_variants_zero_and_strong():
    seq = _seq(1, 2, 3, 4, 6, 8, 12)
    zero = certify_B2(seq, "zero", 7, 2)
    assert zero.observed_max_count == count_two_term(seq, TwoTermQuery(1, -2, 0, 7))
    strong = certify_B2(seq, "strong", 7, 2)
    assert strong.observed_max_count >= zero.observed_max_count


def test_b2_weak_geometric_bounded_growth():
    g = gen_geometric(2, 60)
    c30 = certify_B2(g, "weak", 30, 1).observed_max_count
    c60 = certify_B2(g, "weak", 60, 1).observed_max_count
    assert c60 - c30 <= c30


def test_b2_budget_inconclusive():
    cert = certify_B2(gen_geometric(2, 50, capacity_bits=None), "plain", 50, 3, budget=5000)
    assert cert.verdict is Verdict.INCONCLUSIVE and cert.notes["partial_scan"]


def test_certificate_json():
    doc = certify_B2(_seq(*range(1, 301)), "plain", 300, 2).to_json()
    assert set(doc) >= {"version", "kind", "params", "observed_max_count", "table",
                        "witnesses", "verdict"}
    assert len(doc["table"]) <= 100 and len(doc["witnesses"]) <= 20
    json.dumps(doc)


def test_p_term_examples():
    s = _seq(2, 4, 8, 16)
    assert count_p_term_nondegenerate(s, PTermQuery((1, 1, 1), 14, 4)) == 1
    # 4 - 2*2 = 0 under k_1 < k_2 is the orientation (-2, 1); (1, -2) would need k_1 > k_2
    assert count_p_term_nondegenerate(s, PTermQuery((-2, 1), 0, 4)) == 3
    assert p_term_solutions(s, PTermQuery((-2, 1), 0, 4))[0] == (1, 2)
    assert count_p_term_nondegenerate(s, PTermQuery((1, -2), 0, 4)) == 0
    assert count_p_term_nondegenerate(s, PTermQuery((1, -1), 0, 4)) == 0
    with pytest.raises(CapabilityError):
        count_p_term_nondegenerate(gen_geometric(2, 10), PTermQuery((1,) * 9, 5, 10))


def test_nondegeneracy_filter():
    # 1 + 2 - 3 + 4 = 4 has the vanishing subsum 1 + 2 - 3
    s = _seq(1, 2, 3, 4)
    assert p_term_solutions(s, PTermQuery((1, 1, -1, 1), 4, 4)) == []


@given(increasing, st.lists(coeff, min_size=2, max_size=3), st.integers(-60, 60))
@settings(max_examples=60, deadline=None)
def test_p_term_monotone_in_limit(seq, coeffs, rhs):
    counts = [count_p_term_nondegenerate(seq, PTermQuery(tuple(coeffs), rhs, n))
              for n in range(1, len(seq) + 1)]
    assert counts == sorted(counts)


@given(increasing, coeff, coeff, st.integers(-300, 300).filter(bool))
@settings(max_examples=150, deadline=None)
def test_b2_splits_into_two_ordered_p2_counts(seq, a, b, c):
    n = len(seq)
    diag = sum(1 for t in seq.terms if (a + b) * t == c)
    ab = count_p_term_nondegenerate(seq, PTermQuery((a, b), c, n))
    ba = count_p_term_nondegenerate(seq, PTermQuery((b, a), c, n))
    assert count_two_term(seq, TwoTermQuery(a, b, c, n)) == ab + ba + diag


def test_ap_examples():
    cert = certify_Ap(_seq(2, 4, 8, 16, 32), 3, 1, 100)
    assert cert.observed_max_count >= 1
    assert any(w[-3:] == (1, 2, 3) and w[3] == 14 for w in cert.witnesses) or \
        count_p_term_nondegenerate(_seq(2, 4, 8, 16, 32), PTermQuery((1, 1, 1), 14, 5)) == 1
    rnd = gen_random_aomega(OmegaSchedule.constant(3), 20, 1).sorted_view()
    rec = certify_Ap(rnd, 2, 3, 50)
    assert rec.verdict is Verdict.CONSISTENT and rec.observed_max_count >= 0
    partial = certify_Ap(_seq(*range(1, 40)), 3, 2, 50, budget=20000)
    assert partial.verdict is Verdict.INCONCLUSIVE


def test_ap_max_is_exact_p2():
    seq = _seq(1, 3, 4, 7, 11, 18, 29)
    cert = certify_Ap(seq, 2, 2, 40)
    brute = max(count_p_term_nondegenerate(seq, PTermQuery((a, b), c, 7))
                for a in (-2, -1, 1, 2) for b in (-2, -1, 1, 2)
                for c in range(-40, 41) if c)
    assert cert.observed_max_count == brute


def test_aomega_examples():
    g = _seq(2, 4, 8, 16, 32)
    cert = certify_Aomega(g, OmegaSchedule.constant(3), p_cap=2, coeff_cap=2)
    assert cert.verdict is Verdict.VIOLATED
    # the doubling family a n_k - n_{k+1} = 0 with k_2 > N
    for w in cert.witnesses:
        n, a1, a2, k1, k2 = w
        assert a1 * g.term(k1) + a2 * g.term(k2) == 0 and k2 > n
    assert (2, -1) in {w[1:3] for w in cert.witnesses}
    with pytest.raises(ValidationError):
        certify_Aomega(g, OmegaSchedule.constant(3), p_cap=1)


def test_aomega_relation_free_prefix():
    seq = _seq(3, 10, 29, 83, 247)
    cert = certify_Aomega(seq, OmegaSchedule.constant(2), p_cap=2, coeff_cap=2)
    assert cert.verdict is Verdict.CONSISTENT and cert.witnesses == []


def test_aomega_brute_small():
    seq = _seq(1, 2, 3, 5, 8, 13, 21)
    omega = OmegaSchedule.from_list([2] * 7)
    cert = certify_Aomega(seq, omega, p_cap=3, coeff_cap=3, max_witnesses=10 ** 6)
    found = {w[1:] for w in cert.witnesses}
    import itertools
    import math
    brute = set()
    for p in (2, 3):
        for idx in itertools.combinations(range(1, 8), p):
            for cs in itertools.product([-3, -2, -1, 1, 2, 3], repeat=p):
                if cs[0] < 0 or math.gcd(*cs) != 1:
                    continue
                parts = [c * seq.term(k) for c, k in zip(cs, idx)]
                if sum(parts) != 0:
                    continue
                if any(sum(parts[i] for i in range(p) if m >> i & 1) == 0
                       for m in range(1, (1 << p) - 1)):
                    continue
                amax = max(map(abs, cs))
                ok = any(n < idx[-1] and min(2, 3) >= p and min(n ** 2, 3) >= amax
                         for n in range(1, 7))
                if ok:
                    brute.add(cs + idx)
    assert found == brute
