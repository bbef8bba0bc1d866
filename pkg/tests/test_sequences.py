import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lacunary import CapacityError, ValidationError
from lacunary.sequences import (GapSequence, OmegaSchedule, Provenance, analyze_growth,
                                gen_erdos_gap, gen_geometric, gen_hlp, gen_random_aomega,
                                read_sequence, write_sequence)

from oracles import smooth_numbers_bruteforce


def test_geometric_examples():
    assert gen_geometric(2, 5).terms == (2, 4, 8, 16, 32)
    assert gen_geometric(3, 3).terms == (3, 9, 27)
    with pytest.raises(CapacityError):
        gen_geometric(2, 64)
    assert gen_geometric(2, 63).terms[-1] == 2 ** 63
    assert gen_geometric(2, 200, capacity_bits=None).terms[-1] == 2 ** 200


def test_hlp_examples():
    assert gen_hlp([2, 3], 10).terms == (1, 2, 3, 4, 6, 8, 9, 12, 16, 18)
    assert gen_hlp([2], 4).terms == (1, 2, 4, 8)
    with pytest.raises(ValidationError, match="4 and 6"):
        gen_hlp([4, 6], 5)


@pytest.mark.parametrize("gens,count", [([2, 3], 100), ([2, 5, 7], 60), ([3, 4], 50),
                                        ([5, 6, 7], 60)])
def test_hlp_matches_bruteforce(gens, count):
    seq = gen_hlp(gens, count)
    assert list(seq.terms) == smooth_numbers_bruteforce(gens, seq.terms[-1])


def test_random_aomega_examples():
    omega = OmegaSchedule.constant(3)
    assert gen_random_aomega(omega, 1, 7).terms == (1,)
    assert 1 <= gen_random_aomega(omega, 2, 7).terms[1] <= 8
    assert gen_random_aomega(omega, 40, 5) == gen_random_aomega(omega, 40, 5)


def test_random_aomega_capacity_names_index():
    with pytest.raises(CapacityError, match="k = 5"):
        gen_random_aomega(OmegaSchedule.constant(30), 10, 0)


@given(st.integers(0, 2 ** 32), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_random_aomega_bounds(seed, level):
    omega = OmegaSchedule.from_list([level] * 10 + [level + 1] * 20)
    seq = gen_random_aomega(omega, 30, seed)
    for k, n in enumerate(seq.terms, 1):
        assert 1 <= n <= k ** omega(k)
    view = seq.sorted_view()
    assert view.is_increasing
    assert len(view) + view.duplicates_dropped == len(seq)


def test_erdos_examples():
    assert gen_erdos_gap(0, 4).terms == (1, 2, 4, 8)
    with pytest.raises(ValidationError):
        gen_erdos_gap(0.5, 4)
    assert gen_erdos_gap(0.5 - 1e-9, 5).terms == (1, 2, 4, 7, 11)


@given(st.floats(0, 0.4999), st.integers(2, 200))
@settings(max_examples=40, deadline=None)
def test_erdos_gap_inequality(alpha, count):
    t = gen_erdos_gap(alpha, count, capacity_bits=None).terms
    for k in range(1, count):
        assert Fraction(t[k], t[k - 1]) >= 1 + Fraction(float(k) ** -alpha)


def test_growth_examples():
    assert analyze_growth(GapSequence((2, 4, 8, 16), Provenance.USER_FILE)).hadamard_q == 2
    rep = analyze_growth(GapSequence((1, 2, 3, 4), Provenance.USER_FILE))
    assert rep.hadamard_q == Fraction(4, 3) == rep.min_ratio
    with pytest.raises(ValidationError):
        analyze_growth(GapSequence((5,), Provenance.USER_FILE))


@pytest.mark.parametrize("a", [2, 3, 7])
def test_growth_geometric(a):
    rep = analyze_growth(gen_geometric(a, 20))
    assert rep.hadamard_q == a
    assert rep.tijdeman_alpha == 0.0
    assert not rep.ratio_divergence


def test_growth_divergence_and_tijdeman():
    fast = GapSequence(tuple(2 ** (k * k) for k in range(1, 12)), Provenance.USER_FILE)
    assert analyze_growth(fast, divergence_threshold=10).ratio_divergence
    hlp = gen_hlp([2, 3], 300)
    rep = analyze_growth(hlp)
    assert rep.hadamard_q is not None and rep.tijdeman_alpha > 0
    # the reported alpha is tight: every gap satisfies the bound with it
    a = rep.tijdeman_alpha
    for x, y in zip(hlp.terms, hlp.terms[1:]):
        if x >= 3:
            assert y - x >= x / math.log(x) ** a * (1 - 1e-12)


def test_rejects_nonincreasing_and_nonpositive():
    with pytest.raises(ValidationError):
        GapSequence((5, 5), Provenance.USER_FILE)
    with pytest.raises(ValidationError):
        GapSequence((0, 1), Provenance.USER_FILE)
    with pytest.raises(ValidationError):
        GapSequence((), Provenance.USER_FILE)
    assert GapSequence((3, 1), Provenance.USER_FILE, allow_unordered=True).terms == (3, 1)


def test_index_origin():
    seq = gen_geometric(2, 5)
    assert seq.term(1) == 2
    with pytest.raises(ValidationError):
        seq.term(0)


def test_omega_rules():
    sched = OmegaSchedule("constant_then_linear", {"level": 2, "switch": 3})
    assert sched.take(6) == [2, 2, 2, 3, 4, 5]
    lp = OmegaSchedule("log_power", {"alpha": 1.0, "floor": 2})
    vals = lp.take(100)
    assert vals[0] == 2 and vals == sorted(vals)
    with pytest.raises(ValidationError):
        OmegaSchedule.from_list([3, 2])
    with pytest.raises(ValidationError):
        OmegaSchedule.from_list([1, 2])(3)


def test_file_roundtrip(tmp_path):
    seq = gen_hlp([2, 3], 25)
    path = tmp_path / "s.txt"
    write_sequence(seq, path)
    lines = path.read_text().splitlines()
    assert sum(not l.startswith("#") for l in lines) == 25
    back = read_sequence(path)
    assert back.terms == seq.terms
    assert back.provenance is Provenance.USER_FILE
    assert back.params["declared_provenance"] == "hlp"


def test_file_roundtrip_unordered(tmp_path):
    seq = gen_random_aomega(OmegaSchedule.constant(2), 15, 3)
    path = tmp_path / "r.txt"
    write_sequence(seq, path)
    assert read_sequence(path).terms == seq.terms


def test_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1\n2\nthree\n")
    with pytest.raises(ValidationError, match="3"):
        read_sequence(path)
