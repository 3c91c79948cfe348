import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from charsub.circle import (ArithSeq, RationalElem, canonical_digits, digit, frac_eval, frac_scan, from_support,
                            is_canonical, norm_best, parse_element, parse_seq, support)
from charsub.errors import DomainError, RuleError
from charsub.nset import EMPTY, Finite, Prog

SEQS = ["const-ratio 2", "const-ratio 3", "const-ratio 10", "ratio n+1", "ratio 2+(n-2*floor(n/2))"]


def _oracle_frac(x: Fraction, seq, n):
    """{a_n x} by modular arithmetic on the full product."""
    a = seq.a(n)
    return Fraction((a * x.numerator) % x.denominator, x.denominator)


rationals = st.fractions(min_value=0, max_value=1).filter(lambda v: v < 1)


@given(rationals, st.sampled_from(SEQS))
def test_digit_round_trip(x, text):
    seq = parse_seq(text)
    digits, _ = canonical_digits(RationalElem(x), seq, 64)
    partial = sum(Fraction(c, seq.a(n)) for n, c in enumerate(digits, 1))
    assert 0 <= x - partial < Fraction(1, seq.a(64))
    assert all(0 <= c < seq.q(n) for n, c in enumerate(digits, 1))


@given(rationals, st.sampled_from(SEQS), st.integers(min_value=1, max_value=200))
def test_frac_interval_contains_modular_oracle(x, text, n):
    seq = parse_seq(text)
    elem = RationalElem(x)
    v = _oracle_frac(x, seq, n)
    iv = frac_eval(elem, seq, n, 30)
    assert iv.lo <= v <= iv.hi
    assert elem.frac_exact(seq, n) == v


def test_one_eighth_base_three():
    seq = parse_seq("const-ratio 3")
    x = parse_element("rational 1/8")
    digits, _ = canonical_digits(x, seq, 12)
    assert digits == [0, 1] * 6
    assert [x.frac_exact(seq, n) for n in (1, 2)] == [Fraction(3, 8), Fraction(1, 8)]
    assert norm_best(x, seq, 3).lo == Fraction(3, 8)
    assert list(support(x, seq, 12).members(1, 12)) == [2, 4, 6, 8, 10, 12]


def test_terminating_and_zero():
    seq = parse_seq("const-ratio 2")
    assert canonical_digits(RationalElem(Fraction(1, 2)), seq, 4)[0] == [1, 0, 0, 0]
    zero = parse_element("zero")
    assert canonical_digits(zero, seq, 5)[0] == [0] * 5
    iv = frac_eval(zero, seq, 7, 10)
    assert iv.lo == 0 and iv.hi == Fraction(1, 1024)


def test_rules():
    seq = parse_seq("ratio n+1")
    x = from_support(seq, Finite([3]), "half")
    assert digit(x, seq, 3) == 2 and digit(x, seq, 4) == 0
    y = from_support(parse_seq("const-ratio 2"), Prog(1, 1), "max")
    assert all(digit(y, parse_seq("const-ratio 2"), n) == 1 for n in range(1, 20))
    assert from_support(seq, EMPTY, "max").to_dsl().startswith("support empty")


def test_rule_digit_out_of_range():
    with pytest.raises(RuleError):
        from_support(parse_seq("const-ratio 2"), Prog(1, 1), ("const", 2))


def test_geometric_series_value():
    seq = parse_seq("const-ratio 4")
    x = from_support(seq, Prog(1, 1), ("const", 1))
    for n in (1, 5, 50):
        iv = frac_eval(x, seq, n, 40)
        assert iv.lo <= Fraction(1, 3) <= iv.hi


def test_sum_element_round_trip():
    x = parse_element("sum(rational 1/3 ; support {2, 5} rule max)")
    assert parse_element(x.to_dsl()).to_dsl() == x.to_dsl()


def test_frac_scan_matches_direct_evaluation():
    seq = parse_seq("const-ratio 2")
    x = from_support(seq, Finite(range(3, 400, 7)), "max")
    for n, iv in frac_scan(x, seq, 1, 300, 20):
        assert iv == frac_eval(x, seq, n, 20)


def test_is_canonical_window():
    seq = parse_seq("const-ratio 2")
    assert is_canonical(RationalElem(Fraction(1, 3)), seq, 100)
    assert not is_canonical(from_support(seq, Prog(1, 1), "max"), seq, 100)


def test_sequence_validation():
    with pytest.raises(DomainError):
        ArithSeq.const_ratio(1)
    seq = parse_seq("ratio n bound 5")
    with pytest.raises(DomainError):
        seq.q(1)


def test_hundred_random_rationals_deterministic():
    rng = random.Random(20240611)
    for _ in range(100):
        den = rng.randint(2, 10 ** 6)
        x = Fraction(rng.randint(0, den - 1), den)
        seq = parse_seq(rng.choice(SEQS))
        digits, _ = canonical_digits(RationalElem(x), seq, 64)
        partial = sum(Fraction(c, seq.a(n)) for n, c in enumerate(digits, 1))
        assert 0 <= x - partial < Fraction(1, seq.a(64))
