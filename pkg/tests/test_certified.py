from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from charsub import certified as C
from charsub.errors import PrecisionError

pos = st.fractions(min_value=Fraction(1, 1000), max_value=10 ** 6)
ints = st.integers(min_value=1, max_value=10 ** 12)


def test_interval_arithmetic_exact():
    a = C.Interval(Fraction(1, 3), Fraction(1, 2))
    b = C.Interval(Fraction(-1), Fraction(2))
    assert (a + b) == C.Interval(Fraction(-2, 3), Fraction(5, 2))
    assert (a * b) == C.Interval(Fraction(-1, 2), Fraction(1))
    assert a.width == Fraction(1, 6)


def test_norm_of_interval_straddling_integer():
    iv = C.norm_of_interval(C.Interval(Fraction(9, 10), Fraction(11, 10)))
    assert iv.lo == 0 and iv.hi == Fraction(1, 10)


@given(ints, st.integers(min_value=2, max_value=7))
def test_power_enclosure_brackets_root(base, q):
    # independent check: lo^q <= base <= hi^q by integer arithmetic
    iv = C.power(base, Fraction(1, q)).enclose(80)
    assert iv.lo ** q <= base <= iv.hi ** q
    assert iv.width < Fraction(1, 2 ** 60) * (1 + base)


@given(pos)
def test_log_enclosure_contains_high_precision_value(x):
    iv = C.log(x).enclose(64)
    with mpmath.workdps(80):
        v = mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
        assert mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= v
        assert v <= mpmath.mpf(iv.hi.numerator) / iv.hi.denominator


def test_perfect_powers_simplify_to_exact():
    assert C.power(16, Fraction(1, 2)) == C.Exact(Fraction(4))
    assert C.sqrt(C.Exact(Fraction(4 * 16))).exact


def test_compare_symbolic_paths():
    assert C.compare(C.log(3), C.log(3)) == 0
    assert C.compare(C.div(C.log(7), C.log(7)), C.ONE) == 0
    assert C.compare(C.power(2, Fraction(1, 2)), C.Exact(Fraction(141421, 100000))) > 0
    assert C.compare(C.log(4), C.mul(C.Exact(Fraction(2)), C.log(2))) == 0


@given(ints, ints)
def test_compare_log_matches_integer_order(a, b):
    assert C.compare(C.log(a), C.log(b)) == (a > b) - (a < b)


@given(ints, st.integers(min_value=2, max_value=5))
def test_floor_ceil_of_roots(n, q):
    r = C.power(n, Fraction(1, q))
    fl = C.floor_real(r)
    assert fl ** q <= n < (fl + 1) ** q
    assert C.ceil_real(r) == (fl if fl ** q == n else fl + 1)


def test_log_sum_identity():
    s = C.add(C.log(2), C.log(3))
    assert C.compare(s, C.log(6)) == 0


def test_comparison_beyond_cap_raises_precision_error():
    from charsub.config import using
    a = C.add(C.log(2), C.Exact(Fraction(1, 2 ** 400)))
    with using(precision_cap=256):
        with pytest.raises(PrecisionError):
            C.compare(a, C.log(2))
    assert C.compare(a, C.log(2)) > 0


def test_decimal_and_fraction_strings():
    assert C.frac_str(Fraction(3, 8)) == "3/8"
    assert C.parse_fraction("3/8") == Fraction(3, 8)
    assert C.decimal_str(C.Exact(Fraction(1, 2))).startswith("0.5")
