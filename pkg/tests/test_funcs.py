import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from charsub import certified as C
from charsub.errors import CapabilityError
from charsub.funcs import (ModulusFn, WeightFn, builtin_pairs, check_modulus_axioms, invert_modulus, modulus,
                           monotone_envelope, parse_piecewise, piecewise_weight, weight)


def test_identity_axioms_pass():
    assert check_modulus_axioms(modulus("x"), [0, 1, 2, 5]).ok


def test_log_subadditive_on_samples():
    rep = check_modulus_axioms(modulus("log(1+x)"), [0, 1, 3, 7])
    assert rep.verdicts["subadditive"]


def test_square_fails_subadditivity_at_one():
    square = ModulusFn("x^2", lambda x: C.mul(C.to_real(x), C.to_real(x)))
    rep = check_modulus_axioms(square, [1, 1])
    assert not rep.verdicts["subadditive"]
    assert rep.counterexamples["subadditive"] == (1, 1)


def test_inversion_examples():
    assert invert_modulus(modulus("x"), 5) == 5
    assert invert_modulus(modulus("log(1+x)"), 1) == 2
    assert invert_modulus(modulus("x^(1/2)"), 3) == 9
    assert invert_modulus(modulus("log(1+x)"), 6, strict=True) == 403


def test_bounded_modulus_cannot_be_inverted():
    with pytest.raises(CapabilityError):
        invert_modulus(modulus("x/(1+x)"), 2)


@given(st.fractions(min_value=0, max_value=60))
def test_log_inverse_is_minimal(y):
    # oracle: smallest integer x with log(1+x) >= y is ceil(e^y - 1), checked by integer scan nearby
    f = modulus("log(1+x)")
    x = invert_modulus(f, y)
    assert C.compare(f(x), C.Exact(y)) >= 0
    assert x == 0 or C.compare(f(x - 1), C.Exact(y)) < 0
    approx = math.exp(float(y)) - 1
    assert abs(x - approx) <= 1 + 1e-9 * approx


def test_monotone_envelope_examples():
    g = piecewise_weight([(2, 16, 16)])
    env = monotone_envelope(g)
    assert [env(n) for n in (1, 2, 3)] == [C.Exact(Fraction(v)) for v in (1, 2, 16)]
    odd_even = WeightFn("odd-even", lambda n: C.Exact(Fraction(n if n % 2 else n + 10)),
                        lambda T: max(C.ceil_real(T), 1))
    env2 = monotone_envelope(odd_even)
    assert [env2(n).value for n in range(1, 9)] == [1, 3, 3, 5, 5, 7, 7, 9]


def test_monotone_weight_is_its_own_envelope():
    g = weight("n")
    assert monotone_envelope(g) is g


def test_piecewise_round_trip():
    g = piecewise_weight([(2, 16, 16), (326, 13700, 13700)])
    h = parse_piecewise(g.id)
    assert h.id == g.id and all(h(n) == g(n) for n in (1, 3, 16, 17, 400, 13701))


def test_builtin_pairs_parse():
    for f, g in builtin_pairs():
        assert C.sign(modulus(f)(weight(g)(10))) > 0


def test_weights_values():
    assert weight("floor(sqrt(n))")(17) == C.Exact(Fraction(4))
    assert weight("sqrt(n)")(16) == C.Exact(Fraction(4))
    assert C.compare(weight("log(1+n)")(3), C.log(4)) == 0
