from fractions import Fraction

import pytest

from charsub import certified as C
from charsub.constructions import (antichain_family, geometric_mean_weight, prop212_weight, prop27_construction,
                                   prop27_sequence, scale_sequence, scale_sequence_checks, thin_to_null)
from charsub.density import block_decomposition
from charsub.errors import DomainError, MagnitudeCapError, ThinningExhausted
from charsub.funcs import modulus, weight
from charsub.nset import Finite, Prog, parse_nset

ID, LOG = modulus("x"), modulus("log(1+x)")


def _minimal_scan(pred, start):
    r = start
    while not pred(r):
        r += 1
    return r


def test_prop27_sequence_matches_scan_oracle():
    a = prop27_sequence(ID, 8)
    assert a == [1, 2, 5, 16, 65, 326, 1957, 13700]
    oracle = [1]
    for n in range(1, 8):
        oracle.append(_minimal_scan(lambda r: r > n * oracle[-1], 0))
    assert a == oracle


def test_prop27_construction_first_block():
    P = prop27_construction(ID, 2)
    assert (P.b[0], P.c[0], P.d[0]) == (2, 5, 16)
    assert P.g(3) == C.Exact(Fraction(16))
    assert P.A.contains(5) and not P.A.contains(6)
    assert list(P.A.members(1, 16)) == [3, 4, 5]
    assert C.div(ID(P.A.count(16)), ID(P.g(16))).value == Fraction(3, 16)


def test_scale_sequence_id_log():
    with pytest.raises(MagnitudeCapError) as info:
        scale_sequence(ID, LOG, 5)
    a = info.value.produced
    assert a[:3] == [1, 3, 403]
    assert len(a) == 4
    for row in scale_sequence_checks(a, ID, LOG):
        assert all(row.values())


def test_scale_sequence_id_id_oracle():
    a = scale_sequence(ID, ID, 7)
    oracle = [1]
    for n in range(1, 7):
        an = oracle[-1]
        oracle.append(_minimal_scan(lambda r: r > 2 * an and r > n * an, 0))
    assert a == oracle == [1, 3, 7, 22, 89, 446, 2677]


def test_antichain_family_id_id():
    fam = antichain_family(ID, ID, [1])
    assert (fam.b[1], fam.c_prime[1], fam.d[1], fam.b[2]) == (3, 7, 22, 446)
    assert fam.c_next[1] == 446 - 22 > 22
    mu = C.div(ID(fam.B.count_range(fam.b[2] - fam.d[1] + 1, fam.b[2])), ID(fam.g(fam.b[2])))
    assert mu == C.ONE
    assert C.div(ID(fam.A.count(7)), ID(7)).value == Fraction(4, 7)


def test_antichain_rejects_bad_index_sets():
    with pytest.raises(DomainError):
        antichain_family(ID, ID, [2, 1])
    with pytest.raises(MagnitudeCapError):
        antichain_family(ID, LOG, [1])


def test_geometric_mean_weight_examples():
    g3 = geometric_mean_weight(ID, weight("floor(sqrt(n))"), weight("n"))
    assert g3(16) == C.Exact(Fraction(8))
    g3b = geometric_mean_weight(ID, weight("n"), weight("n^2"))
    assert g3b(4) == C.Exact(Fraction(8))
    same = geometric_mean_weight(ID, weight("n"), weight("n"))
    assert all(same(n) == weight("n")(n) for n in range(1, 30))


def test_step_weight():
    A = parse_nset("points k in 1.. : 2^k")
    g1, rows = prop212_weight(ID, A, 14)
    assert [g1(n).value for n in (1, 2, 3, 4, 7, 8, 1023, 1024)] == [1, 1, 1, 2, 2, 3, 9, 10]
    assert rows[13][0] == 14 and C.compare(rows[13][2], 1000) > 0
    assert C.compare(rows[12][2], 1000) < 0


def test_thin_to_null():
    D = block_decomposition(ID, weight("n"), 10)
    assert list(thin_to_null(Prog(1, 1), D).members(1, 2000)) == [2 ** k for k in range(10)]
    assert list(thin_to_null(Prog(2, 2), D).members(1, 2000)) == [2 ** k for k in range(1, 10)]
    with pytest.raises(ThinningExhausted) as info:
        thin_to_null(Finite([3, 5]), D)
    assert list(info.value.partial.members(1, 10)) == [3, 5]
