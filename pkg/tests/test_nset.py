import pytest
from hypothesis import given, strategies as st

from charsub.errors import DSLSyntaxError, MalformedSetError
from charsub.nset import (EMPTY, Finite, IntervalFamily, Prog, complement, intersect, interval, parse_nset,
                          shift, shifts, union, validate)

LIMIT = 300
finite_sets = st.frozensets(st.integers(min_value=1, max_value=LIMIT), max_size=40)
progs = st.tuples(st.integers(min_value=1, max_value=20), st.integers(min_value=1, max_value=9))


def _oracle(A, hi=LIMIT):
    return {n for n in range(1, hi + 1) if A.contains(n)}


def _pyset(spec):
    kind, val = spec
    if kind == "finite":
        return Finite(val), set(val)
    a, d = val
    return Prog(a, d), set(range(a, LIMIT + 1, d))


set_specs = st.one_of(finite_sets.map(lambda s: ("finite", s)), progs.map(lambda p: ("prog", p)))


@given(set_specs)
def test_count_agrees_with_membership(spec):
    A, ref = _pyset(spec)
    for n in (1, 17, 100, LIMIT):
        assert A.count(n) == len([x for x in ref if x <= n])


@given(set_specs, set_specs)
def test_boolean_algebra_matches_python_sets(s1, s2):
    A, a = _pyset(s1)
    B, b = _pyset(s2)
    for n in (50, LIMIT):
        assert union(A, B).count(n) == len([x for x in a | b if x <= n])
        assert intersect(A, B).count(n) == len([x for x in a & b if x <= n])
        assert complement(A).count(n) == n - len([x for x in a if x <= n])


@given(set_specs, st.integers(min_value=0, max_value=12))
def test_shift_and_shifts(spec, i):
    A, a = _pyset(spec)
    ref = {x - i for x in a if x - i >= 1}
    assert _oracle(shift(A, i), LIMIT - 12) == {x for x in ref if x <= LIMIT - 12}
    ref_all = {x - j for x in a for j in range(i + 1) if x - j >= 1}
    assert _oracle(shifts(A, i), LIMIT - 12) == {x for x in ref_all if x <= LIMIT - 12}


@given(set_specs)
def test_runs_cover_members_exactly(spec):
    A, a = _pyset(spec)
    got = set()
    for lo, hi in A.runs(1, LIMIT):
        got.update(range(lo, hi + 1))
    assert got == {x for x in a if x <= LIMIT}


def test_documented_counts():
    assert parse_nset("progression(2, 2)").count(1000) == 500
    A = parse_nset("union k in 1.. : [(2*k-1)^(2*k-1), (2*k)^(2*k)]")
    assert A.count(30) == 8
    assert EMPTY.count(10 ** 9) == 0


def test_shift_examples():
    assert list(shift(Finite([5, 10]), 3).members(1, 100)) == [2, 7]
    assert list(shift(Finite([2, 3]), 3).members(1, 100)) == []
    P = Prog(3, 4)
    assert shift(P, 0).equal_on(P, 500)


def test_malformed_family_rejected():
    with pytest.raises(MalformedSetError):
        validate(parse_nset("union k in 1.. : [k, k-1]"))
    with pytest.raises(MalformedSetError):
        validate(parse_nset("union k in 1.. : [5, 10]"))  # l_k must exceed r_(k-1)


def test_parse_errors():
    with pytest.raises(DSLSyntaxError):
        parse_nset("progression(2,")


def test_huge_family_counts_without_enumeration():
    A = parse_nset("points k in 1.. : 2^(2^k)")
    assert A.count(2 ** 1000) == 9


def test_interval_family_blocks_and_endpoints():
    F = IntervalFamily("2^(2^j)")
    assert [F.n(r) for r in range(1, 5)] == [4, 16, 256, 65536]
    assert list(F.blocks().runs(1, 300)) == [(4, 16), (256, 300)]
    assert list(F.endpoints().members(1, 300)) == [4, 16, 256]
    assert interval(3, 5).count(10) == 3
