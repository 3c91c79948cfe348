from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from charsub import certified as C
from charsub.density import (INDETERMINATE, NULL, POSITIVE, block_decomposition, block_measure, geometric,
                             parse_checkpoints, tallness_evidence, trajectory,
                             verdict)
from charsub.errors import DomainError
from charsub.funcs import modulus, weight
from charsub.nset import EMPTY, Finite, Prog, parse_nset

ID, N_ = modulus("x"), weight("n")
LOG = modulus("log(1+x)")


def test_evens_half_everywhere():
    tr = trajectory(Prog(2, 2), ID, N_, [2, 4, 1000, 10 ** 6])
    assert all(p.ratio == C.Exact(Fraction(1, 2)) for p in tr.points)
    assert verdict(tr).verdict == POSITIVE


def test_finite_set_null():
    tr = trajectory(Finite([1, 2, 3]), ID, N_, [10 ** k for k in range(1, 8)])
    assert tr.points[0].ratio.value == Fraction(3, 10)
    assert verdict(tr).verdict == NULL


def test_sqrt_count_under_log():
    A = parse_nset("points k in 1.. : k^2")
    p = trajectory(A, LOG, N_, [10 ** 6]).points[0]
    assert abs(float(p.enclosure.mid) - 0.50007) < 1e-4


def test_checkpoints_must_increase():
    with pytest.raises(DomainError):
        trajectory(Prog(1, 1), ID, N_, [10, 5])


def test_parse_checkpoints():
    assert parse_checkpoints("geo:1e1..1e3:10") == [10, 100, 1000]
    assert parse_checkpoints("pow2:1..3") == [2, 4, 8]
    assert parse_checkpoints("5, 1, 3") == [1, 3, 5]


def _scan_blocks(h, K):
    # direct scan oracle: n_{k+1} = min{n : h(n) >= 2 h(n_k)}
    out = [1]
    n = 1
    while len(out) <= K:
        target = 2 * h(out[-1])
        while h(n) < target:
            n += 1
        out.append(n)
    return out


def test_blocks_identity_powers_of_two():
    D = block_decomposition(ID, N_, 20)
    assert D.starts == [2 ** k for k in range(21)]
    assert D.starts[:12] == _scan_blocks(lambda n: n, 11)


def test_blocks_log_double_exponential():
    D = block_decomposition(LOG, N_, 4)
    assert D.starts == [2 ** (2 ** k) - 1 for k in range(5)]
    for k in range(1, 5):
        T = C.mul(C.Exact(Fraction(2)), D.fg[k - 1])
        assert C.compare(LOG(D.starts[k] - 1), T) < 0 <= C.compare(LOG(D.starts[k]), T)


def test_block_id_id_first_step():
    assert block_decomposition(ID, weight("n"), 1).starts[1] == 2


def test_block_measures():
    D = block_decomposition(ID, N_, 8)
    for k in range(8):
        assert block_measure(EMPTY, D, k) == C.ZERO
        assert block_measure(Prog(1, 1), D, k) == C.ONE
        assert block_measure(Finite([2 ** j for j in range(9)]), D, k).value == Fraction(1, 2 ** k)


def test_tallness_values():
    rep = tallness_evidence(ID, N_, 12)
    assert [v.value for v in rep.values[:4]] == [1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert rep.first_below == 10
    rep = tallness_evidence(LOG, N_, 4)
    for k, v in enumerate(rep.values):
        assert C.compare(v, C.Exact(Fraction(1, 2 ** k))) == 0


@given(st.integers(min_value=2, max_value=40), st.data())
def test_progression_density_exact(step, data):
    start = data.draw(st.integers(min_value=1, max_value=step))
    tr = trajectory(Prog(start, step), ID, N_, [step * 1000])
    assert tr.points[0].ratio.value == Fraction(1, step)


def test_geometric_schedule():
    assert geometric(1, 10) == [1, 2, 4, 8, 10]
    assert INDETERMINATE == "indeterminate"
