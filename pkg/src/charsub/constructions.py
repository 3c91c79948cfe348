"""Explicit weights and sets that separate the density ideals.

Wherever a choice is made the minimal admissible integer is taken, so
every construction is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import certified as C
from .config import settings
from .density import BlockDecomposition
from .errors import DomainError, MagnitudeCapError, ThinningExhausted
from .funcs import ModulusFn, WeightFn, invert_modulus, piecewise_weight
from .nset import NSet, Finite, IntervalUnion


def _check_cap(value: int, produced):
    cap = settings().magnitude_cap_bits
    if value.bit_length() > cap:
        raise MagnitudeCapError(f"term exceeds 2^{cap} after {len(produced)} terms", produced)


def _strict_inverse(f, T, produced):
    try:
        return invert_modulus(f, T, strict=True)
    except MagnitudeCapError as exc:
        raise MagnitudeCapError(f"term exceeds the magnitude cap after {len(produced)} terms",
                                produced) from exc


# --------------------------------------------------------------------------
# two-modulus scale sequence


def scale_sequence(f1: ModulusFn, f2: ModulusFn, K: int) -> list[int]:
    """a_1 = 1; a_{n+1} is the least r > 2 a_n with
    min(f1(r), f2(r)) > n * max(f1(a_n), f2(a_n))."""
    a = [1]
    while len(a) < K:
        n, an = len(a), a[-1]
        T = C.mul(C.Exact(Fraction(n)), C.max_real(f1(an), f2(an)))
        r = max(2 * an + 1, _strict_inverse(f1, T, a), _strict_inverse(f2, T, a))
        _check_cap(r, a)
        a.append(r)
    return a


def scale_sequence_checks(a, f1, f2):
    """Exact checks per produced term a_{n+1}, n >= 1.

    Keys: ``f1`` f1(a_{n+1}) > n f1(a_n); ``f2`` likewise; ``double``
    a_{n+1} > 2 a_n; ``defining`` min(f1, f2)(a_{n+1}) > n max(f1, f2)(a_n);
    ``minimal`` a_{n+1} - 1 violates the defining conditions.
    """
    out = []
    for n in range(1, len(a)):
        an, r = a[n - 1], a[n]
        N = C.Exact(Fraction(n))
        T = C.mul(N, C.max_real(f1(an), f2(an)))

        def admissible(x):
            return x > 2 * an and C.compare(C.min_real(f1(x), f2(x)), T) > 0

        out.append({
            "f1": C.compare(f1(r), C.mul(N, f1(an))) > 0,
            "f2": C.compare(f2(r), C.mul(N, f2(an))) > 0,
            "double": r > 2 * an,
            "defining": admissible(r),
            "minimal": not admissible(r - 1),
        })
    return out


# --------------------------------------------------------------------------
# weight g with Z(f) strictly inside Z_g(f)


def prop27_sequence(f: ModulusFn, count: int) -> list[int]:
    """a_1 = 1; a_{n+1} = least r with f(r) > n f(a_n)."""
    a = [1]
    while len(a) < count:
        n = len(a)
        r = _strict_inverse(f, C.mul(C.Exact(Fraction(n)), f(a[-1])), a)
        _check_cap(r, a)
        a.append(r)
    return a


@dataclass
class Prop27:
    f: ModulusFn
    a: list
    b: list
    c: list
    d: list
    g: WeightFn
    A: NSet
    capped: bool

    @property
    def blocks(self):
        return len(self.b)


def prop27_construction(f: ModulusFn, K: int) -> Prop27:
    """b_k = a_{4k-2}, c_k = a_{4k-1}, d_k = a_{4k}; g = d_k on (b_k, d_k]; A = ⋃ (b_k, c_k]."""
    capped = False
    try:
        a = prop27_sequence(f, 4 * K)
    except MagnitudeCapError as exc:
        a, capped = exc.produced, True
    blocks = len(a) // 4
    if blocks == 0:
        raise MagnitudeCapError("not a single block fits under the magnitude cap", a)
    term = lambda i: a[i - 1]
    b = [term(4 * k - 2) for k in range(1, blocks + 1)]
    c = [term(4 * k - 1) for k in range(1, blocks + 1)]
    d = [term(4 * k) for k in range(1, blocks + 1)]
    g = piecewise_weight([(bk, dk, dk) for bk, dk in zip(b, d)])
    A = IntervalUnion.from_list([(bk + 1, ck) for bk, ck in zip(b, c)])
    return Prop27(f, a, b, c, d, g, A, capped or blocks < K)


# --------------------------------------------------------------------------
# antichain family


@dataclass
class Antichain:
    P: tuple
    a: list
    g: WeightFn
    A: NSet
    B: NSet
    b: dict = field(default_factory=dict)        # index -> b_index
    c_prime: dict = field(default_factory=dict)  # p -> a_{4p-1}
    c_next: dict = field(default_factory=dict)   # p -> b_{p+1} - d_p
    d: dict = field(default_factory=dict)
    truncated: tuple = ()

    def term(self, i):
        return self.a[i - 1]


def antichain_family(f1: ModulusFn, f2: ModulusFn, P, K: int | None = None) -> Antichain:
    """g_P = d_p on (b_p, b_{p+1}], A_P = ⋃ (b_p, c'_p], B_P = ⋃ (b_{p+1} - d_p, b_{p+1}]."""
    P = tuple(int(p) for p in P)
    if not P or any(p < 1 for p in P) or any(q <= p for p, q in zip(P, P[1:])):
        raise DomainError("P must be a non-empty strictly increasing list of positive integers")
    need = 4 * P[-1] + 2
    if K is not None:
        need = max(need, K)
    try:
        a = scale_sequence(f1, f2, need)
    except MagnitudeCapError as exc:
        a = exc.produced
    usable = tuple(p for p in P if 4 * p + 2 <= len(a))
    if not usable:
        raise MagnitudeCapError(
            f"scale sequence has only {len(a)} terms; the first member of P needs {4 * P[0] + 2}", a)
    term = lambda i: a[i - 1]
    fam = Antichain(usable, a, None, None, None, truncated=tuple(p for p in P if p not in usable))
    pieces, A_iv, B_iv = [], [], []
    for p in usable:
        bp, bq, dp, cp = term(4 * p - 2), term(4 * p + 2), term(4 * p), term(4 * p - 1)
        fam.b[p], fam.b[p + 1], fam.d[p], fam.c_prime[p] = bp, bq, dp, cp
        fam.c_next[p] = bq - dp
        pieces.append((bp, bq, dp))
        A_iv.append((bp + 1, cp))
        B_iv.append((bq - dp + 1, bq))
    fam.g = piecewise_weight(pieces)
    fam.A = IntervalUnion.from_list(A_iv)
    fam.B = IntervalUnion.from_list(B_iv)
    return fam


# --------------------------------------------------------------------------
# geometric-mean weight and the step weight


def geometric_mean_weight(f: ModulusFn, g1: WeightFn, g2: WeightFn) -> WeightFn:
    """g3(n) = least x with f(x) >= sqrt(f(g1(n)) f(g2(n)))."""
    def fn(n):
        target = C.sqrt(C.mul(f(g1(n)), f(g2(n))))
        return C.Exact(Fraction(invert_modulus(f, target)))

    witness = None
    if g1.divergence_witness and g2.divergence_witness:
        def witness(T):
            # valid for strictly increasing f: f(g3) >= min(f(g1), f(g2))
            return max(g1.divergence_witness(T), g2.divergence_witness(T))
    return WeightFn(f"geomean({f.id}; {g1.id}; {g2.id})", fn, witness,
                    monotone=g1.monotone and g2.monotone)


def prop212_weight(f: ModulusFn, A: NSet, K: int = 20):
    """g1(n) = 1 below n_1 and k on [n_k, n_{k+1}); returns (g1, evidence rows).

    Evidence rows are (k, n_k, f(n_k)/f(k)).
    """
    if A.upper_bound() is not None:
        raise DomainError("prop212_weight needs an infinite set A")

    def fn(n):
        return C.Exact(Fraction(max(1, A.count(n))))

    def witness(T):
        k = max(C.ceil_real(T), 1) if C.sign(T) > 0 else 1
        nk = A.nth(k)
        if nk is None:
            raise MagnitudeCapError(f"A has fewer than {k} members below the cap")
        return nk

    g1 = WeightFn(f"steps({A.to_dsl()})", fn, witness, monotone=True)
    rows = []
    for k in range(1, K + 1):
        nk = A.nth(k)
        if nk is None:
            raise DomainError(f"A appears finite: fewer than {k} members below the cap")
        rows.append((k, nk, C.div(f(nk), f(k))))
    return g1, rows


# --------------------------------------------------------------------------
# thinning to a null subset


def thin_to_null(B: NSet, D: BlockDecomposition) -> NSet:
    """Keep the smallest element of B in each block [n_k, n_{k+1})."""
    picked = []
    for k in range(D.K):
        lo, hi = D.block(k)
        x = B.next_member(lo) if B.count_range(lo, hi) else None
        if x is not None and x <= hi:
            picked.append(x)
    last_lo = D.starts[-2] if D.K >= 1 else 1
    if B.upper_bound() is not None and B.count_range(last_lo, B.upper_bound()) == 0:
        raise ThinningExhausted(f"B has no element at or after block start {last_lo}", Finite(picked))
    return Finite(picked)
