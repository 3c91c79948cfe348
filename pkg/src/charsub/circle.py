"""Arithmetic sequences, canonical digit expansions and circle elements.

{a_n x} is always evaluated from the digit tail,

    {a_n x} = sum_{k > n} c_k * a_n / a_k,

truncated after K digits with Horner's scheme on the ratios q_{n+1}..q_{n+K},
so a_n itself is never formed. The truncation leaves an exact interval of
width 1 / (q_{n+1} ... q_{n+K}) <= 2^-K.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from . import dsl
from .certified import Interval, norm_of_interval
from .config import settings
from .errors import BudgetError, DomainError, DSLSyntaxError, RuleError
from .nset import NSet, Finite, parse_nset, intersect, interval, EMPTY


class ArithSeq:
    """Ratios q_n >= 2 (n >= 1) with prefix products a_n = q_1 ... q_n."""

    def __init__(self, q: Callable[[int], int], text: str, bound: Optional[int] = None,
                 const: Optional[int] = None):
        self._q = q
        self.text = text
        self.bound = bound
        self.const = const
        self._qs: list[int] = []
        self._as: list[int] = [1]
        self._lock = threading.RLock()

    @classmethod
    def const_ratio(cls, q: int) -> "ArithSeq":
        if q < 2:
            raise DomainError("ratios must be >= 2")
        return cls(lambda n: q, f"const-ratio {q}", bound=q, const=q)

    @classmethod
    def from_expr(cls, expr: str, bound: Optional[int] = None) -> "ArithSeq":
        tree = dsl.parse_expr(expr)
        extra = dsl.free_vars(tree) - {"n"}
        if extra:
            raise DomainError(f"ratio expression may only use n, found {sorted(extra)}")
        text = f"ratio {dsl.expr_to_text(tree)}" + (f" bound {bound}" if bound else "")
        return cls(lambda n: dsl.evaluate_int(tree, {"n": n}), text, bound=bound)

    def q(self, n: int) -> int:
        if n < 1:
            raise DomainError("ratios are indexed from 1")
        if self.const is not None:
            return self.const
        if n <= len(self._qs):
            return self._qs[n - 1]
        if n > len(self._qs) + 100_000:
            return self._checked(n, self._q(n))
        with self._lock:
            while len(self._qs) < n:
                k = len(self._qs) + 1
                self._qs.append(self._checked(k, self._q(k)))
        return self._qs[n - 1]

    def _checked(self, k: int, v: int) -> int:
        if v < 2:
            raise DomainError(f"ratio q_{k} = {v} < 2")
        if self.bound is not None and v > self.bound:
            raise DomainError(f"ratio q_{k} = {v} exceeds the declared bound {self.bound}")
        return v

    def a(self, n: int) -> int:
        """a_n (forms the full product; use only for moderate n)."""
        if self.const is not None:
            return self.const ** n
        with self._lock:
            while len(self._as) <= n:
                k = len(self._as)
                self._as.append(self._as[-1] * self.q(k))
        return self._as[n]

    def ratio(self, n: int, m: int) -> Fraction:
        """a_n / a_m for n <= m, from the ratios only."""
        if self.const is not None:
            return Fraction(1, self.const ** (m - n))
        d = 1
        for i in range(n + 1, m + 1):
            d *= self.q(i)
        return Fraction(1, d)

    def __str__(self):
        return self.text


def parse_seq(text: str) -> ArithSeq:
    text = text.strip()
    if text.startswith("const-ratio"):
        try:
            q = int(text[len("const-ratio"):].strip())
        except ValueError:
            raise DSLSyntaxError("const-ratio expects an integer", text, len("const-ratio"))
        return ArithSeq.const_ratio(q)
    if text.startswith("ratio"):
        body = text[len("ratio"):]
        bound = None
        parts = dsl.split_top_level(body, " bound ")
        if len(parts) == 2:
            body, b = parts
            bound = int(b)
        return ArithSeq.from_expr(body.strip(), bound)
    raise DSLSyntaxError("sequence must be 'const-ratio q' or 'ratio <expr in n> [bound M]'", text, 0)


# --------------------------------------------------------------------------
# elements


class CircleElem:
    """Base class: subclasses expose ``digit(seq, n)`` or an exact value."""

    def to_dsl(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_dsl()


@dataclass(frozen=True, eq=False)
class RationalElem(CircleElem):
    value: Fraction

    def __post_init__(self):
        if not 0 <= self.value < 1:
            raise DomainError(f"{self.value} is outside [0, 1)")

    def to_dsl(self):
        return f"rational {self.value.numerator}/{self.value.denominator}"

    def frac_exact(self, seq: ArithSeq, n: int) -> Fraction:
        """{a_n x} from the greedy remainder: r_n = r_{n-1} q_n mod den."""
        return _remainders(self, seq, n)[n]

    def digit(self, seq: ArithSeq, n: int) -> int:
        p = _remainders(self, seq, n)
        return int(p[n - 1] * seq.q(n))


_REM_CACHE: dict = {}
_REM_LOCK = threading.Lock()


def _remainders(x: RationalElem, seq: ArithSeq, n: int):
    """List of x_0..x_n (exact greedy remainder states)."""
    key = (x.value, id(seq))
    with _REM_LOCK:
        entry = _REM_CACHE.get(key)
        if entry is None or entry[0] is not seq:
            entry = (seq, [x.value.numerator], x.value.denominator)
            _REM_CACHE[key] = entry
        _, nums, den = entry
        while len(nums) <= n:
            k = len(nums)
            nums.append(nums[-1] * seq.q(k) % den)
        return _RemView(nums, den)


class _RemView:
    def __init__(self, nums, den):
        self.nums, self.den = nums, den

    def __getitem__(self, i):
        return Fraction(self.nums[i], self.den)


RULES = ("max", "half", "quarter", "const")


def rule_digit(rule, q: int) -> int:
    kind = rule[0] if isinstance(rule, tuple) else rule
    if kind == "max":
        return q - 1
    if kind == "half":
        return q // 2
    if kind == "quarter":
        return max(1, q // 4)
    if kind == "const":
        return rule[1]
    if callable(rule):
        return rule(q)
    raise DomainError(f"unknown digit rule {rule!r}")


def rule_text(rule) -> str:
    if isinstance(rule, tuple):
        return f"const {rule[1]}"
    return rule


@dataclass(frozen=True, eq=False)
class RuleElem(CircleElem):
    support_set: NSet
    rule: object              # 'max' | 'half' | 'quarter' | ('const', v)

    def to_dsl(self):
        return f"support {self.support_set.to_dsl()} rule {rule_text(self.rule)}"

    def digit(self, seq: ArithSeq, n: int) -> int:
        if not self.support_set.contains(n):
            return 0
        q = seq.q(n)
        c = rule_digit(self.rule, q)
        if c < 1:
            raise RuleError(f"rule {rule_text(self.rule)} gives digit 0 on support point {n}")
        if c > q - 1:
            raise RuleError(f"rule {rule_text(self.rule)} gives digit {c} >= q_{n} = {q}")
        return c


@dataclass(frozen=True, eq=False)
class SumElem(CircleElem):
    """x + y mod 1, evaluated through interval sums of the summands."""
    left: CircleElem
    right: CircleElem

    def to_dsl(self):
        return f"sum({self.left.to_dsl()} ; {self.right.to_dsl()})"


ZERO_ELEM = RationalElem(Fraction(0))


def add_elements(x: CircleElem, y: CircleElem) -> CircleElem:
    if isinstance(x, RationalElem) and isinstance(y, RationalElem):
        v = x.value + y.value
        return RationalElem(v - 1 if v >= 1 else v)
    return SumElem(x, y)


def from_support(seq: ArithSeq, A: NSet, rule) -> CircleElem:
    """Digit c_n = rule(q_n) on A and 0 elsewhere; the rule is checked on the
    first ``canonical_window`` support points."""
    x = RuleElem(A, rule)
    n = A.next_member(1)
    for _ in range(settings().canonical_window):
        if n is None:
            break
        x.digit(seq, n)
        n = A.next_member(n + 1)
    return x


def parse_element(text: str) -> CircleElem:
    text = text.strip()
    if text.startswith("rational"):
        body = text[len("rational"):].strip()
        try:
            v = Fraction(body)
        except (ValueError, ZeroDivisionError):
            raise DSLSyntaxError("rational expects p/q", text, len("rational"))
        return RationalElem(v)
    if text == "zero":
        return ZERO_ELEM
    if text.startswith("sum(") and text.endswith(")"):
        parts = dsl.split_top_level(text[4:-1], ";")
        if len(parts) != 2:
            raise DSLSyntaxError("sum expects two elements separated by ';'", text, 4)
        return SumElem(parse_element(parts[0]), parse_element(parts[1]))
    if text.startswith("support"):
        parts = dsl.split_top_level(text[len("support"):], " rule ")
        if len(parts) != 2:
            raise DSLSyntaxError("support element needs 'rule <max|half|quarter|const v>'", text, 0)
        A = parse_nset(parts[0].strip())
        r = parts[1].split()
        if r[0] == "const" and len(r) == 2:
            rule = ("const", int(r[1]))
        elif len(r) == 1 and r[0] in ("max", "half", "quarter"):
            rule = r[0]
        else:
            raise DSLSyntaxError(f"unknown rule {parts[1]!r}", text, len(text) - len(parts[1]))
        return RuleElem(A, rule)
    raise DSLSyntaxError("element must start with 'rational', 'support', 'sum' or 'zero'", text, 0)


# --------------------------------------------------------------------------
# digits and evaluation


def canonical_digits(x, seq: ArithSeq, N: int):
    """Greedy digits c_1..c_N of a rational x in [0, 1) and the remainder x_N."""
    x = Fraction(x.value if isinstance(x, RationalElem) else x)
    if not 0 <= x < 1:
        raise DomainError(f"{x} is outside [0, 1)")
    digits, state = [], x
    for n in range(1, N + 1):
        t = state * seq.q(n)
        c = t.numerator // t.denominator
        digits.append(c)
        state = t - c
    return digits, state


def digit(x: CircleElem, seq: ArithSeq, n: int) -> int:
    if isinstance(x, SumElem):
        raise DomainError("digits of a sum are not tracked; use frac_eval")
    return x.digit(seq, n)


def default_depth() -> int:
    return settings().tail_bits + 8


def frac_eval(x: CircleElem, seq: ArithSeq, n: int, K: int | None = None) -> Interval:
    """Interval [s, s + t] containing {a_n x}, t = a_n / a_{n+K}."""
    K = default_depth() if K is None else K
    if K > settings().digit_cap:
        raise BudgetError(f"tail depth {K} exceeds digit cap {settings().digit_cap}")
    if isinstance(x, SumElem):
        iv = frac_eval(x.left, seq, n, K) + frac_eval(x.right, seq, n, K)
        return iv - 1 if iv.lo >= 1 else iv
    num, den = 0, 1
    for k in range(n + 1, n + K + 1):
        q = seq.q(k)
        num = num * q + x.digit(seq, k)
        den *= q
    return Interval(Fraction(num, den), Fraction(num + 1, den))


def frac_exact(x: CircleElem, seq: ArithSeq, n: int):
    """Exact {a_n x} for rational elements (and sums of them), else None."""
    if isinstance(x, RationalElem):
        return x.frac_exact(seq, n)
    return None


def norm_dist(x: CircleElem, seq: ArithSeq, n: int, K: int | None = None) -> Interval:
    return norm_of_interval(frac_eval(x, seq, n, K))


def norm_best(x: CircleElem, seq: ArithSeq, n: int, K: int | None = None) -> Interval:
    """Exact norm for rationals, digit-tail interval otherwise."""
    v = frac_exact(x, seq, n)
    if v is not None:
        return Interval(min(v, 1 - v))
    return norm_dist(x, seq, n, K)


def support(x: CircleElem, seq: ArithSeq, N: int) -> NSet:
    if isinstance(x, RuleElem):
        return intersect(x.support_set, interval(1, N)) if N >= 1 else EMPTY
    if isinstance(x, RationalElem):
        digits, _ = canonical_digits(x, seq, N)
        return Finite(i + 1 for i, c in enumerate(digits) if c)
    raise DomainError("support of a sum element is not tracked")


def support_set(x: CircleElem, seq: ArithSeq, N: int) -> NSet:
    """Full support as an NSet when known symbolically, else the prefix up to N."""
    if isinstance(x, RuleElem):
        return x.support_set
    return support(x, seq, N)


def is_canonical(x: CircleElem, seq: ArithSeq, N: int, window: int | None = None) -> bool:
    """True unless the trailing window of digits ending at N is all q_n - 1."""
    W = window or settings().canonical_window
    lo = max(1, N - W + 1)
    if isinstance(x, SumElem):
        return True
    return any(x.digit(seq, n) < seq.q(n) - 1 for n in range(lo, N + 1))


def digit_rows(x: CircleElem, seq: ArithSeq, N: int):
    yield ["n", "q_n", "c_n"]
    if isinstance(x, RationalElem):
        digits, _ = canonical_digits(x, seq, N)
    else:
        digits = [x.digit(seq, n) for n in range(1, N + 1)]
    for n, c in enumerate(digits, 1):
        yield [str(n), str(seq.q(n)), str(c)]


def frac_scan(x: CircleElem, seq: ArithSeq, lo: int, hi: int, K: int | None = None):
    """Yield (n, frac_eval(x, seq, n, K)) for n in [lo, hi].

    Constant-ratio digit streams slide a K-digit window (O(1) per step);
    everything else falls back to frac_eval per index.
    """
    K = default_depth() if K is None else K
    if seq.const is None or isinstance(x, SumElem):
        for n in range(lo, hi + 1):
            yield n, frac_eval(x, seq, n, K)
        return
    q = seq.const
    den = q ** K
    top = q ** (K - 1)
    window = [x.digit(seq, k) for k in range(lo + 1, lo + K + 1)]
    num = 0
    for c in window:
        num = num * q + c
    for n in range(lo, hi + 1):
        yield n, Interval(Fraction(num, den), Fraction(num + 1, den))
        lead = x.digit(seq, n + 1)
        num = (num - lead * top) * q + x.digit(seq, n + K + 1)
