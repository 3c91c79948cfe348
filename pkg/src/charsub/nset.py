"""Symbolic subsets of the positive integers with exact prefix counting.

Every set answers ``count(n) = |A ∩ [1, n]|`` from endpoint data: interval
families binary-search their (lazily generated, cached) endpoint lists and
progressions use closed forms, so indices may be arbitrarily large integers.
``runs(lo, hi)`` streams disjoint increasing intervals covering A ∩ [lo, hi];
it is the fallback used by intersections and shift unions.
"""
from __future__ import annotations

import bisect
import threading
from fractions import Fraction
from math import gcd

from . import dsl
from .config import settings
from .errors import BudgetError, DomainError, MalformedSetError


def _budgeted(runs):
    limit = settings().run_budget
    for i, r in enumerate(runs):
        if i >= limit:
            raise BudgetError(f"set query streamed more than {limit} runs")
        yield r


class NSet:
    """Base class. Subclasses implement ``count``, ``contains``, ``runs``, ``to_dsl``."""

    sparse = False  # True when runs() is cheap compared with the range length

    def count(self, n: int) -> int:
        raise NotImplementedError

    def contains(self, n: int) -> bool:
        raise NotImplementedError

    def runs(self, lo: int, hi: int):
        raise NotImplementedError

    def to_dsl(self) -> str:
        raise NotImplementedError

    def upper_bound(self):
        """Largest member if the set is known to be finite, else None."""
        return None

    def __contains__(self, n):
        return self.contains(n)

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return f"NSet({self.to_dsl()!r})"

    def count_range(self, lo: int, hi: int) -> int:
        """|A ∩ [lo, hi]|."""
        if hi < lo:
            return 0
        return self.count(hi) - self.count(max(lo, 1) - 1)

    def members(self, lo: int, hi: int):
        for a, b in self.runs(lo, hi):
            yield from range(a, b + 1)

    def prefix(self, n: int) -> list[int]:
        return list(self.members(1, n))

    def next_member(self, n: int):
        """Smallest member >= n, or None if there is none below the magnitude cap."""
        n = max(n, 1)
        ub = self.upper_bound()
        cap = 1 << settings().magnitude_cap_bits
        width = 64
        while True:
            hi = n + width
            if self.count_range(n, hi) > 0:
                for a, _ in self.runs(n, hi):
                    return a
            if (ub is not None and hi >= ub) or hi >= cap:
                return None
            width *= 2

    def nth(self, k: int):
        """The k-th smallest member (1-based), or None below the magnitude cap."""
        if k < 1:
            raise DomainError("nth expects k >= 1")
        hi = max(k, 1)
        cap = 1 << settings().magnitude_cap_bits
        while self.count(hi) < k:
            ub = self.upper_bound()
            if (ub is not None and hi >= ub) or hi >= cap:
                return None
            hi *= 2
        lo = 0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.count(mid) >= k:
                hi = mid
            else:
                lo = mid
        return hi

    def equal_on(self, other: "NSet", n: int) -> bool:
        return all(self.contains(i) == other.contains(i) for i in range(1, n + 1))


# --------------------------------------------------------------------------
# atoms


class Finite(NSet):
    sparse = True

    def __init__(self, items):
        items = sorted(set(int(i) for i in items))
        if items and items[0] < 1:
            items = [i for i in items if i >= 1]
        self.items = tuple(items)

    def count(self, n):
        return bisect.bisect_right(self.items, n)

    def contains(self, n):
        i = bisect.bisect_left(self.items, n)
        return i < len(self.items) and self.items[i] == n

    def runs(self, lo, hi):
        i = bisect.bisect_left(self.items, lo)
        items = self.items
        while i < len(items) and items[i] <= hi:
            a = b = items[i]
            i += 1
            while i < len(items) and items[i] == b + 1 and items[i] <= hi:
                b = items[i]
                i += 1
            yield a, b

    def upper_bound(self):
        return self.items[-1] if self.items else 0

    def to_dsl(self):
        if not self.items:
            return "empty"
        return "{" + ", ".join(map(str, self.items)) + "}"


EMPTY = Finite(())


class Prog(NSet):
    """{start, start + step, ...} with start >= 1, step >= 1."""

    def __init__(self, start: int, step: int):
        if step < 1:
            raise DomainError("progression step must be >= 1")
        if start < 1:
            raise DomainError("progression start must be >= 1")
        self.start, self.step = int(start), int(step)

    def count(self, n):
        return 0 if n < self.start else (n - self.start) // self.step + 1

    def contains(self, n):
        return n >= self.start and (n - self.start) % self.step == 0

    def runs(self, lo, hi):
        lo = max(lo, self.start)
        if self.step == 1:
            if lo <= hi:
                yield lo, hi
            return
        first = lo + (-(lo - self.start)) % self.step
        for a in range(first, hi + 1, self.step):
            yield a, a

    def count_in(self, lo, hi):
        return self.count_range(lo, hi)

    def to_dsl(self):
        if self.start == 1 and self.step == 1:
            return "naturals"
        return f"progression({self.start}, {self.step})"


NATURALS = Prog(1, 1)


def prog_clipped(start: int, step: int) -> Prog:
    if start < 1:
        start += ((1 - start) + step - 1) // step * step
    return Prog(start, step)


class IntervalUnion(NSet):
    """Union of intervals [l_k, r_k] for k = k0, k0+1, ... from a generator.

    The generator must satisfy l_k <= r_k < l_{k+1}; this is checked as
    intervals are produced and a violation raises MalformedSetError.
    Intervals are clipped to [1, ∞).
    """

    sparse = True

    def __init__(self, gen, k0: int = 1, k1=None, text: str | None = None):
        self._gen = gen
        self.k0 = k0
        self.k1 = k1
        self.text = text
        self._ls: list[int] = []
        self._rs: list[int] = []
        self._cum: list[int] = [0]   # _cum[i] = total length of intervals 0..i-1
        self._next_k = k0
        self._last_r = None
        self._done = False
        self._lock = threading.RLock()

    @classmethod
    def from_list(cls, intervals):
        intervals = tuple((int(a), int(b)) for a, b in intervals)
        text = "intervals(" + ", ".join(f"[{a}, {b}]" for a, b in intervals) + ")"
        return cls(lambda k: intervals[k - 1], 1, len(intervals), text)

    @classmethod
    def from_exprs(cls, var, k0, k1, lo_ast, hi_ast):
        def gen(k):
            env = {var: k}
            return dsl.evaluate_int(lo_ast, env), dsl.evaluate_int(hi_ast, env)

        rng = f"{k0}..{'' if k1 is None else k1}"
        if lo_ast == hi_ast:
            text = f"points {var} in {rng} : {dsl.expr_to_text(lo_ast)}"
        else:
            text = f"union {var} in {rng} : [{dsl.expr_to_text(lo_ast)}, {dsl.expr_to_text(hi_ast)}]"
        return cls(gen, k0, k1, text)

    def _extend_until(self, n):
        """Generate intervals until one starts beyond n (or the stream ends)."""
        if self._done or (self._ls and self._ls[-1] > n):
            return
        with self._lock:
            while not self._done and not (self._ls and self._ls[-1] > n):
                self._step()

    def _step(self):
        k = self._next_k
        if self.k1 is not None and k > self.k1:
            self._done = True
            return
        budget = settings().generator_budget
        if k - self.k0 >= budget:
            raise BudgetError(f"interval generator exceeded budget of {budget} indices")
        lo, hi = (int(v) for v in self._gen(k))
        if lo > hi:
            raise MalformedSetError(f"interval {k} is [{lo}, {hi}] with l > r")
        if self._last_r is not None and lo <= self._last_r:
            raise MalformedSetError(f"interval {k} starts at {lo}, not after the previous end {self._last_r}")
        self._next_k = k + 1
        self._last_r = hi
        if hi < 1:
            return
        lo = max(lo, 1)
        self._ls.append(lo)
        self._rs.append(hi)
        self._cum.append(self._cum[-1] + hi - lo + 1)

    def probe(self, count: int = 64):
        """Force generation of the first ``count`` indices (validation)."""
        with self._lock:
            while not self._done and self._next_k - self.k0 < count:
                self._step()
        return list(zip(self._ls, self._rs))

    def interval(self, i: int):
        """The i-th stored interval (0-based), generating as needed."""
        with self._lock:
            while len(self._ls) <= i and not self._done:
                self._step()
        if i < len(self._ls):
            return self._ls[i], self._rs[i]
        return None

    def count(self, n):
        if n < 1:
            return 0
        self._extend_until(n)
        i = bisect.bisect_right(self._ls, n)   # intervals with l <= n
        if i == 0:
            return 0
        return self._cum[i - 1] + min(n, self._rs[i - 1]) - self._ls[i - 1] + 1

    def contains(self, n):
        if n < 1:
            return False
        self._extend_until(n)
        i = bisect.bisect_right(self._ls, n)
        return i > 0 and n <= self._rs[i - 1]

    def runs(self, lo, hi):
        if hi < lo:
            return
        self._extend_until(hi)
        i = max(bisect.bisect_right(self._ls, lo) - 1, 0)
        while i < len(self._ls) and self._ls[i] <= hi:
            a, b = max(self._ls[i], lo), min(self._rs[i], hi)
            if a <= b:
                yield a, b
            i += 1

    def endpoints_upto(self, n):
        self._extend_until(n)
        i = bisect.bisect_right(self._ls, n)
        return list(zip(self._ls[:i], self._rs[:i]))

    def upper_bound(self):
        if self.k1 is None:
            return None
        self.interval(self.k1 - self.k0)
        return self._rs[-1] if self._rs else 0

    def to_dsl(self):
        return self.text


# --------------------------------------------------------------------------
# combinators


class Shift(NSet):
    """(A - i) ∩ ℕ."""

    def __init__(self, base: NSet, i: int):
        self.base, self.i = base, int(i)
        self.sparse = base.sparse

    def count(self, n):
        if n < 1:
            return 0
        return self.base.count(n + self.i) - self.base.count(self.i)

    def contains(self, n):
        return n >= 1 and self.base.contains(n + self.i)

    def runs(self, lo, hi):
        for a, b in self.base.runs(max(lo, 1) + self.i, hi + self.i):
            yield a - self.i, b - self.i

    def upper_bound(self):
        ub = self.base.upper_bound()
        return None if ub is None else max(ub - self.i, 0)

    def to_dsl(self):
        return f"shift({self.base.to_dsl()}, {self.i})"


def shift(A: NSet, i: int) -> NSet:
    if i < 0:
        raise DomainError("shift amount must be non-negative")
    if i == 0:
        return A
    if isinstance(A, Prog):
        return prog_clipped(A.start - i, A.step)
    if isinstance(A, Finite):
        return Finite(a - i for a in A.items if a - i >= 1)
    return Shift(A, i)


class ShiftUnion(NSet):
    """⋃_{i=0}^{k} (A - i) ∩ ℕ: the n with A ∩ [n, n + k] nonempty."""

    def __init__(self, base: NSet, k: int):
        self.base, self.k = base, int(k)
        self.sparse = base.sparse

    def contains(self, n):
        return n >= 1 and self.base.count_range(n, n + self.k) > 0

    def runs(self, lo, hi):
        lo = max(lo, 1)
        cur = None
        for a, b in _budgeted(self.base.runs(lo, hi + self.k)):
            a, b = max(a - self.k, lo), min(b, hi)
            if a > b:
                continue
            if cur is not None and a <= cur[1] + 1:
                cur[1] = max(cur[1], b)
            else:
                if cur is not None:
                    yield cur[0], cur[1]
                cur = [a, b]
        if cur is not None:
            yield cur[0], cur[1]

    def count(self, n):
        return sum(b - a + 1 for a, b in self.runs(1, n))

    def upper_bound(self):
        return self.base.upper_bound()

    def to_dsl(self):
        return f"shifts({self.base.to_dsl()}, {self.k})"


def shifts(A: NSet, k: int) -> NSet:
    if k < 0:
        raise DomainError("shift count must be non-negative")
    if k == 0:
        return A
    if isinstance(A, Prog):
        if k >= A.step - 1:
            return prog_clipped(A.start - k, 1)
        return union(*(prog_clipped(A.start - i, A.step) for i in range(k + 1)))
    return ShiftUnion(A, k)


class Complement(NSet):
    def __init__(self, base: NSet):
        self.base = base

    def count(self, n):
        return max(n, 0) - self.base.count(n)

    def contains(self, n):
        return n >= 1 and not self.base.contains(n)

    def runs(self, lo, hi):
        lo = max(lo, 1)
        pos = lo
        for a, b in _budgeted(self.base.runs(lo, hi)):
            if a > pos:
                yield pos, a - 1
            pos = b + 1
        if pos <= hi:
            yield pos, hi

    def to_dsl(self):
        return f"complement({self.base.to_dsl()})"


def complement(A: NSet) -> NSet:
    if isinstance(A, Complement):
        return A.base
    return Complement(A)


def _merge_runs(streams):
    import heapq
    cur = None
    for a, b in heapq.merge(*streams):
        if cur is not None and a <= cur[1] + 1:
            cur[1] = max(cur[1], b)
        else:
            if cur is not None:
                yield cur[0], cur[1]
            cur = [a, b]
    if cur is not None:
        yield cur[0], cur[1]


class Union(NSet):
    def __init__(self, parts):
        self.parts = tuple(parts)
        self.sparse = all(p.sparse for p in self.parts)

    def contains(self, n):
        return any(p.contains(n) for p in self.parts)

    def runs(self, lo, hi):
        return _budgeted(_merge_runs([p.runs(lo, hi) for p in self.parts]))

    def count(self, n):
        if n < 1:
            return 0
        if len(self.parts) == 1:
            return self.parts[0].count(n)
        # inclusion–exclusion on the first part against the rest
        head, rest = self.parts[0], union(*self.parts[1:])
        return head.count(n) + rest.count(n) - intersect(head, rest).count(n)

    def upper_bound(self):
        ubs = [p.upper_bound() for p in self.parts]
        return None if any(u is None for u in ubs) else max(ubs, default=0)

    def to_dsl(self):
        return "union(" + ", ".join(p.to_dsl() for p in self.parts) + ")"


def union(*parts) -> NSet:
    parts = [p for p in parts if not (isinstance(p, Finite) and not p.items)]
    if not parts:
        return EMPTY
    if len(parts) == 1:
        return parts[0]
    return Union(parts)


def _intersect_runs(x, y):
    x, y = iter(x), iter(y)
    a = next(x, None)
    b = next(y, None)
    while a is not None and b is not None:
        lo, hi = max(a[0], b[0]), min(a[1], b[1])
        if lo <= hi:
            yield lo, hi
        if a[1] < b[1]:
            a = next(x, None)
        else:
            b = next(y, None)


class Inter(NSet):
    def __init__(self, parts):
        self.parts = tuple(parts)
        self.sparse = any(p.sparse for p in self.parts)

    def contains(self, n):
        return all(p.contains(n) for p in self.parts)

    def runs(self, lo, hi):
        streams = [p.runs(lo, hi) for p in self.parts]
        out = streams[0]
        for s in streams[1:]:
            out = _intersect_runs(out, s)
        return _budgeted(out)

    def count(self, n):
        if n < 1:
            return 0
        a, b = self.parts[0], intersect(*self.parts[1:])
        if isinstance(b, Complement):
            return a.count(n) - intersect(a, b.base).count(n)
        if isinstance(a, Complement):
            return b.count(n) - intersect(b, a.base).count(n)
        if b.sparse and not a.sparse:
            a, b = b, a
        if a.sparse:
            return sum(b.count_range(x, y) for x, y in _budgeted(a.runs(1, n)))
        return sum(y - x + 1 for x, y in self.runs(1, n))

    def upper_bound(self):
        ubs = [p.upper_bound() for p in self.parts if p.upper_bound() is not None]
        return min(ubs) if ubs else None

    def to_dsl(self):
        return "intersect(" + ", ".join(p.to_dsl() for p in self.parts) + ")"


def _crt_progs(p: Prog, q: Prog) -> NSet:
    g = gcd(p.step, q.step)
    if (p.start - q.start) % g:
        return EMPTY
    lcm = p.step // g * q.step
    # solve x ≡ p.start (mod p.step), x ≡ q.start (mod q.step)
    m1, m2 = p.step // g, q.step // g
    t = ((q.start - p.start) // g * pow(m1, -1, m2)) % m2 if m2 > 1 else 0
    x = p.start + p.step * t
    floor_start = max(p.start, q.start)
    if x < floor_start:
        x += (floor_start - x + lcm - 1) // lcm * lcm
    return Prog(x, lcm)


def intersect(*parts) -> NSet:
    if not parts:
        return NATURALS
    if any(isinstance(p, Finite) and not p.items for p in parts):
        return EMPTY
    progs = [p for p in parts if isinstance(p, Prog)]
    others = [p for p in parts if not isinstance(p, Prog)]
    if len(progs) > 1:
        acc = progs[0]
        for p in progs[1:]:
            acc = _crt_progs(acc, p)
            if isinstance(acc, Finite):
                return EMPTY
        progs = [acc]
    parts = progs + others
    if len(parts) == 1:
        return parts[0]
    return Inter(parts)


def interval(lo: int, hi: int) -> NSet:
    return IntervalUnion.from_list([(lo, hi)]) if lo <= hi else EMPTY


# --------------------------------------------------------------------------
# parsing


def from_syntax(tree) -> NSet:
    kind = tree[0]
    if kind == "empty":
        return EMPTY
    if kind == "naturals":
        return NATURALS
    if kind == "finite":
        return Finite(tree[1])
    if kind == "progression":
        if tree[2] < 1:
            raise DomainError("progression step must be >= 1")
        if tree[1] < 1:
            raise DomainError("progression start must be >= 1")
        return Prog(tree[1], tree[2])
    if kind == "family":
        _, var, k0, k1, lo, hi = tree
        extra = (dsl.free_vars(lo) | dsl.free_vars(hi)) - {var}
        if extra:
            raise DomainError(f"unbound variables {sorted(extra)} in interval family")
        return IntervalUnion.from_exprs(var, k0, k1, lo, hi)
    if kind == "union":
        return Union([from_syntax(t) for t in tree[1]]) if len(tree[1]) > 1 else from_syntax(tree[1][0])
    if kind == "intersect":
        return intersect(*[from_syntax(t) for t in tree[1]])
    if kind == "complement":
        return Complement(from_syntax(tree[1]))
    if kind == "shift":
        return Shift(from_syntax(tree[1]), tree[2]) if tree[2] else from_syntax(tree[1])
    if kind == "shifts":
        return ShiftUnion(from_syntax(tree[1]), tree[2]) if tree[2] else from_syntax(tree[1])
    if kind == "intervals":
        return IntervalUnion.from_list(tree[1])
    raise ValueError(kind)


def parse_nset(text: str) -> NSet:
    """Parse the set DSL. Interval families are validated lazily."""
    return from_syntax(dsl.parse_set_syntax(text))


def validate(A: NSet, probe: int = 1000, intervals: int = 64) -> None:
    """Eagerly exercise a set on a probe prefix so malformed generators surface."""
    for node in _walk(A):
        if isinstance(node, IntervalUnion):
            node.probe(intervals)
    A.count(probe)


def _walk(A):
    yield A
    for attr in ("base",):
        if hasattr(A, attr):
            yield from _walk(getattr(A, attr))
    for p in getattr(A, "parts", ()):
        yield from _walk(p)


# --------------------------------------------------------------------------
# interval families of the form B_r = [n_{2r-1}, n_{2r}]


class IntervalFamily:
    """Blocks B_r = [n_{2r-1}, n_{2r}] and gaps G_r = [n_{2r}+1, n_{2r+1}-1]
    built from a strictly increasing sequence n_1 < n_2 < ... given by an
    expression in ``var``."""

    def __init__(self, expr, var: str = "j", start: int = 1):
        self.expr = dsl.parse_expr(expr) if isinstance(expr, str) else expr
        self.var = var
        self.start = start

    def n(self, r: int) -> int:
        return dsl.evaluate_int(self.expr, {self.var: r + self.start - 1})

    def _at(self, shape):
        return dsl.substitute(self.expr, self.var, dsl.parse_expr(shape))

    def endpoints(self) -> NSet:
        """The set {n_r : r >= 1}."""
        e = self._at(f"k+{self.start - 1}") if self.start != 1 else dsl.substitute(self.expr, self.var, ("var", "k"))
        return IntervalUnion.from_exprs("k", 1, None, e, e)

    def endpoints_from(self, r0: int) -> NSet:
        e = self._at(f"k+{r0 + self.start - 2}") if r0 + self.start - 2 else dsl.substitute(self.expr, self.var, ("var", "k"))
        return IntervalUnion.from_exprs("k", 1, None, e, e)

    def blocks(self) -> NSet:
        off = self.start - 1
        lo = self._at(f"2*k-1+{off}" if off else "2*k-1")
        hi = self._at(f"2*k+{off}" if off else "2*k")
        return IntervalUnion.from_exprs("k", 1, None, lo, hi)

    def block(self, r: int):
        return self.n(2 * r - 1), self.n(2 * r)

    def gap(self, r: int):
        return self.n(2 * r) + 1, self.n(2 * r + 1) - 1

    def to_dsl(self):
        return self.blocks().to_dsl()


def as_fraction(x) -> Fraction:
    return Fraction(x)
