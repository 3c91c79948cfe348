"""Modulus functions f and weights g.

Both wrap an evaluator returning certified ``Real`` values plus the
witness data needed to make searches finite: a modulus carries
``unbounded_witness(T)`` (some x with f(x) >= T) and a weight carries
``divergence_witness(T)`` (an N with g(n) >= T for all n >= N).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import certified as C
from . import dsl
from .config import settings
from .errors import CapabilityError, DomainError, MagnitudeCapError


@dataclass(eq=False)
class ModulusFn:
    id: str
    fn: Callable
    unbounded_witness: Optional[Callable] = None
    monotone: bool = True

    def __post_init__(self):
        self._cached = functools.lru_cache(maxsize=4096)(self.fn)

    def __call__(self, x) -> C.Real:
        if isinstance(x, C.Real):
            return self.fn(x)
        x = Fraction(x)
        if x < 0:
            raise DomainError(f"modulus {self.id} evaluated at negative {x}")
        return self._cached(x)

    eval = __call__

    def __str__(self):
        return self.id

    def __eq__(self, other):
        return isinstance(other, ModulusFn) and other.id == self.id

    def __hash__(self):
        return hash(("f", self.id))


@dataclass(eq=False)
class WeightFn:
    id: str
    fn: Callable
    divergence_witness: Optional[Callable] = None
    monotone: bool = False
    pieces: tuple = ()            # ((lo, hi, value), ...): g = value on (lo, hi]
    ratio_evidence: tuple = field(default=())

    def __post_init__(self):
        self._cached = functools.lru_cache(maxsize=4096)(self.fn)

    def __call__(self, n) -> C.Real:
        n = int(n)
        if n < 1:
            raise DomainError(f"weight {self.id} evaluated at {n} < 1")
        return self._cached(n)

    eval = __call__

    def __str__(self):
        return self.id

    def __eq__(self, other):
        return isinstance(other, WeightFn) and other.id == self.id

    def __hash__(self):
        return hash(("g", self.id))


# --------------------------------------------------------------------------
# witnesses


def _ceil(T) -> int:
    return C.ceil_real(T)


def _search_witness(h, start=1):
    """Smallest power of two x >= start with h(x) >= T, assuming h non-decreasing."""
    def witness(T):
        cap = settings().magnitude_cap_bits
        x = max(start, 1)
        while C.compare(h(x), T) < 0:
            x *= 2
            if x.bit_length() > cap:
                raise MagnitudeCapError(f"no witness below 2^{cap} for threshold {C.decimal_str(T)}")
        return x
    return witness


# --------------------------------------------------------------------------
# built-ins


def _identity_modulus():
    return ModulusFn("x", lambda x: C.to_real(x), lambda T: max(_ceil(T), 0))


def _log_modulus():
    def fn(x):
        return C.log(C.add(C.ONE, x))

    def witness(T):
        # log(1 + 2^b) >= b * log 2 >= T once b >= T / log 2
        b = max(C.ceil_real(C.div(T, C.Log(Fraction(2)))), 0) if C.sign(T) > 0 else 0
        return (1 << b) if b else 0
    return ModulusFn("log(1+x)", fn, witness)


def _power_modulus(e: Fraction, text: str):
    def fn(x):
        return C.pow_real(x, e)

    def witness(T):
        if C.sign(T) <= 0:
            return 0
        t = C.ceil_real(T)
        return t ** (-(-e.denominator // e.numerator))
    return ModulusFn(text, fn, witness)


def _bounded_modulus():
    return ModulusFn("x/(1+x)", lambda x: C.div(x, C.add(C.ONE, x)), None)


def _n_weight():
    return WeightFn("n", lambda n: C.Exact(Fraction(n)), lambda T: max(_ceil(T), 1), monotone=True)


def _power_weight(e: Fraction, text: str):
    def witness(T):
        if C.sign(T) <= 0:
            return 1
        t = C.ceil_real(T)
        return max(t ** (-(-e.denominator // e.numerator)), 1)
    return WeightFn(text, lambda n: C.power(n, e), witness, monotone=True)


def _log_weight():
    def witness(T):
        if C.sign(T) <= 0:
            return 1
        b = C.ceil_real(C.div(T, C.Log(Fraction(2))))
        return 1 << max(b, 0)
    return WeightFn("log(1+n)", lambda n: C.Log(Fraction(n + 1)), witness, monotone=True)


def _floor_sqrt_weight():
    def fn(n):
        from math import isqrt
        return C.Exact(Fraction(isqrt(n)))

    def witness(T):
        t = max(C.ceil_real(T), 1) if C.sign(T) > 0 else 1
        return t * t
    return WeightFn("floor(sqrt(n))", fn, witness, monotone=True)


def _parse_exponent(text, var):
    """Recognize ``var^(p/q)`` and ``var^p`` returning the exponent."""
    tree = dsl.parse_expr(text)
    if tree[0] == "pow" and tree[1] == ("var", var):
        try:
            e = dsl.evaluate(tree[2], {}).exact
        except Exception:
            return None
        return e
    return None


def modulus(text: str) -> ModulusFn:
    """Parse a modulus description (``x``, ``log(1+x)``, ``x^(1/2)``, ``sqrt(x)``, ...)."""
    tree = dsl.parse_expr(text)
    canon = dsl.expr_to_text(tree)
    if canon == "x":
        return _identity_modulus()
    if canon in ("log(1+x)", "log(x+1)"):
        return _log_modulus()
    if canon == "sqrt(x)":
        return _power_modulus(Fraction(1, 2), "x^(1/2)")
    if canon in ("x/(1+x)", "x/(x+1)"):
        return _bounded_modulus()
    e = _parse_exponent(canon, "x")
    if e is not None:
        if not 0 < e <= 1:
            raise DomainError(f"x^{e} is not a modulus (exponent must lie in (0, 1])")
        if e == 1:
            return _identity_modulus()
        return _power_modulus(e, f"x^({e})")
    return generic_modulus(tree)


def generic_modulus(tree) -> ModulusFn:
    extra = dsl.free_vars(tree) - {"x"}
    if extra:
        raise DomainError(f"modulus may only use x, found {sorted(extra)}")
    text = dsl.expr_to_text(tree)
    direction, _ = dsl.monotonicity(tree, "x")

    def fn(x):
        return dsl.evaluate(tree, {"x": x})

    f = ModulusFn(text, fn, None, monotone=direction in ("inc", "const"))
    if direction == "inc":
        f.unbounded_witness = _search_witness(f, 1)
    return f


def weight(text: str) -> WeightFn:
    """Parse a weight description (``n``, ``sqrt(n)``, ``log(1+n)``, ``piecewise(...)``, ...)."""
    text = text.strip()
    if text.startswith("piecewise"):
        return parse_piecewise(text)
    tree = dsl.parse_expr(text)
    canon = dsl.expr_to_text(tree)
    if canon == "n":
        return _n_weight()
    if canon == "sqrt(n)":
        return _power_weight(Fraction(1, 2), "n^(1/2)")
    if canon in ("log(1+n)", "log(n+1)"):
        return _log_weight()
    if canon == "floor(sqrt(n))":
        return _floor_sqrt_weight()
    e = _parse_exponent(canon, "n")
    if e is not None and e > 0:
        if e == 1:
            return _n_weight()
        if e.denominator == 1:
            return WeightFn(f"n^{e}", lambda n, e=e: C.Exact(Fraction(n) ** e.numerator),
                            lambda T: max(C.ceil_real(T), 1), monotone=True)
        return _power_weight(e, f"n^({e})")
    return generic_weight(tree)


def generic_weight(tree) -> WeightFn:
    extra = dsl.free_vars(tree) - {"n"}
    if extra:
        raise DomainError(f"weight may only use n, found {sorted(extra)}")
    text = dsl.expr_to_text(tree)
    direction, _ = dsl.monotonicity(tree, "n")

    def fn(n):
        return dsl.evaluate(tree, {"n": n})

    g = WeightFn(text, fn, None, monotone=direction in ("inc", "const"))
    if direction == "inc":
        g.divergence_witness = _search_witness(g, 1)
    return g


# --------------------------------------------------------------------------
# piecewise weights: constant on finitely many blocks, n elsewhere


def piecewise_weight(pieces) -> WeightFn:
    """g(n) = v on (lo, hi] for each (lo, hi, v), and g(n) = n elsewhere."""
    pieces = tuple(sorted((int(a), int(b), Fraction(v)) for a, b, v in pieces))
    for (a, b, _), (c, _d, _e) in zip(pieces, pieces[1:]):
        if c < b:
            raise DomainError("piecewise blocks overlap")
    los = [p[0] for p in pieces]
    import bisect

    def fn(n):
        i = bisect.bisect_left(los, n) - 1      # last block with lo < n
        if i >= 0 and n <= pieces[i][1]:
            return C.Exact(pieces[i][2])
        return C.Exact(Fraction(n))

    def witness(T):
        N = max(C.ceil_real(T), 1) if C.sign(T) > 0 else 1
        changed = True
        while changed:
            changed = False
            for lo, hi, v in pieces:
                if hi >= N and C.compare(C.Exact(v), T) < 0:
                    N = hi + 1
                    changed = True
        return N

    body = ", ".join(f"({a},{b}]={_fmt(v)}" for a, b, v in pieces)
    text = f"piecewise({body}; otherwise n)"
    return WeightFn(text, fn, witness, monotone=_piecewise_monotone(pieces), pieces=pieces)


def _piecewise_monotone(pieces):
    # each block value must sit between its neighbours: lo on the left, hi + 1 on the right
    for i, (lo, hi, v) in enumerate(pieces):
        left = pieces[i - 1][2] if i and pieces[i - 1][1] == lo else lo
        right = pieces[i + 1][2] if i + 1 < len(pieces) and pieces[i + 1][0] == hi else hi + 1
        if not (left <= v <= right):
            return False
    return True


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_piecewise(text: str) -> WeightFn:
    tk = dsl.Tokens(text)
    tk.expect("piecewise")
    tk.expect("(")
    pieces = []
    while not tk.accept(";"):
        tk.expect("(")
        lo = tk.expect_int()
        tk.expect(",")
        hi = tk.expect_int()
        tk.expect("]")
        tk.expect("=")
        v = Fraction(tk.expect_int())
        if tk.accept("/"):
            v /= tk.expect_int()
        pieces.append((lo, hi, v))
        if tk.peek()[1] == ";":
            continue
        tk.expect(",")
    tk.expect("otherwise")
    tk.expect("n")
    tk.expect(")")
    tk.finish()
    return piecewise_weight(pieces)


# --------------------------------------------------------------------------
# operations


@dataclass
class AxiomReport:
    verdicts: dict            # axiom name -> bool
    counterexamples: dict     # axiom name -> tuple
    notes: list

    @property
    def ok(self):
        return all(self.verdicts.values())

    def lines(self):
        out = []
        for name, ok in self.verdicts.items():
            extra = "" if ok else f" counterexample {self.counterexamples.get(name)}"
            out.append(f"{name}: {'pass' if ok else 'FAIL'}{extra}")
        return out + self.notes


def check_modulus_axioms(f: ModulusFn, samples) -> AxiomReport:
    samples = [Fraction(s) for s in samples]
    if not samples:
        raise DomainError("samples must be non-empty")
    if any(s < 0 for s in samples):
        raise DomainError("samples must be non-negative")
    vals = {}
    for s in samples:
        try:
            vals[s] = f(s)
        except Exception as exc:
            raise DomainError(f"evaluating {f.id} at sample {s} failed: {exc}") from exc
    verdicts = {"zero": True, "positive": True, "monotone": True, "subadditive": True,
                "right-continuous-at-0": True}
    cex = {}
    if C.compare(f(0), 0) != 0:
        verdicts["zero"] = False
        cex["zero"] = (0,)
    for s in samples:
        if s > 0 and C.compare(vals[s], 0) <= 0:
            verdicts["positive"] = False
            cex.setdefault("positive", (s,))
    ordered = sorted(set(samples))
    for a, b in zip(ordered, ordered[1:]):
        if C.compare(vals[a], vals[b]) > 0:
            verdicts["monotone"] = False
            cex.setdefault("monotone", (a, b))
    for i, a in enumerate(samples):
        for b in samples[i:]:
            if C.compare(f(a + b), C.add(vals[a], vals[b])) > 0:
                verdicts["subadditive"] = False
                cex.setdefault("subadditive", (a, b))
    # f(1/2^k) should decrease toward 0; sampled evidence only
    tail = [f(Fraction(1, 1 << k)) for k in (8, 16, 32)]
    if not all(C.compare(tail[i + 1], tail[i]) <= 0 for i in range(2)) or \
            C.compare(tail[-1], Fraction(1, 1000)) > 0:
        verdicts["right-continuous-at-0"] = False
        cex["right-continuous-at-0"] = ("f(2^-32)", C.decimal_str(tail[-1]))
    notes = ["right continuity at 0 is sampled evidence only (f(2^-k) for k = 8, 16, 32)"]
    return AxiomReport(verdicts, cex, notes)


def invert_modulus(f: ModulusFn, y, strict: bool = False) -> int:
    """Minimal integer x >= 0 with f(x) >= y (or f(x) > y when ``strict``)."""
    y = C.to_real(y)
    if C.sign(y) < 0:
        raise DomainError("invert_modulus needs y >= 0")

    def ok(x):
        c = C.compare(f(x), y)
        return c > 0 if strict else c >= 0

    if ok(0):
        return 0
    if f.unbounded_witness is None:
        raise CapabilityError(f"modulus {f.id} has no unboundedness witness")
    cap = settings().magnitude_cap_bits
    lo, hi = 0, 1
    while not ok(hi):
        lo, hi = hi, hi * 2
        if hi.bit_length() > cap + 1:
            raise MagnitudeCapError(f"f^-1({C.decimal_str(y)}) exceeds 2^{cap}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def monotone_envelope(g: WeightFn) -> WeightFn:
    """g'(n) = min_{m >= n} g(m), computed exactly with the divergence witness."""
    if g.monotone:
        return g
    if g.divergence_witness is None:
        raise CapabilityError(f"weight {g.id} has no divergence witness")

    def fn(n):
        gn = g(n)
        W = g.divergence_witness(C.add(gn, C.ONE))
        if g.pieces:
            return _piecewise_tail_min(g, n, W)
        best = gn
        if W - n > settings().generator_budget:
            raise CapabilityError(f"tail scan for envelope at {n} spans {W - n} indices")
        for m in range(n + 1, W):
            v = g(m)
            if C.compare(v, best) < 0:
                best = v
        return best

    env = WeightFn(f"envelope({g.id})", fn, g.divergence_witness, monotone=True)
    return env


def _piecewise_tail_min(g, n, W):
    """min of g over [n, W) for a piecewise weight: identity stretches contribute
    their first index, blocks their constant value."""
    cands = []
    pos = n
    for lo, hi, v in g.pieces:
        if hi < n:
            continue
        if pos >= W or lo + 1 >= W:
            break
        if lo + 1 > pos:
            cands.append(Fraction(pos))
        cands.append(v)
        pos = max(pos, hi + 1)
    if pos < W:
        cands.append(Fraction(pos))
    return C.Exact(min(cands)) if cands else g(n)


def compose(f: ModulusFn, g: WeightFn):
    """n -> f(g(n))."""
    return lambda n: f(g(n))


MODULI = ("x", "log(1+x)", "x^(1/2)", "x^(1/3)")
WEIGHTS = ("n", "sqrt(n)", "log(1+n)", "n^(2/3)", "floor(sqrt(n))")


def builtin_pairs():
    """The (f, g) test matrix for tallness evidence."""
    return [("x", "n"), ("log(1+x)", "n"), ("x^(1/2)", "n"), ("x", "sqrt(n)"),
            ("log(1+x)", "sqrt(n)"), ("log(1+x)", "log(1+n)")]

