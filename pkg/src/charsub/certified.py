"""Certified real arithmetic with exact rational endpoints.

Values are kept symbolic where the package needs exact decisions:

* ``Exact(v)``           a rational number,
* ``Power(b, e, c)``     c * b**e with rational b > 0 and non-integer rational e,
* ``Log(r, c)``          c * ln(r) with rational r > 0, r != 1,
* ``Op(name, args)``     anything else, evaluated only through enclosures.

``compare`` decides order exactly whenever both sides are algebraic
monomials or both are scaled logarithms (ties such as ln 4 = 2 ln 2 are
decided exactly); otherwise it refines enclosures, doubling the precision
until the intervals separate or the configured cap is reached.

Roots are bracketed with integer ``iroot``, so their enclosures are
rigorous. Logarithms come from mpmath at ``prec + 32`` working bits and are
widened by ``(|v| + 1) * 2**-prec``, which exceeds mpmath's error bound by
a factor of about 2**29.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil, gcd

import gmpy2
import mpmath

from .config import settings
from .errors import DomainError, PrecisionError

_ONE = Fraction(1)
_ZERO = Fraction(0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Exact):
        return x.value
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class Interval:
    """Closed interval [lo, hi] with Fraction endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _frac(lo)
        hi = lo if hi is None else _frac(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= _frac(x) <= self.hi

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _as_interval(other) / self

    def hull(self, other):
        other = _as_interval(other)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(x)


def norm_of_interval(iv: Interval) -> Interval:
    """Enclosure of the distance to the nearest integer over ``iv``."""
    if iv.width >= 1:
        return Interval(0, Fraction(1, 2))
    k = floor(iv.lo)
    lo, hi = iv.lo - k, iv.hi - k          # 0 <= lo < 1, hi < 2
    if hi >= 1:                            # an integer lies inside
        return Interval(0, max(min(lo, 1 - lo), min(hi - 1, 2 - hi)))
    half = Fraction(1, 2)
    if hi <= half:
        return Interval(lo, hi)
    if lo >= half:
        return Interval(1 - hi, 1 - lo)
    return Interval(min(lo, 1 - hi), half)


def frac_of_interval(iv: Interval) -> Interval | None:
    """Fractional-part enclosure when ``iv`` stays inside one unit cell."""
    k = floor(iv.lo)
    if iv.hi >= k + 1:
        if iv.hi == k + 1 and iv.lo > k:
            return None
        if iv.hi > k + 1:
            return None
    return Interval(iv.lo - k, iv.hi - k)


# --------------------------------------------------------------------------
# symbolic reals


class Real:
    __slots__ = ()

    def enclose(self, prec: int) -> Interval:
        raise NotImplementedError

    @property
    def exact(self) -> Fraction | None:
        return None

    def __add__(self, other):
        return add(self, to_real(other))

    def __radd__(self, other):
        return add(to_real(other), self)

    def __sub__(self, other):
        return add(self, neg(to_real(other)))

    def __rsub__(self, other):
        return add(to_real(other), neg(self))

    def __mul__(self, other):
        return mul(self, to_real(other))

    def __rmul__(self, other):
        return mul(to_real(other), self)

    def __truediv__(self, other):
        return div(self, to_real(other))

    def __rtruediv__(self, other):
        return div(to_real(other), self)

    def __neg__(self):
        return neg(self)

    def __float__(self):
        return float(self.enclose(64).mid)


@dataclass(frozen=True)
class Exact(Real):
    value: Fraction

    def enclose(self, prec):
        return Interval(self.value)

    @property
    def exact(self):
        return self.value

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Power(Real):
    base: Fraction
    exp: Fraction
    coeff: Fraction = _ONE

    def enclose(self, prec):
        lo, hi = _root_bracket(self.base, self.exp, prec)
        if self.coeff >= 0:
            return Interval(self.coeff * lo, self.coeff * hi)
        return Interval(self.coeff * hi, self.coeff * lo)

    def __str__(self):
        s = f"{self.base}^({self.exp})"
        return s if self.coeff == 1 else f"{self.coeff}*{s}"


@dataclass(frozen=True)
class Log(Real):
    arg: Fraction
    coeff: Fraction = _ONE

    def enclose(self, prec):
        iv = _log_bracket(self.arg, self.arg, prec)
        if self.coeff >= 0:
            return Interval(self.coeff * iv.lo, self.coeff * iv.hi)
        return Interval(self.coeff * iv.hi, self.coeff * iv.lo)

    def __str__(self):
        s = f"log({self.arg})"
        return s if self.coeff == 1 else f"{self.coeff}*{s}"


@dataclass(frozen=True)
class Op(Real):
    name: str
    args: tuple

    def enclose(self, prec):
        p = prec + 8
        if self.name == "add":
            return self.args[0].enclose(p) + self.args[1].enclose(p)
        if self.name == "neg":
            return -self.args[0].enclose(prec)
        if self.name == "mul":
            return self.args[0].enclose(p) * self.args[1].enclose(p)
        if self.name == "div":
            return self.args[0].enclose(p) / self.args[1].enclose(p)
        if self.name == "log":
            iv = self.args[0].enclose(p)
            if iv.lo <= 0:
                iv = self.args[0].enclose(4 * p)
                if iv.lo <= 0:
                    raise DomainError("log of a value not certified positive")
            return _log_bracket(iv.lo, iv.hi, prec)
        if self.name == "pow":
            iv = self.args[0].enclose(p)
            e = self.args[1]
            if iv.lo < 0:
                raise DomainError("fractional power of a value not certified non-negative")
            lo = _root_bracket(iv.lo, e, p)[0] if iv.lo > 0 else _ZERO
            hi = _root_bracket(iv.hi, e, p)[1] if iv.hi > 0 else _ZERO
            return Interval(lo, hi) if e > 0 else Interval(hi, lo)
        raise ValueError(f"unknown operation {self.name}")

    def __str__(self):
        return f"{self.name}({', '.join(map(str, self.args))})"


def to_real(x) -> Real:
    if isinstance(x, Real):
        return x
    if isinstance(x, (int, Fraction)):
        return Exact(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Real")


ZERO = Exact(_ZERO)
ONE = Exact(_ONE)


# --------------------------------------------------------------------------
# enclosure kernels


def _root_bracket(base: Fraction, exp: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Rigorous bracket of base**exp (base > 0) with relative width ~2**-prec."""
    base = _frac(base)
    exp = _frac(exp)
    if base == 0:
        return _ZERO, _ZERO
    a, b = exp.numerator, exp.denominator
    if a < 0:
        base, a = 1 / base, -a
    num, den = base.numerator ** a, base.denominator ** a
    if b == 1:
        v = Fraction(num, den)
        return v, v
    m = num * den ** (b - 1)
    s = max(0, prec + 2 - m.bit_length() // b)
    r, is_exact = gmpy2.iroot(gmpy2.mpz(m) << (b * s), b)
    r = int(r)
    scale = den << s
    if is_exact:
        v = Fraction(r, scale)
        return v, v
    return Fraction(r, scale), Fraction(r + 1, scale)


def _to_fraction(v: mpmath.mpf) -> Fraction:
    sgn, man, exp, _ = v._mpf_
    man = -int(man) if sgn else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def _mp_log(x: Fraction, prec: int) -> Fraction:
    with mpmath.workprec(prec + 32):
        v = mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
    return _to_fraction(v)


def _log_bracket(lo: Fraction, hi: Fraction, prec: int) -> Interval:
    if lo <= 0:
        raise DomainError("log of non-positive value")
    if lo == 1 and hi == 1:
        return Interval(0)
    vlo = _mp_log(lo, prec)
    vhi = vlo if hi == lo else _mp_log(hi, prec)
    rlo = Fraction(int(abs(vlo)) + 2, 1 << prec)
    rhi = Fraction(int(abs(vhi)) + 2, 1 << prec)
    return Interval(vlo - rlo, vhi + rhi)


# --------------------------------------------------------------------------
# constructors with exact simplification


def power(base, exp, coeff=_ONE) -> Real:
    base, exp, coeff = _frac(base), _frac(exp), _frac(coeff)
    if base < 0:
        raise DomainError("fractional power of a negative number")
    if coeff == 0:
        return ZERO
    if base == 0:
        if exp <= 0:
            raise DomainError("0 raised to a non-positive power")
        return ZERO
    if exp == 0 or base == 1:
        return Exact(coeff)
    if exp.denominator == 1:
        return Exact(coeff * base ** exp.numerator)
    lo, hi = _root_bracket(base, exp, 0)
    if lo == hi:
        return Exact(coeff * lo)
    return Power(base, exp, coeff)


def log(x) -> Real:
    x = to_real(x)
    if isinstance(x, Exact):
        if x.value <= 0:
            raise DomainError("log of non-positive value")
        return _scaled_log(x.value, _ONE)
    return Op("log", (x,))


@functools.lru_cache(maxsize=4096)
def _perfect_power(n: int) -> tuple[int, int]:
    """(b, e) with n = b^e and e maximal, for n >= 2."""
    if n < 4 or not gmpy2.is_power(n):
        return n, 1
    e = 2
    while (1 << e) <= n:
        r, exact = gmpy2.iroot(n, e)
        if exact:
            b, e2 = _perfect_power(int(r))
            return b, e * e2
        e += 1
    return n, 1


def neg(a: Real) -> Real:
    if isinstance(a, Exact):
        return Exact(-a.value)
    if isinstance(a, Power):
        return Power(a.base, a.exp, -a.coeff)
    if isinstance(a, Log):
        return Log(a.arg, -a.coeff)
    if isinstance(a, Op) and a.name == "neg":
        return a.args[0]
    return Op("neg", (a,))


def add(a: Real, b: Real) -> Real:
    a, b = to_real(a), to_real(b)
    if isinstance(a, Exact) and a.value == 0:
        return b
    if isinstance(b, Exact) and b.value == 0:
        return a
    if isinstance(a, Exact) and isinstance(b, Exact):
        return Exact(a.value + b.value)
    if isinstance(a, Power) and isinstance(b, Power) and (a.base, a.exp) == (b.base, b.exp):
        return power(a.base, a.exp, a.coeff + b.coeff)
    if isinstance(a, Log) and isinstance(b, Log):
        if a.coeff == b.coeff:
            return _scaled_log(a.arg * b.arg, a.coeff)
        if a.arg == b.arg:
            return _scaled_log(a.arg, a.coeff + b.coeff)
    return Op("add", (a, b))


def _scaled_log(arg: Fraction, coeff: Fraction) -> Real:
    """coeff * log(arg), with integer perfect powers folded into the coefficient."""
    if coeff == 0 or arg == 1:
        return ZERO
    if arg.denominator == 1 and arg > 1 and arg.numerator.bit_length() <= 1 << 14:
        b, e = _perfect_power(arg.numerator)
        return Log(Fraction(b), coeff * e)
    return Log(arg, coeff)


def mul(a: Real, b: Real) -> Real:
    a, b = to_real(a), to_real(b)
    if isinstance(b, Exact) and not isinstance(a, Exact):
        a, b = b, a
    if isinstance(a, Exact):
        c = a.value
        if c == 0:
            return ZERO
        if isinstance(b, Exact):
            return Exact(c * b.value)
        if isinstance(b, Power):
            return Power(b.base, b.exp, c * b.coeff)
        if isinstance(b, Log):
            return Log(b.arg, c * b.coeff)
        if c == 1:
            return b
    if isinstance(a, Power) and isinstance(b, Power) and a.exp == b.exp:
        return power(a.base * b.base, a.exp, a.coeff * b.coeff)
    return Op("mul", (a, b))


def div(a: Real, b: Real) -> Real:
    a, b = to_real(a), to_real(b)
    if isinstance(b, Exact):
        if b.value == 0:
            raise ZeroDivisionError("division by exact zero")
        return mul(Exact(1 / b.value), a)
    if a == b:
        return ONE
    if isinstance(a, Power) and isinstance(b, Power) and a.exp == b.exp:
        return power(a.base / b.base, a.exp, a.coeff / b.coeff)
    if isinstance(a, Log) and isinstance(b, Log) and a.arg == b.arg:
        return Exact(a.coeff / b.coeff)
    return Op("div", (a, b))


def pow_real(a, e) -> Real:
    a, e = to_real(a), _frac(e)
    if e == 1:
        return a
    if isinstance(a, Exact):
        return power(a.value, e)
    if isinstance(a, Power) and a.coeff > 0:
        inner = power(a.base, a.exp * e)
        scale = power(a.coeff, e)
        if isinstance(scale, Exact):
            return mul(scale, inner)
    if isinstance(a, Op) and a.name == "mul" and a.args[0] == a.args[1] and e == Fraction(1, 2):
        if sign(a.args[0]) >= 0:
            return a.args[0]
    if e.denominator == 1 and e > 0:
        out = a
        for _ in range(e.numerator - 1):
            out = mul(out, a)
        return out
    return Op("pow", (a, e))


def sqrt(a) -> Real:
    return pow_real(a, Fraction(1, 2))


def sign(a: Real) -> int:
    a = to_real(a)
    if isinstance(a, Exact):
        return (a.value > 0) - (a.value < 0)
    if isinstance(a, Power):
        return (a.coeff > 0) - (a.coeff < 0)
    if isinstance(a, Log):
        s = (a.coeff > 0) - (a.coeff < 0)
        return s if a.arg > 1 else -s
    return compare(a, ZERO)


def floor_real(a) -> int:
    a = to_real(a)
    if isinstance(a, Exact):
        return floor(a.value)
    for iv in _refinements(a):
        lo, hi = floor(iv.lo), floor(iv.hi)
        if lo == hi:
            return lo
    raise PrecisionError(f"floor undecided for {a}")


def ceil_real(a) -> int:
    a = to_real(a)
    if isinstance(a, Exact):
        return ceil(a.value)
    for iv in _refinements(a):
        lo, hi = ceil(iv.lo), ceil(iv.hi)
        if lo == hi:
            return lo
    raise PrecisionError(f"ceil undecided for {a}")


def _refinements(a: Real):
    s = settings()
    p = s.precision_bits
    while p <= s.precision_cap:
        yield a.enclose(p)
        p *= 2


# --------------------------------------------------------------------------
# comparison


_EXACT_BITS_LIMIT = 1 << 22


def _monomial(a: Real):
    """(coeff, base, exp) view of Exact/Power values."""
    if isinstance(a, Exact):
        return a.value, _ONE, _ZERO
    if isinstance(a, Power):
        return a.coeff, a.base, a.exp
    return None


def _cmp_positive_monomials(c1, b1, e1, c2, b2, e2):
    q = e1.denominator * e2.denominator // gcd(e1.denominator, e2.denominator)
    n1, n2 = int(e1 * q), int(e2 * q)
    size = q * (c1.numerator.bit_length() + c1.denominator.bit_length() + c2.numerator.bit_length()
                + c2.denominator.bit_length()) + abs(n1) * (b1.numerator.bit_length() + b1.denominator.bit_length()) \
        + abs(n2) * (b2.numerator.bit_length() + b2.denominator.bit_length())
    if size > _EXACT_BITS_LIMIT:
        return None
    lhs = c1 ** q * b1 ** n1
    rhs = c2 ** q * b2 ** n2
    return (lhs > rhs) - (lhs < rhs)


def _exact_compare(a: Real, b: Real):
    sa = _known_sign(a)
    sb = _known_sign(b)
    if sa is not None and sb is not None and (sa != sb or sa == 0):
        return (sa > sb) - (sa < sb)
    ma, mb = _monomial(a), _monomial(b)
    if ma is not None and mb is not None:
        if ma[0] > 0 and mb[0] > 0:
            return _cmp_positive_monomials(*ma, *mb)
        if ma[0] < 0 and mb[0] < 0:
            r = _cmp_positive_monomials(-ma[0], ma[1], ma[2], -mb[0], mb[1], mb[2])
            return None if r is None else -r
        return None
    if isinstance(a, Log) and isinstance(b, Log):
        # c1 ln r1 vs c2 ln r2  <=>  r1**c1 vs r2**c2
        r1, c1, r2, c2 = a.arg, a.coeff, b.arg, b.coeff
        if c1 < 0:
            r1, c1 = 1 / r1, -c1
        if c2 < 0:
            r2, c2 = 1 / r2, -c2
        return _cmp_positive_monomials(_ONE, r1, c1, _ONE, r2, c2)
    if a == b:
        return 0
    return None


def _known_sign(a: Real):
    if isinstance(a, (Exact, Power, Log)):
        return sign(a)
    return None


def compare(a, b) -> int:
    """Certified three-way comparison; raises PrecisionError at the cap."""
    a, b = to_real(a), to_real(b)
    r = _exact_compare(a, b)
    if r is not None:
        return r
    s = settings()
    p = s.precision_bits
    while p <= s.precision_cap:
        ia, ib = a.enclose(p), b.enclose(p)
        if ia.hi < ib.lo:
            return -1
        if ia.lo > ib.hi:
            return 1
        if ia.is_exact and ib.is_exact:
            return 0
        p *= 2
    raise PrecisionError(f"cannot separate {a} and {b} within {s.precision_cap} bits")


def lt(a, b) -> bool:
    return compare(a, b) < 0


def le(a, b) -> bool:
    return compare(a, b) <= 0


def max_real(*values) -> Real:
    best = to_real(values[0])
    for v in values[1:]:
        v = to_real(v)
        if compare(v, best) > 0:
            best = v
    return best


def min_real(*values) -> Real:
    best = to_real(values[0])
    for v in values[1:]:
        v = to_real(v)
        if compare(v, best) < 0:
            best = v
    return best


def enclose(x, prec: int | None = None) -> Interval:
    return to_real(x).enclose(prec or settings().precision_bits)


def decimal_str(x, digits: int = 17) -> str:
    """Deterministic decimal rendering of a value (midpoint of an enclosure)."""
    if isinstance(x, Interval):
        v = x.mid
    else:
        x = to_real(x)
        v = x.exact if x.exact is not None else x.enclose(4 * digits + 16).mid
    with mpmath.workprec(4 * digits + 32):
        return mpmath.nstr(mpmath.mpf(v.numerator) / v.denominator, digits)


def frac_str(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        if "e" in text.lower() and "/" not in text:
            return Fraction(int(float(text))) if float(text).is_integer() else Fraction(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not an exact rational: {text!r}") from exc
