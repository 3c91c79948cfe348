"""Finite-checkpoint evidence for the weighted modulus density, and the
block decomposition where f(g(n)) doubles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import certified as C
from .config import settings
from .errors import DomainError, MagnitudeCapError
from .funcs import ModulusFn, WeightFn, monotone_envelope
from .nset import NSet

NULL = "null-at-scale"
POSITIVE = "positive-at-scale"
INDETERMINATE = "indeterminate"


@dataclass
class TrajectoryPoint:
    n: int
    count: int
    f_count: C.Real
    f_g: C.Real
    ratio: C.Real
    enclosure: C.Interval

    @property
    def exact(self):
        return self.ratio.exact


@dataclass
class DensityTrajectory:
    set_id: str
    f_id: str
    g_id: str
    points: list
    skipped: list = field(default_factory=list)   # checkpoints with f(g(n)) = 0

    @property
    def checkpoints(self):
        return [p.n for p in self.points]

    @property
    def values(self):
        return [p.ratio for p in self.points]

    def final(self):
        return self.points[-1] if self.points else None

    def csv_rows(self):
        yield ["n", "count", "f_count", "f_g", "ratio", "err_radius"]
        for p in self.points:
            yield [str(p.n), str(p.count), C.decimal_str(p.f_count), C.decimal_str(p.f_g),
                   C.decimal_str(p.ratio), _radius_str(p.enclosure)]


def _radius_str(iv: C.Interval) -> str:
    return "0" if iv.is_exact else C.decimal_str(C.Exact(iv.radius), 3)


def ratio_point(count: int, n: int, f: ModulusFn, g: WeightFn, prec: int | None = None):
    fc = f(count)
    fg = f(g(n))
    if C.sign(fg) == 0:
        return None
    ratio = C.div(fc, fg)
    return TrajectoryPoint(n, count, fc, fg, ratio, ratio.enclose(prec or settings().precision_bits))


def trajectory(A: NSet, f: ModulusFn, g: WeightFn, checkpoints) -> DensityTrajectory:
    checkpoints = list(checkpoints)
    if any(n < 1 for n in checkpoints):
        raise DomainError("checkpoints must be >= 1")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise DomainError("checkpoints must be strictly increasing")
    pts, skipped = [], []
    for n in checkpoints:
        p = ratio_point(A.count(n), n, f, g)
        if p is None:
            skipped.append(n)
        else:
            pts.append(p)
    return DensityTrajectory(A.to_dsl(), f.id, g.id, pts, skipped)


@dataclass
class DensityVerdict:
    verdict: str
    window: list            # checkpoints in the final window
    upper: Fraction         # max certified upper bound over the window
    lower: Fraction         # min certified lower bound over the window
    trajectory: DensityTrajectory

    def describe(self):
        return (f"{self.verdict} (window n={_short(self.window[0])}..{_short(self.window[-1])}, "
                f"ratio in [{C.decimal_str(C.Exact(self.lower), 6)}, {C.decimal_str(C.Exact(self.upper), 6)}])")


def _short(n: int) -> str:
    return str(n) if n < 10 ** 12 else C.decimal_str(C.Exact(Fraction(n)), 6)


def verdict(traj: DensityTrajectory, window_fraction=None, tolerance=None, threshold=None) -> DensityVerdict:
    s = settings()
    wf = s.window_fraction if window_fraction is None else window_fraction
    tol = Fraction(s.null_tolerance if tolerance is None else tolerance).limit_denominator(10 ** 9)
    thr = Fraction(s.positive_threshold if threshold is None else threshold).limit_denominator(10 ** 9)
    if not traj.points:
        raise DomainError("empty trajectory")
    size = max(1, math.ceil(wf * len(traj.points)))
    window = traj.points[-size:]
    upper = max(p.enclosure.hi for p in window)
    lower = min(p.enclosure.lo for p in window)
    if upper < tol:
        v = NULL
    elif lower > thr:
        v = POSITIVE
    else:
        v = INDETERMINATE
    return DensityVerdict(v, [p.n for p in window], upper, lower, traj)


# --------------------------------------------------------------------------
# checkpoint schedules


def geometric(lo: int, hi: int, ratio: int = 2) -> list[int]:
    out, n = [], max(lo, 1)
    while n < hi:
        out.append(n)
        n *= ratio
    out.append(hi)
    return out


def parse_checkpoints(text: str) -> list[int]:
    """``geo:1e1..1e6[:r]``, ``pow2:a..b`` (exponents) or a comma list."""
    text = text.strip()

    def num(s):
        s = s.strip()
        if "^" in s:
            b, e = s.split("^")
            return int(b) ** int(e)
        return int(Fraction(s)) if "e" not in s.lower() else int(float(s)) if float(s) < 2 ** 53 else int(Fraction(s))

    if text.startswith("geo:"):
        body = text[4:]
        ratio = 2
        if body.count(":") == 1:
            body, r = body.split(":")
            ratio = int(r)
        a, b = body.split("..")
        return geometric(num(a), num(b), ratio)
    if text.startswith("pow2:"):
        a, b = text[5:].split("..")
        return [1 << e for e in range(int(a), int(b) + 1)]
    pts = sorted({num(t) for t in text.split(",") if t.strip()})
    return pts


# --------------------------------------------------------------------------
# blocks


@dataclass
class BlockDecomposition:
    f: ModulusFn
    g: WeightFn
    starts: list            # n_0 = 1 < n_1 < ... < n_K
    fg: list                # f(g(n_k)) (through the monotone envelope if g is not monotone)
    via_envelope: bool = False
    capped: bool = False    # True when the magnitude cap stopped the construction early

    @property
    def K(self):
        return len(self.starts) - 1

    def block(self, k):
        return self.starts[k], self.starts[k + 1] - 1

    def measure(self, A: NSet, k: int) -> C.Real:
        return block_measure(A, self, k)

    def block_of(self, n):
        import bisect
        k = bisect.bisect_right(self.starts, n) - 1
        return k if 0 <= k < self.K else None

    def csv_rows(self):
        yield ["k", "n_k", "f_g", "tallness"]
        for k, (n, v) in enumerate(zip(self.starts, self.fg)):
            yield [str(k), str(n), C.decimal_str(v), C.decimal_str(C.div(self.f(1), v))]


def block_decomposition(f: ModulusFn, g: WeightFn, K: int, strict_cap: bool = False) -> BlockDecomposition:
    """n_0 = 1, n_{k+1} = min{n : f(g(n)) >= 2 f(g(n_k))}.

    With ``strict_cap`` the magnitude cap raises; otherwise the decomposition
    is returned with ``capped=True`` and fewer than K blocks.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    h_g = g if g.monotone else monotone_envelope(g)

    def h(n):
        return f(h_g(n))

    cap = settings().magnitude_cap_bits
    starts, fg = [1], [h(1)]
    if C.sign(fg[0]) <= 0:
        raise DomainError(f"f(g(1)) = 0 for ({f.id}, {g.id}); blocks undefined")
    capped = False
    while len(starts) <= K:
        nk = starts[-1]
        T = C.mul(C.Exact(Fraction(2)), fg[-1])
        lo, step = nk, 1
        hi = nk + step
        try:
            while C.compare(h(hi), T) < 0:
                lo = hi
                step *= 2
                hi = nk + step
                if hi.bit_length() > cap:
                    raise MagnitudeCapError(f"block start beyond 2^{cap}", produced=starts)
        except MagnitudeCapError:
            if strict_cap:
                raise
            capped = True
            break
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if C.compare(h(mid), T) >= 0:
                hi = mid
            else:
                lo = mid
        # minimality: the predecessor must miss the threshold
        assert hi - 1 == nk or C.compare(h(hi - 1), T) < 0
        starts.append(hi)
        fg.append(h(hi))
    return BlockDecomposition(f, g, starts, fg, via_envelope=not g.monotone, capped=capped)


def block_measure(A: NSet, D: BlockDecomposition, k: int) -> C.Real:
    """mu_k(A) = f(|A ∩ [n_k, n_{k+1})|) / f(g(n_k))."""
    if not 0 <= k < D.K:
        raise DomainError(f"block index {k} outside 0..{D.K - 1}")
    lo, hi = D.block(k)
    return C.div(D.f(A.count_range(lo, hi)), D.fg[k])


@dataclass
class TallnessReport:
    values: list            # f(1)/f(g(n_k))
    decomposition: BlockDecomposition
    tolerance: Fraction
    first_below: int | None  # first k with value < tolerance

    @property
    def reached(self):
        return self.first_below is not None


def tallness_evidence(f: ModulusFn, g: WeightFn, K: int, tolerance=Fraction(1, 1000)) -> TallnessReport:
    D = block_decomposition(f, g, K)
    one = f(1)
    values = [C.div(one, v) for v in D.fg]
    first = next((k for k, v in enumerate(values) if C.compare(v, tolerance) < 0), None)
    return TallnessReport(values, D, Fraction(tolerance), first)
