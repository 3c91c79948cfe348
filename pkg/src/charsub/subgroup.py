"""Statistical convergence of (a_n x) and verifiable membership certificates.

Every certificate records what was checked exactly (norm bands at each
index up to N) separately from the at-scale density evidence attached to
its witness set.  ``verify_certificate`` replays a serialized certificate
through an independent route: per-index tail evaluation (or the modular
oracle for rationals) instead of the sliding windows used to build it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import certified as C
from .certified import Interval, norm_of_interval
from .circle import (ArithSeq, CircleElem, RationalElem, RuleElem, SumElem, frac_eval, frac_scan,
                     from_support, parse_element, parse_seq, support, support_set, default_depth)
from .config import settings
from .density import (NULL, POSITIVE, INDETERMINATE, DensityTrajectory, block_decomposition,
                      geometric, trajectory, verdict)
from .errors import (CapabilityError, CertificateInvalid, DomainError, StructureError)
from .funcs import ModulusFn, WeightFn, modulus, weight
from .nset import (Finite, NSet, IntervalFamily, complement, interval, parse_nset, shift, shifts,
                   union)

MEMBER = "member-at-scale"
NONMEMBER = "non-member-evidence"

HEADER = "charsub-certificate v1"


# --------------------------------------------------------------------------
# exception sets


@dataclass
class ExceptionSet:
    eps: Fraction
    N: int
    members: NSet
    indeterminate: list
    mode: str


def _depth_for(eps: Fraction) -> int:
    """Least K with 2^-K < eps."""
    K = 1
    while Fraction(1, 1 << K) >= eps:
        K += 1
    return K


def _tail_eval(x: CircleElem, seq: ArithSeq, n: int, K: int):
    """{a_n x} enclosed as (interval, lo_open, hi_open).

    A rational is an exact point.  A rule element's tail beyond digit n + K
    is 0 if no support digit follows and maximal if every later digit is
    q - 1; otherwise it is > 0 when a later support digit is nonzero and
    below its maximum when a later digit is below q - 1.  Bounds of a sum add.
    """
    if isinstance(x, RationalElem):
        return Interval(x.frac_exact(seq, n)), False, False
    if isinstance(x, SumElem):
        a, lo_a, hi_a = _tail_eval(x.left, seq, n, K)
        b, lo_b, hi_b = _tail_eval(x.right, seq, n, K)
        iv = a + b
        if iv.lo >= 1:
            iv = iv - 1
        return iv, lo_a or lo_b, hi_a or hi_b
    iv = frac_eval(x, seq, n, K)
    if not isinstance(x, RuleElem):
        return iv, False, False
    m = n + K + 1
    S = x.support_set
    nxt = S.next_member(m)
    if nxt is None:
        return Interval(iv.lo), False, False
    positive = x.digit(seq, nxt) > 0
    below = complement(S).next_member(m) is not None or x.digit(seq, nxt) < seq.q(nxt) - 1
    if not below:
        return Interval(iv.hi), False, False
    return iv, positive, below


def _decide(iv: Interval, eps: Fraction, lo_open=False, hi_open=False):
    """Is ||v|| >= eps, i.e. v ∈ [eps, 1 - eps], for every v in iv?  None if iv straddles."""
    lo, hi = iv.lo, iv.hi
    if lo >= eps and hi <= 1 - eps:
        return True
    if hi < eps or (hi == eps and hi_open) or lo > 1 - eps or (lo == 1 - eps and lo_open):
        return False
    return None


def classify(x: CircleElem, seq: ArithSeq, n: int, eps: Fraction, K0: int | None = None):
    """True if ||a_n x|| >= eps, False if < eps, None if undecided at the digit cap."""
    if isinstance(x, RationalElem):
        v = x.frac_exact(seq, n)
        return min(v, 1 - v) >= eps
    K = K0 or default_depth()
    while True:
        iv, lo_open, hi_open = _tail_eval(x, seq, n, K)
        r = _decide(iv, eps, lo_open, hi_open)
        if r is not None:
            return r
        if K * 2 > settings().digit_cap:
            return None
        K *= 2


def _sparse_eligible(x: CircleElem) -> bool:
    if isinstance(x, RationalElem):
        return x.value == 0
    return isinstance(x, RuleElem) and x.rule == "max"


def exception_set(x: CircleElem, seq: ArithSeq, eps, N: int, mode: str = "auto") -> ExceptionSet:
    """E_eps ∩ [1, N] = {n <= N : ||a_n x|| >= eps}.

    ``sparse`` mode (max-rule and zero elements) only inspects indices within
    K digits before a change of membership in the support, with 2^-K < eps:
    elsewhere the next K digits are constant (all 0 or all q-1), which pins
    {a_n x} within 2^-K of an integer.
    """
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise DomainError("eps must lie in (0, 1/2)")
    if N < 1:
        raise DomainError("N must be >= 1")
    use_sparse = mode == "sparse" or (mode == "auto" and _sparse_eligible(x) and not isinstance(x, RationalElem))
    if use_sparse:
        if not _sparse_eligible(x):
            raise CapabilityError("sparse exception sets need a max-rule or zero element")
        return _sparse_exception_set(x, seq, eps, N)
    if N > settings().dense_cap:
        raise CapabilityError(f"index-by-index scan up to {N} exceeds dense cap {settings().dense_cap}")
    members, undecided = [], []
    if isinstance(x, RationalElem):
        for n in range(1, N + 1):
            if classify(x, seq, n, eps):
                members.append(n)
    else:
        for n, iv in frac_scan(x, seq, 1, N):
            nv = norm_of_interval(iv)
            if nv.lo >= eps:
                members.append(n)
            elif nv.hi >= eps:
                r = classify(x, seq, n, eps, 2 * default_depth())
                if r is None:
                    undecided.append(n)
                elif r:
                    members.append(n)
    return ExceptionSet(eps, N, Finite(members), undecided, "dense")


def _sparse_exception_set(x, seq, eps, N):
    if isinstance(x, RationalElem):
        return ExceptionSet(eps, N, Finite(()), [], "sparse")
    K = _depth_for(eps)
    cands = set()
    for a, b in x.support_set.runs(1, N + K):
        for j in (a, b + 1):
            if j >= 3:
                cands.update(range(max(1, j - K), min(N, j - 2) + 1))
    members, undecided = [], []
    for n in sorted(cands):
        r = classify(x, seq, n, eps)
        if r is None:
            undecided.append(n)
        elif r:
            members.append(n)
    return ExceptionSet(eps, N, Finite(members), undecided, "sparse")


# --------------------------------------------------------------------------
# convergence reports


@dataclass
class ConvergenceEntry:
    eps: Fraction
    exceptions: ExceptionSet
    trajectory: DensityTrajectory
    verdict: object


@dataclass
class ConvergenceReport:
    element: str
    seq: str
    f: str
    g: str
    N: int
    entries: list
    overall: str

    def lines(self):
        n_text = str(self.N) if self.N < 10 ** 12 else f"{C.decimal_str(C.Exact(Fraction(self.N)), 6)} (2^{self.N.bit_length() - 1} <= N)"
        out = [f"element: {self.element}", f"seq: {self.seq}", f"f: {self.f}", f"g: {self.g}",
               f"N: {n_text}"]
        for e in self.entries:
            E = e.exceptions
            out.append(f"eps {C.frac_str(e.eps)}: |E| = {E.members.count(self.N)} ({E.mode}), "
                       f"undecided {len(E.indeterminate)}, {e.verdict.describe()}")
        out.append(f"overall: {self.overall}")
        return out


def default_checkpoints(N: int) -> list[int]:
    """Powers of 2 up to N, thinned to at most about 256 points for huge N."""
    if N <= 2:
        return [N]
    step = max(1, -(-N.bit_length() // 256))
    return geometric(2, N, 1 << step)


def convergence_report(x, seq, f: ModulusFn, g: WeightFn, eps_list, N: int,
                       checkpoints=None, mode: str = "auto") -> ConvergenceReport:
    if not eps_list:
        raise DomainError("at least one eps is required")
    cps = list(checkpoints) if checkpoints else default_checkpoints(N)
    entries = []
    for eps in sorted((Fraction(e) for e in eps_list), reverse=True):
        E = exception_set(x, seq, eps, N, mode)
        tr = trajectory(E.members, f, g, cps)
        entries.append(ConvergenceEntry(eps, E, tr, verdict(tr)))
    verdicts = [e.verdict.verdict for e in entries]
    if any(e.exceptions.indeterminate for e in entries):
        overall = INDETERMINATE
    elif all(v == NULL for v in verdicts):
        overall = MEMBER
    elif any(v == POSITIVE for v in verdicts):
        overall = NONMEMBER
    else:
        overall = INDETERMINATE
    return ConvergenceReport(x.to_dsl(), seq.text, f.id, g.id, N, entries, overall)


# --------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    kind: str
    seq: str
    element: str
    f: str
    g: str
    N: int
    witness: str
    band: tuple | None = None          # exact (lo, hi)
    bound: Fraction | None = None
    params: dict = field(default_factory=dict)
    checkpoints: list = field(default_factory=list)
    density_verdict: str = ""
    checked: int = 0
    notes: list = field(default_factory=list)

    def serialize(self) -> str:
        lines = [HEADER, f"kind: {self.kind}", f"seq: {self.seq}", f"element: {self.element}",
                 f"f: {self.f}", f"g: {self.g}", f"N: {self.N}", f"witness: {self.witness}"]
        lines.append("band: " + ("none" if self.band is None else
                                 f"{C.frac_str(self.band[0])} {C.frac_str(self.band[1])}"))
        lines.append("bound: " + ("none" if self.bound is None else C.frac_str(self.bound)))
        for key in sorted(self.params):
            v = self.params[key]
            lines.append(f"param.{key}: {C.frac_str(v) if isinstance(v, Fraction) else v}")
        lines.append("checkpoints: " + ",".join(map(str, self.checkpoints)))
        lines.append(f"density_verdict: {self.density_verdict}")
        lines.append(f"checked: {self.checked}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def same_claims(self, other: "Certificate") -> bool:
        keys = ("kind", "seq", "element", "f", "g", "N", "witness", "band", "bound", "params",
                "checkpoints", "density_verdict", "checked")
        return all(getattr(self, k) == getattr(other, k) for k in keys)


def _frac(text):
    return Fraction(text)


def parse_certificate(text: str) -> Certificate:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise CertificateInvalid(f"missing header {HEADER!r}")
    fields_, params, notes = {}, {}, []
    for line in lines[1:]:
        if not line.strip():
            continue
        key, _, value = line.partition(": ")
        if key == "note":
            notes.append(value)
        elif key.startswith("param."):
            params[key[6:]] = _parse_param(value)
        else:
            fields_[key] = value
    try:
        band = None if fields_["band"] == "none" else tuple(map(_frac, fields_["band"].split()))
        bound = None if fields_["bound"] == "none" else _frac(fields_["bound"])
        cps = [int(t) for t in fields_["checkpoints"].split(",") if t]
        return Certificate(fields_["kind"], fields_["seq"], fields_["element"], fields_["f"],
                           fields_["g"], int(fields_["N"]), fields_["witness"], band, bound, params,
                           cps, fields_["density_verdict"], int(fields_["checked"]), notes)
    except KeyError as exc:
        raise CertificateInvalid(f"certificate lacks field {exc}") from exc


def _parse_param(value):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        return value


def _density(witness: NSet, f, g, cps):
    tr = trajectory(witness, f, g, cps)
    return tr, verdict(tr)


# --- membership by support


def membership_by_support(x: CircleElem, seq: ArithSeq, f: ModulusFn, g: WeightFn, k: int, N: int,
                          checkpoints=None, notes=()) -> Certificate:
    """Off A* = ⋃_{i<=k} (supp - i), digits n+1..n+k vanish, so
    ||a_n x|| <= a_n / a_{n+k} <= 2^-k < 1/k."""
    if k < 1:
        raise DomainError("k must be >= 1")
    supp = support_set(x, seq, N + k)
    A_star = shifts(supp, k)
    checked = _check_support_chain(x, seq, A_star, k, N, fast=True)
    cps = list(checkpoints) if checkpoints else default_checkpoints(N)
    _, v = _density(A_star, f, g, cps)
    return Certificate("membership-by-support", seq.text, x.to_dsl(), f.id, g.id, N, A_star.to_dsl(),
                       None, Fraction(1, 1 << k), {"k": k}, cps, v.verdict, checked, list(notes))


def _check_support_chain(x, seq, A_star, k, N, fast):
    bound = Fraction(1, 1 << k)
    if not bound < Fraction(1, k):
        raise CertificateInvalid(f"2^-{k} is not below 1/{k}")
    checked = 0
    for a, b in complement(A_star).runs(1, N):
        for n in range(a, b + 1):
            iv = frac_eval(x, seq, n, k)
            t = seq.ratio(n, n + k)
            if iv.lo != 0 or iv.width != t or norm_of_interval(iv).hi > t or t > bound:
                raise CertificateInvalid(f"index {n}: ||a_n x|| not certified <= a_n/a_(n+k)", n)
            checked += 1
    return checked


# --- membership by structure (interval supports)


def lemma39_witness(seq: ArithSeq, F: IntervalFamily, m: int, N: int, f: ModulusFn | None = None,
                    g: WeightFn | None = None, K: int | None = None, checkpoints=None):
    """x with digits q_n - 1 on the blocks of F; off the exceptional set
    A = ⋃_{i<=m} {n_r - i : r >= r0} ∪ [1, n_{r0}] every norm is <= 2^-m."""
    f = f or modulus("x")
    g = g or weight("n")
    K = max(K or default_depth(), m)
    x = from_support(seq, F.blocks(), "max")
    r0 = 1
    while F.n(r0) <= m:
        r0 += 1
    A = union(shifts(F.endpoints_from(r0), m), interval(1, F.n(r0)))
    counts = _check_structure(x, seq, A, m, N, K, fast=True)
    cps = list(checkpoints) if checkpoints else default_checkpoints(N)
    _, ev = _density(F.endpoints(), f, g, cps)
    notes = [f"case (a) block indices: {counts['a']}", f"case (b) gap indices: {counts['b']}",
             f"endpoint sequence density: {ev.verdict}"]
    if ev.verdict != NULL:
        notes.append("warning: the endpoint sequence is not null-at-scale")
    _, v = _density(A, f, g, cps)
    cert = Certificate("membership-by-structure", seq.text, x.to_dsl(), f.id, g.id, N, A.to_dsl(),
                       None, Fraction(1, 1 << m), {"m": m, "K": K, "r0": r0, "family": F.to_dsl()},
                       cps, v.verdict, counts["a"] + counts["b"], notes)
    return x, cert


def _check_structure(x, seq, A, m, N, K, fast):
    bound = Fraction(1, 1 << m)
    counts = {"a": 0, "b": 0}
    scan = frac_scan(x, seq, 1, N, K) if fast else ((n, frac_eval(x, seq, n, K)) for n in range(1, N + 1))
    for n, iv in scan:
        if A.contains(n):
            continue
        t = seq.ratio(n, n + m)
        head = frac_eval(x, seq, n, m)
        if x.digit(seq, n + 1):
            case, ok = "a", head.lo == 1 - t      # digits n+1..n+m all q-1
        else:
            case, ok = "b", head.lo == 0          # digits n+1..n+m all 0
        if not ok or t > bound or norm_of_interval(iv).hi > bound or iv.width > Fraction(1, 1 << min(K, 4096)):
            raise CertificateInvalid(f"index {n}: case ({case}) bound chain fails", n)
        counts[case] += 1
    return counts


# --- q-bounded non-membership


def _maximal_runs(S: NSet, hi: int):
    out = []
    for a, b in S.runs(1, hi):
        if out and a == out[-1][1] + 1:
            out[-1][1] = b
        else:
            out.append([a, b])
    return [tuple(r) for r in out]


def qbounded_nonmembership(x: CircleElem, seq: ArithSeq, f: ModulusFn, g: WeightFn, N: int,
                           checkpoints=None) -> Certificate:
    """B = {l_n - 2}: the digit before each run start is 0 and the run start
    digit is >= 1, so {a_n x} lies in [1/M^2, 1/2] on B."""
    if seq.bound is None:
        raise CapabilityError("sequence carries no bound M")
    M = seq.bound
    B = _qbounded_witness(x, seq, N)
    band = (Fraction(1, M * M), Fraction(1, 2))
    checked = _check_band(x, seq, B, band, N, fast=True)
    cps = list(checkpoints) if checkpoints else default_checkpoints(N)
    _, v = _density(B, f, g, cps)
    notes = ["density leg is at-scale evidence only (finite checkpoints)"]
    return Certificate("nonmembership-qbounded", seq.text, x.to_dsl(), f.id, g.id, N, B.to_dsl(),
                       band, None, {"M": M}, cps, v.verdict, checked, notes)


def _qbounded_witness(x, seq, N):
    runs = _maximal_runs(support(x, seq, N + 2), N + 2)
    if not runs:
        raise StructureError("support has no runs")
    for (l1, k1), (l2, _) in zip(runs, runs[1:]):
        if not l2 - 1 > k1:
            raise StructureError(f"runs ending at {k1} and starting at {l2} are not separated by a gap of 2")
    return Finite(l - 2 for l, _ in runs if 1 <= l - 2 <= N)


def _check_band(x, seq, B: NSet, band, N, fast):
    lo, hi = band
    checked = 0
    for n in B.members(1, N):
        if isinstance(x, RationalElem) and fast:
            v = x.frac_exact(seq, n)
            inside = lo <= v <= hi
        else:
            inside = _interval_inside(x, seq, n, lo, hi)
        if not inside:
            raise CertificateInvalid(f"index {n}: {{a_n x}} outside [{lo}, {hi}]", n)
        checked += 1
    return checked


def _interval_inside(x, seq, n, lo, hi):
    K = default_depth()
    while K <= settings().digit_cap:
        iv = frac_eval(x, seq, n, K)
        if lo <= iv.lo and iv.hi <= hi:
            return True
        if iv.hi < lo or iv.lo > hi:
            return False
        K *= 2
    return False


# --- ratio-band non-membership


def ratio_band_nonmembership(x: CircleElem, seq: ArithSeq, m1, m2, f: ModulusFn, g: WeightFn, N: int,
                             checkpoints=None) -> Certificate:
    """If c_n/q_n ∈ [m1, m2] on the support, then {a_n x} ∈ [m1, 2 m2] on
    B = {n - 1 : n ∈ supp}."""
    m1, m2 = Fraction(m1), Fraction(m2)
    if not 0 < m1 <= m2 < Fraction(1, 2):
        raise DomainError("need 0 < m1 <= m2 < 1/2")
    S = support(x, seq, N + 1)
    for n in S.members(1, N + 1):
        r = Fraction(x.digit(seq, n), seq.q(n))
        if not m1 <= r <= m2:
            raise DomainError(f"digit ratio c_{n}/q_{n} = {r} outside [{m1}, {m2}]")
    B = _ratio_band_witness(x, seq, N)
    band = (m1, 2 * m2)
    checked = _check_band(x, seq, B, band, N, fast=True)
    cps = list(checkpoints) if checkpoints else default_checkpoints(N)
    _, v = _density(B, f, g, cps)
    notes = ["density leg is at-scale evidence only (finite checkpoints)"]
    return Certificate("nonmembership-ratio-band", seq.text, x.to_dsl(), f.id, g.id, N, B.to_dsl(),
                       band, None, {"m1": m1, "m2": m2}, cps, v.verdict, checked, notes)


def _ratio_band_witness(x, seq, N):
    if isinstance(x, RuleElem):
        return shift(x.support_set, 1)
    return Finite(n - 1 for n in support(x, seq, N + 1).members(2, N + 1))


# --------------------------------------------------------------------------
# the dichotomy probe


@dataclass
class ProbeResult:
    verdict: str
    element: CircleElem | None
    certificate: Certificate | None
    note: str = ""


def corollary319_probe(seq: ArithSeq, B: NSet, f: ModulusFn, g: WeightFn, N: int, k: int = 5,
                       checkpoints=None) -> ProbeResult:
    cps = list(checkpoints) if checkpoints else default_checkpoints(N)
    _, v = _density(B, f, g, cps)
    if v.verdict == NULL:
        x = from_support(seq, B, "max")
        cert = membership_by_support(x, seq, f, g, k, N, cps)
        return ProbeResult(MEMBER, x, cert, "B is null-at-scale: membership certificate")
    if v.verdict == INDETERMINATE:
        return ProbeResult(INDETERMINATE, None, None, "density of B is indeterminate at this scale")
    qs = [seq.q(n) for n in B.members(1, N)]
    if qs and min(qs) >= 3:
        rule = "half" if all(2 * (q // 2) < q for q in qs) else "quarter"
        x = from_support(seq, B, rule)
        ratios = [Fraction(x.digit(seq, n), seq.q(n)) for n in B.members(1, N + 1)]
        cert = ratio_band_nonmembership(x, seq, min(ratios), max(ratios), f, g, N, cps)
        return ProbeResult(NONMEMBER, x, cert, f"B is positive-at-scale: {rule}-rule element")
    if seq.bound is not None:
        x = from_support(seq, B, "max")
        try:
            cert = qbounded_nonmembership(x, seq, f, g, N, cps)
            return ProbeResult(NONMEMBER, x, cert, "q-bounded sequence: run-structure certificate")
        except StructureError as exc:
            note = f"q_n = 2 on B and the run structure fails ({exc})"
            return ProbeResult(INDETERMINATE, None, None, "capability note: " + note)
    return ProbeResult(INDETERMINATE, None, None,
                       "capability note: q_n = 2 on B with an unbounded sequence; the half rule "
                       "gives c_n/q_n = 1/2 and no ratio band below 1/2 exists")


def thm313_witness(seq: ArithSeq, f: ModulusFn, g: WeightFn, blocks: int, N: int, k: int = 3,
                   checkpoints=None):
    """Half-rule element on one point per block with q_n >= 2^(k+1) in block k."""
    D = block_decomposition(f, g, blocks)
    picked = []
    for j in range(D.K):
        lo, hi = D.block(j)
        threshold = 1 << (j + 1)
        for n in range(lo, min(hi, N) + 1):
            if seq.q(n) >= threshold:
                picked.append(n)
                break
    B = Finite(picked)
    x = from_support(seq, B, "half")
    ratios = [Fraction(x.digit(seq, n), seq.q(n)) for n in picked]
    note = (f"classical non-membership in t_(a_n) cited, not verified: c_n/q_n >= "
            f"{C.frac_str(min(ratios)) if ratios else 'n/a'} on the support")
    cert = membership_by_support(x, seq, f, g, k, N, checkpoints, notes=[note])
    return x, B, cert


# --------------------------------------------------------------------------
# replay


def verify_certificate(cert) -> Certificate:
    """Rebuild every object from the serialized fields and re-check each claim
    by per-index evaluation.  Returns the replayed certificate."""
    if isinstance(cert, str):
        cert = parse_certificate(cert)
    seq = parse_seq(cert.seq)
    x = parse_element(cert.element)
    f, g = modulus(cert.f), weight(cert.g)
    W = parse_nset(cert.witness)
    N = cert.N
    if cert.kind == "membership-by-support":
        k = cert.params["k"]
        expected = shifts(support_set(x, seq, N + k), k)
        if not expected.equal_on(W, min(N, 2000)):
            raise CertificateInvalid("witness set differs from the support shifts")
        checked = _check_support_chain(x, seq, W, k, N, fast=False)
        bound, band = Fraction(1, 1 << k), None
    elif cert.kind == "membership-by-structure":
        m, K = cert.params["m"], cert.params["K"]
        checked = sum(_check_structure(x, seq, W, m, N, K, fast=False).values())
        bound, band = Fraction(1, 1 << m), None
    elif cert.kind == "nonmembership-qbounded":
        B = _qbounded_witness(x, seq, N)
        if B.to_dsl() != cert.witness:
            raise CertificateInvalid("witness set differs from the run starts")
        band = (Fraction(1, seq.bound ** 2), Fraction(1, 2))
        checked = _check_band(x, seq, W, band, N, fast=False)
        bound = None
    elif cert.kind == "nonmembership-ratio-band":
        m1, m2 = Fraction(cert.params["m1"]), Fraction(cert.params["m2"])
        if not _ratio_band_witness(x, seq, N).equal_on(W, N):
            raise CertificateInvalid("witness set differs from the shifted support")
        band = (m1, 2 * m2)
        checked = _check_band(x, seq, W, band, N, fast=False)
        bound = None
    else:
        raise CertificateInvalid(f"unknown certificate kind {cert.kind!r}")
    if band != cert.band or bound != cert.bound or checked != cert.checked:
        raise CertificateInvalid("replayed bands or counts differ from the certificate")
    _, v = _density(W, f, g, cert.checkpoints)
    if v.verdict != cert.density_verdict:
        raise CertificateInvalid(f"density verdict replays as {v.verdict}, certificate says "
                                 f"{cert.density_verdict}")
    return cert
