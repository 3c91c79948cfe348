"""Named end-to-end runs: constructions, trajectory evidence and certificates,
collected into a report directory.

Claims are tagged ``exact`` (integer or certified-real identities that hold
as stated) or ``at-scale`` (finite-checkpoint evidence).  The two kinds are
listed separately in every report.
"""
from __future__ import annotations

import json
import platform
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import certified as C
from . import io as cio
from .circle import ArithSeq
from .config import settings
from .constructions import antichain_family, geometric_mean_weight, prop27_construction
from .density import NULL, POSITIVE, geometric, trajectory, verdict
from .errors import HypothesisFailure, MagnitudeCapError
from .funcs import ModulusFn, WeightFn, modulus, weight
from .nset import NSet, Prog, parse_nset, shifts
from .subgroup import corollary319_probe, membership_by_support, verify_certificate

VERSION = "0.1.0"


@dataclass
class Claim:
    text: str
    kind: str          # "exact" | "at-scale"
    value: str
    ok: bool


@dataclass
class Report:
    id: str
    params: dict
    expected: str
    claims: list = field(default_factory=list)
    csvs: dict = field(default_factory=dict)          # name -> list of rows
    plots: dict = field(default_factory=dict)         # csv name -> (y columns, title)
    certificates: dict = field(default_factory=dict)  # name -> Certificate
    notes: list = field(default_factory=list)
    runtime: float = 0.0

    def claim(self, text, kind, value, ok):
        self.claims.append(Claim(text, kind, str(value), bool(ok)))

    @property
    def ok(self):
        return all(c.ok for c in self.claims)

    def text(self) -> str:
        lines = [f"experiment: {self.id}", f"expected: {self.expected}", "parameters:"]
        lines += [f"  {k} = {v}" for k, v in self.params.items()]
        for kind in ("exact", "at-scale"):
            rows = [c for c in self.claims if c.kind == kind]
            if rows:
                lines.append(f"{kind} claims:")
                lines += [f"  [{'pass' if c.ok else 'FAIL'}] {c.text}: {c.value}" for c in rows]
        if self.certificates:
            lines.append("certificates:")
            lines += [f"  {name}: {cert.kind}, N = {cert.N}, checked {cert.checked}, "
                      f"density {cert.density_verdict}" for name, cert in self.certificates.items()]
        if self.notes:
            lines.append("notes:")
            lines += [f"  - {n}" for n in self.notes]
        lines.append(f"verdict: {'as expected' if self.ok else 'evidence contradicts or is indeterminate'}")
        return "\n".join(lines) + "\n"

    def write(self, outdir) -> Path:
        out = Path(outdir) / self.id
        for name, rows in self.csvs.items():
            text = cio.csv_text(rows)
            cio.write_atomic(out / f"{name}.csv", text)
            ycols, title = self.plots.get(name, (None, name))
            cio.write_atomic(out / f"{name}.svg", cio.svg_from_csv(text, "n", ycols, title))
        for name, cert in self.certificates.items():
            cio.write_atomic(out / "certificates" / f"{name}.cert", cert.serialize())
        cio.write_atomic(out / "report.txt", self.text())
        s = settings()
        manifest = {
            "experiment": self.id,
            "parameters": {k: str(v) for k, v in self.params.items()},
            "version": VERSION,
            "python": platform.python_version(),
            "seeds": None,
            "caps": {"precision_bits": s.precision_bits, "precision_cap": s.precision_cap,
                     "generator_budget": s.generator_budget, "magnitude_cap_bits": s.magnitude_cap_bits,
                     "window_fraction": s.window_fraction, "digit_cap": s.digit_cap},
            "runtime_seconds": round(self.runtime, 3),
            "ok": self.ok,
        }
        cio.write_atomic(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return out


def _rows(header, data):
    yield header
    for row in data:
        yield [str(row[0])] + [C.decimal_str(v) if isinstance(v, C.Real) else str(v) for v in row[1:]]


def _dec(x) -> str:
    return C.decimal_str(x if isinstance(x, C.Real) else C.Exact(Fraction(x)), 8)


def _add_certificate(rep: Report, name, cert):
    verify_certificate(cert.serialize())
    rep.certificates[name] = cert


def _rising(values) -> bool:
    """Non-decreasing over the checkpoints and strictly larger at the end."""
    return all(C.compare(b, a) >= 0 for a, b in zip(values, values[1:])) and C.compare(values[-1], values[0]) > 0


def _falling(values) -> bool:
    """The final value lies below every value in the first half of the run."""
    return all(C.compare(values[-1], v) < 0 for v in values[: max(1, len(values) // 2)])


def beta_set(beta: Fraction) -> NSet:
    """A = {min n : floor(n^beta) = k}; |A ∩ [1, n]| = floor(n^beta)."""
    inv = 1 / Fraction(beta)
    e = str(inv.numerator) if inv.denominator == 1 else f"({inv.numerator}/{inv.denominator})"
    return parse_nset(f"points k in 1.. : ceil(k^{e})")


def _weight_power(alpha: Fraction) -> WeightFn:
    return weight(f"n^({alpha.numerator}/{alpha.denominator})")


SEPARATING_SEQ = "const-ratio 3"


def _separation_certificates(rep, A, f_member, g_member, f_non, g_non, N, cert_N, cps, k=2):
    """Half-rule element on A over q_n = 3: membership by support w.r.t. one
    density, ratio-band non-membership w.r.t. the other."""
    seq = ArithSeq.const_ratio(3)
    probe = corollary319_probe(seq, A, f_non, g_non, cert_N, checkpoints=cps)
    rep.claim(f"dichotomy probe on A under ({f_non.id}, {g_non.id})", "at-scale", probe.verdict,
              probe.verdict == "non-member-evidence")
    if probe.certificate is None:
        rep.notes.append(probe.note)
        return
    _add_certificate(rep, "nonmembership", probe.certificate)
    member = membership_by_support(probe.element, seq, f_member, g_member, k, cert_N, cps)
    _add_certificate(rep, "membership", member)
    rep.claim(f"support chain off A* up to {cert_N} (k = {k})", "exact", f"{member.checked} indices", True)
    tr = trajectory(shifts(A, k), f_member, g_member, cps)
    rep.claim(f"A* under ({f_member.id}, {g_member.id}) falling", "at-scale", verdict(tr).describe(),
              _falling(tr.values))


# --------------------------------------------------------------------------
# order-alpha density against log weight


def run_theorem41(f: ModulusFn | None = None, alpha=Fraction(1, 2), N: int = 10 ** 6,
                  cert_N: int = 10 ** 4) -> Report:
    """Z_alpha against Z_g(f) for g = log(1+n), with a separating element."""
    t0 = time.perf_counter()
    f = f or modulus("x")
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise HypothesisFailure("alpha must lie strictly between 0 and 1")
    g, g1 = weight("log(1+n)"), _weight_power(alpha)
    rep = Report("theorem41", {"f": f.id, "alpha": alpha, "N": N, "cert_N": cert_N},
                 "Z_alpha and Z_g(f) differ for g = log(1+n); a separating element exists")
    cps = geometric(16, N, 2)
    r1 = [C.div(f(g1(n)), f(g(n))) for n in cps]
    r2 = [C.div(f(n), f(g1(n))) for n in cps]
    rep.csvs["ratios"] = list(_rows(["n", "fg1_over_fg", "fn_over_fg1"], zip(cps, r1, r2)))
    rep.plots["ratios"] = (["fg1_over_fg", "fn_over_fg1"], "theorem41 ratio trajectories")
    rep.claim(f"f(g1(n))/f(g(n)) rising, value at {N}", "at-scale", _dec(r1[-1]), _rising(r1))
    rep.claim(f"f(n)/f(g1(n)) rising, value at {N}", "at-scale", _dec(r2[-1]), _rising(r2))
    beta = alpha / 4
    A = beta_set(beta)
    rep.notes.append(f"A is the explicit set {A.to_dsl()} (count floor(n^{beta})), standing in for the "
                     "non-constructive choice of A in Z_alpha minus Z_g(f)")
    ta, tg = trajectory(A, modulus("x"), g1, cps), trajectory(A, f, g, cps)
    va, vg = verdict(ta), verdict(tg)
    rep.csvs["A_alpha"] = list(ta.csv_rows())
    rep.csvs["A_fg"] = list(tg.csv_rows())
    rep.claim("A under d_alpha falling", "at-scale", va.describe(), _falling(ta.values))
    rep.claim(f"A under ({f.id}, {g.id})", "at-scale", vg.describe(), vg.verdict == POSITIVE)
    _separation_certificates(rep, A, modulus("x"), g1, f, g, N, cert_N, cps)
    rep.runtime = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# d_alpha-null set with positive log density


def run_theorem42(g: WeightFn | None = None, alpha=Fraction(3, 4), beta=Fraction(1, 2), N: int = 10 ** 6,
                  cert_N: int = 10 ** 4, tolerance=Fraction(1, 100)) -> Report:
    """A d_alpha-null set with positive (log(1+x), g) density."""
    t0 = time.perf_counter()
    g = g or weight("n")
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not 0 < beta < alpha < 1:
        raise HypothesisFailure("need 0 < beta < alpha < 1")
    f = modulus("log(1+x)")
    g_alpha = _weight_power(alpha)
    rep = Report("theorem42", {"g": g.id, "alpha": alpha, "beta": beta, "N": N, "cert_N": cert_N},
                 "A is d_alpha-null but has positive (log(1+x), g) density")
    A = beta_set(beta)
    cps = geometric(2, N, 2)
    ta = trajectory(A, modulus("x"), g_alpha, cps)
    va = verdict(ta)
    rep.csvs["A_alpha"] = list(ta.csv_rows())
    rep.claim("A under d_alpha falling", "at-scale", va.describe(), _falling(ta.values))
    qualifying = [n for n in cps if C.compare(C.add(ONE_, g(n)), C.Exact(Fraction((1 + n) ** 2))) < 0]
    if not qualifying:
        rep.claim("checkpoints with 1 + g(n) < (1 + n)^2", "at-scale", "none found", False)
        rep.notes.append("evidence not found: no qualifying checkpoint within the schedule")
        rep.runtime = time.perf_counter() - t0
        return rep
    tg = trajectory(A, f, g, qualifying)
    rep.csvs["A_fg"] = list(tg.csv_rows())
    floor_ok = all(p.enclosure.lo >= beta / 2 - tolerance for p in tg.points)
    rep.claim(f"ratio >= beta/2 - {tolerance} at all {len(qualifying)} qualifying checkpoints", "at-scale",
              _dec(min(p.enclosure.lo for p in tg.points)), floor_ok)
    rep.claim(f"ratio at {qualifying[-1]}", "at-scale", _dec(tg.points[-1].ratio), True)
    _separation_certificates(rep, A, modulus("x"), g_alpha, f, g, N, cert_N, cps)
    rep.runtime = time.perf_counter() - t0
    return rep


ONE_ = C.ONE


# --------------------------------------------------------------------------
# constructed weight g with t^f strictly inside t^{f,g}


def run_theorem43(f: ModulusFn | None = None, K: int = 20, N: int = 10 ** 4) -> Report:
    """The factorial-block weight g with t^f strictly inside t^{f,g}."""
    t0 = time.perf_counter()
    f = f or modulus("x")
    rep = Report("theorem43", {"f": f.id, "K": K, "N": N},
                 "A is null under (f, g) but bounded away under (f, n): t^f strictly inside t^{f,g}")
    P = prop27_construction(f, K)
    if P.capped:
        rep.notes.append(f"magnitude cap: {len(P.a)} sequence terms, {P.blocks} of {K} blocks built")
    ident = weight("n")
    rows, bounds_ok = [], True
    for b, c, d in zip(P.b, P.c, P.d):
        r_id = C.div(f(P.A.count(c)), f(c))
        closed = C.div(C.add(f(c), C.neg(f(b))), f(c))
        r_g = C.div(f(P.A.count(d)), f(P.g(d)))
        bounds_ok &= C.compare(r_id, closed) >= 0
        rows.append((c, d, r_id, closed, r_g))
    rep.csvs["blocks"] = list(_rows(["n", "d_k", "ratio_id_at_c", "lower_bound", "ratio_g_at_d"], rows))
    rep.plots["blocks"] = (["ratio_id_at_c", "ratio_g_at_d"], "theorem43 block checkpoints")
    rep.claim("f(|A ∩ [1,c_k]|)/f(c_k) >= (f(c_k) - f(b_k))/f(c_k) for every block", "exact",
              f"{len(rows)} blocks", bounds_ok)
    rep.claim("first block: ratio under (f, n) at c_1", "exact", _dec(rows[0][2]), True)
    rep.claim("first block: ratio under (f, g) at d_1", "exact", _dec(rows[0][4]), True)
    ds, cs = list(P.d), list(P.c)
    tg = trajectory(P.A, f, P.g, ds)
    ti = trajectory(P.A, f, ident, cs)
    rep.csvs["A_fg"] = list(tg.csv_rows())
    rep.csvs["A_id"] = list(ti.csv_rows())
    vg, vi = verdict(tg), verdict(ti)
    rep.claim("A under (f, g) at the d_k", "at-scale", vg.describe(), vg.verdict == NULL)
    rep.claim("A under (f, n) at the c_k", "at-scale", vi.describe(), vi.verdict == POSITIVE)
    seq = ArithSeq.const_ratio(3)
    probe = corollary319_probe(seq, P.A, f, ident, N, checkpoints=cs)
    if probe.certificate is not None:
        _add_certificate(rep, "nonmembership", probe.certificate)
        member = membership_by_support(probe.element, seq, f, P.g, 3, N, ds)
        _add_certificate(rep, "membership", member)
        rep.claim(f"support chain off A* up to {N}", "exact", f"{member.checked} indices", True)
        rep.claim("A* under (f, g)", "at-scale", member.density_verdict, member.density_verdict == NULL)
    else:
        rep.notes.append(probe.note)
    rep.runtime = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# antichain


def run_antichain_separation(f1: ModulusFn | None = None, f2: ModulusFn | None = None, P=(1,), Q=(2,),
                             N: int = 10 ** 4) -> Report:
    """Incomparable ideals from two antichain index sets."""
    t0 = time.perf_counter()
    f1 = f1 or modulus("x")
    f2 = f2 or modulus("x")
    P, Q = tuple(P), tuple(Q)
    if P == Q:
        raise HypothesisFailure("P and Q must differ")
    if set(P) & set(Q):
        raise HypothesisFailure("P and Q must be disjoint on the used prefix")
    rep = Report("antichain", {"f1": f1.id, "f2": f2.id, "P": list(P), "Q": list(Q), "N": N},
                 "the (f, g_P) and (f, g_Q) ideals are incomparable")
    rep.notes.append("finite instantiation of an infinite family: two index sets only")
    fams = {}
    for name, S in (("P", P), ("Q", Q)):
        try:
            fams[name] = antichain_family(f1, f2, S)
        except MagnitudeCapError as exc:
            rep.claim(f"family {name} = {list(S)}", "exact",
                      f"magnitude cap after {len(exc.produced)} scale terms", False)
    ident = weight("n")
    for name, fam in fams.items():
        if fam.truncated:
            rep.notes.append(f"{name}: members {list(fam.truncated)} lie beyond the magnitude cap")
        rows = []
        for p in fam.P:
            b, cp, d, bn = fam.b[p], fam.c_prime[p], fam.d[p], fam.b[p + 1]
            for fi, label in ((f1, "f1"), (f2, "f2")):
                mu = C.div(fi(fam.B.count_range(bn - d + 1, bn)), fi(fam.g(bn)))
                rep.claim(f"{name}, p = {p}: B block measure under ({label}, g_{name}) at {bn}", "exact",
                          _dec(mu), mu.exact and mu.value == 1)
                ratio = C.div(fi(fam.A.count(cp)), fi(cp))
                closed = C.div(C.add(fi(cp), C.neg(fi(b))), fi(cp))
                same = C.compare(ratio, closed) == 0
                rep.claim(f"{name}, p = {p}: A ratio under ({label}, n) at c' = {cp}", "exact",
                          f"{_dec(ratio)} (closed form {_dec(closed)}, equal: {same})",
                          C.compare(ratio, closed) >= 0)
            rows.append((b, cp, d, bn))
        rep.csvs[f"family_{name}"] = [["n", "c_prime", "d", "b_next"]] + [list(map(str, r)) for r in rows]
        cps = sorted({v for r in rows for v in r})
        ta = trajectory(fam.A, f1, fam.g, cps)
        tb = trajectory(fam.B, f1, ident, cps)
        rep.csvs[f"A_{name}"] = list(ta.csv_rows())
        rep.csvs[f"B_{name}"] = list(tb.csv_rows())
        rep.claim(f"A_{name} under (f1, g_{name}) (reported only)", "at-scale", verdict(ta).describe(), True)
        rep.claim(f"B_{name} under (f1, n) (reported only)", "at-scale", verdict(tb).describe(), True)
    if len(fams) == 2:
        for a, b in (("P", "Q"), ("Q", "P")):
            fa, fb = fams[a], fams[b]
            for p in fa.P:
                cp = fa.c_prime[p]
                r = C.div(f1(fa.A.count(cp)), f1(fb.g(cp)))
                rep.claim(f"A_{a} under (f1, g_{b}) at c' = {cp} (g_{b}(c') = {C.decimal_str(fb.g(cp))})",
                          "at-scale", _dec(r), C.compare(fb.g(cp), C.Exact(Fraction(cp))) == 0)
    if len(fams) < 2 or any(len(f.P) < 2 for f in fams.values()):
        rep.notes.append("only the first block or two verify below the magnitude cap; "
                         "limit behaviour is not observable at this scale")
    rep.runtime = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# two weights sharing one modulus


def run_prop45(f: ModulusFn | None = None, g1: WeightFn | None = None, g2: WeightFn | None = None,
               N: int = 10 ** 6) -> Report:
    """Hypothesis evidence and the geometric-mean weight for a pair g1, g2."""
    t0 = time.perf_counter()
    f = f or modulus("x")
    g1 = g1 or weight("log(1+n)")
    g2 = g2 or weight("n")
    rep = Report("prop45", {"f": f.id, "g1": g1.id, "g2": g2.id, "N": N},
                 "t^{f,g1} strictly inside t^{f,g2}")
    cps = geometric(16, N, 4)
    low = [C.div(f(n), f(g2(n))) for n in cps]
    growth = [C.div(f(g2(n)), f(g1(n))) for n in cps]
    g3 = geometric_mean_weight(f, g1, g2)
    g3v = [g3(n) for n in cps]
    rep.csvs["hypotheses"] = list(_rows(["n", "fn_over_fg2", "fg2_over_fg1", "g3"], zip(cps, low, growth, g3v)))
    rep.plots["hypotheses"] = (["fg2_over_fg1"], "f(g2)/f(g1)")
    a = min(low, key=lambda v: v.enclose(64).lo)
    rep.claim("f(n)/f(g2(n)) bounded below over the checkpoints", "at-scale", _dec(a),
              a.enclose(64).lo > Fraction(1, 1000))
    grows = _rising(growth)
    rep.claim(f"f(g2)/f(g1) growing, value at {N}", "at-scale", _dec(growth[-1]), grows)
    if not grows:
        rep.notes.append("growth hypothesis fails at this scale")
    # f(|A_n|)/f(g2) = f(|A_n|)/f(g1) * f(g1)/f(g2), checked on the evens
    A = Prog(2, 2)
    ident_ok = True
    for n in cps:
        c = f(A.count(n))
        lhs = C.div(c, f(g2(n))).enclose(128)
        rhs = C.mul(C.div(c, f(g1(n))), C.div(f(g1(n)), f(g2(n)))).enclose(128)
        ident_ok &= lhs.lo <= rhs.hi and rhs.lo <= lhs.hi
    rep.claim("ratio factorisation through g1 at every checkpoint", "exact", f"{len(cps)} checkpoints", ident_ok)
    rep.claim("g3 at 16", "exact", C.decimal_str(g3(16)), True)
    rep.notes.append("no separating element is searched for: whether every such pair separates "
                     "through an explicit element is left open")
    rep.runtime = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# catalog

CATALOG = {
    "theorem41": run_theorem41,
    "theorem42": run_theorem42,
    "theorem43": run_theorem43,
    "antichain": run_antichain_separation,
    "prop45": run_prop45,
}


def run_named(name: str, **kw) -> Report:
    try:
        fn = CATALOG[name]
    except KeyError:
        raise HypothesisFailure(f"unknown experiment {name!r}; known: {', '.join(CATALOG)}") from None
    return fn(**kw)
