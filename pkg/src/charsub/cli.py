"""Command-line front end.

Exit codes: 0 success, 1 the run finished but the evidence is indeterminate
or contradicts the expected outcome, 2 usage/parse/domain errors, 3 precision
or budget exhaustion.
"""
from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from dataclasses import asdict, replace
from fractions import Fraction
from pathlib import Path

from . import certified as C
from . import io as cio
from . import subgroup as sg
from .circle import digit_rows, frac_eval, frac_exact, norm_best, parse_element, parse_seq
from .config import Settings, parse_config, set_default, settings
from .constructions import (antichain_family, geometric_mean_weight, prop27_construction, scale_sequence,
                            scale_sequence_checks, thin_to_null)
from .density import INDETERMINATE, block_decomposition, parse_checkpoints, trajectory, verdict
from .dsl import parse_expr, expr_to_text
from .errors import (BudgetError, CapabilityError, CertificateInvalid, CharsubError, DomainError,
                     DSLSyntaxError, HypothesisFailure, MalformedSetError, PrecisionError, RuleError,
                     StructureError, ThinningExhausted)
from .experiments import CATALOG, VERSION, run_named
from .funcs import modulus, weight
from .nset import IntervalFamily, parse_nset, validate


def _eps_list(text):
    return [Fraction(t) for t in text.split(",") if t.strip()]


def _int(text):
    text = text.strip()
    if "^" in text:
        b, e = text.split("^")
        return int(b) ** int(e)
    return int(Fraction(text)) if "e" not in text.lower() else int(float(text))


class Output:
    """Writes files (plus a manifest) under --out, or CSV to stdout."""

    def __init__(self, args, command):
        self.dir = Path(args.out) if getattr(args, "out", None) else None
        self.command = command
        self.args = args
        self.t0 = time.perf_counter()
        self.files = []

    def csv(self, name, rows, plot=None):
        text = cio.csv_text(rows)
        if self.dir is None:
            sys.stdout.write(text)
            return
        cio.write_atomic(self.dir / f"{name}.csv", text)
        self.files.append(f"{name}.csv")
        if plot:
            cio.write_atomic(self.dir / f"{name}.svg", cio.svg_from_csv(text, "n", plot[0], plot[1]))
            self.files.append(f"{name}.svg")

    def text(self, name, text):
        if self.dir is None:
            sys.stdout.write(text)
            return
        cio.write_atomic(self.dir / name, text)
        self.files.append(name)

    def finish(self):
        if self.dir is None:
            return
        inputs = {k: v for k, v in vars(self.args).items() if k != "func" and v is not None}
        manifest = {"command": self.command, "inputs": {k: str(v) for k, v in inputs.items()},
                    "version": VERSION, "python": platform.python_version(), "seeds": None,
                    "caps": asdict(settings()), "files": self.files,
                    "runtime_seconds": round(time.perf_counter() - self.t0, 3)}
        cio.write_atomic(self.dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# commands


def cmd_density(args):
    A = parse_nset(args.set)
    f, g = modulus(args.f), weight(args.g)
    tr = trajectory(A, f, g, parse_checkpoints(args.checkpoints))
    out = Output(args, "density")
    out.csv("density", tr.csv_rows(), (["ratio"], f"{A.to_dsl()} under ({f.id}, {g.id})"))
    v = verdict(tr)
    print(v.describe(), file=sys.stderr)
    out.finish()
    return 1 if v.verdict == INDETERMINATE else 0


def cmd_blocks(args):
    D = block_decomposition(modulus(args.f), weight(args.g), args.K)
    out = Output(args, "blocks")
    rows = D.csv_rows()
    out.csv("blocks", rows)
    if D.capped:
        print(f"magnitude cap reached after {D.K} blocks", file=sys.stderr)
    out.finish()
    return 0


def cmd_digits(args):
    seq, x = parse_seq(args.seq), parse_element(args.x)
    out = Output(args, "digits")
    out.csv("digits", digit_rows(x, seq, args.N))
    out.finish()
    return 0


def cmd_norm(args):
    seq, x = parse_seq(args.seq), parse_element(args.x)
    out = Output(args, "norm")
    rows = [["n", "frac_lo", "frac_hi", "norm_lo", "norm_hi", "exact"]]
    for n in range(args.n, (args.to or args.n) + 1):
        v = frac_exact(x, seq, n)
        fr = C.Interval(v) if v is not None else frac_eval(x, seq, n, args.K)
        nr = norm_best(x, seq, n, args.K)
        rows.append([str(n), C.frac_str(fr.lo), C.frac_str(fr.hi), C.frac_str(nr.lo), C.frac_str(nr.hi),
                     str(v is not None).lower()])
    out.csv("norm", rows)
    out.finish()
    return 0


def cmd_converge(args):
    seq, x = parse_seq(args.seq), parse_element(args.x)
    f, g = modulus(args.f), weight(args.g)
    cps = parse_checkpoints(args.checkpoints) if args.checkpoints else None
    rep = sg.convergence_report(x, seq, f, g, _eps_list(args.eps), _int(args.N), cps, args.mode)
    out = Output(args, "converge")
    if out.dir is not None:
        for i, e in enumerate(rep.entries):
            out.csv(f"eps_{i}", e.trajectory.csv_rows(), (["ratio"], f"exception set eps = {C.frac_str(e.eps)}"))
    text = "\n".join(rep.lines()) + "\n"
    if out.dir is not None:
        out.text("report.txt", text)
    sys.stderr.write(text) if out.dir is not None else sys.stdout.write(text)
    out.finish()
    return 1 if rep.overall == INDETERMINATE else 0


def cmd_construct(args):
    out = Output(args, "construct")
    kind = args.kind
    if kind == "scale":
        f1, f2 = modulus(args.f1), modulus(args.f2)
        capped = None
        try:
            a = scale_sequence(f1, f2, args.K)
        except BudgetError as exc:
            a, capped = exc.produced, str(exc)
        checks = scale_sequence_checks(a, f1, f2)
        rows = [["n", "a_n", "f1", "f2", "double", "defining", "minimal"], [1, a[0], "", "", "", "", ""]]
        rows += [[i + 2, a[i + 1]] + [str(c[k]).lower() for k in ("f1", "f2", "double", "defining", "minimal")]
                 for i, c in enumerate(checks)]
        out.csv("scale", [list(map(str, r)) for r in rows])
        if capped:
            print(f"magnitude cap: {len(a)} terms produced ({capped})", file=sys.stderr)
            out.finish()
            return 3
    elif kind == "prop27":
        P = prop27_construction(modulus(args.f), args.K)
        out.csv("prop27", [["k", "b_k", "c_k", "d_k"]] + [[str(k + 1), str(b), str(c), str(d)]
                                                        for k, (b, c, d) in enumerate(zip(P.b, P.c, P.d))])
        print(f"g = {P.g.id}\nA = {P.A.to_dsl()}", file=sys.stderr)
    elif kind == "antichain":
        P = [int(t) for t in args.P.split(",")]
        fam = antichain_family(modulus(args.f1), modulus(args.f2), P)
        out.csv("antichain", [["p", "b_p", "c_prime", "d_p", "b_next"]] +
                [[str(p), str(fam.b[p]), str(fam.c_prime[p]), str(fam.d[p]), str(fam.b[p + 1])] for p in fam.P])
        print(f"g_P = {fam.g.id}\nA_P = {fam.A.to_dsl()}\nB_P = {fam.B.to_dsl()}", file=sys.stderr)
        if fam.truncated:
            print(f"beyond the magnitude cap: {list(fam.truncated)}", file=sys.stderr)
    elif kind == "geomean":
        g3 = geometric_mean_weight(modulus(args.f), weight(args.g1), weight(args.g2))
        out.csv("geomean", [["n", "g3"]] + [[str(n), C.decimal_str(g3(n))] for n in parse_checkpoints(args.checkpoints)])
    elif kind == "thin":
        D = block_decomposition(modulus(args.f), weight(args.g), args.K)
        try:
            T = thin_to_null(parse_nset(args.set), D)
        except ThinningExhausted as exc:
            print(str(exc), file=sys.stderr)
            T = exc.partial
        out.text("thinned.txt", T.to_dsl() + "\n")
    out.finish()
    return 0


def cmd_certify(args):
    if args.kind == "verify":
        text = Path(args.file).read_text(encoding="utf-8")
        cert = sg.verify_certificate(text)
        print(f"valid: {cert.kind}, N = {cert.N}, checked {cert.checked}, density {cert.density_verdict}")
        return 0
    seq = parse_seq(args.seq)
    f, g = modulus(args.f), weight(args.g)
    N = _int(args.N)
    cps = parse_checkpoints(args.checkpoints) if args.checkpoints else None
    if args.kind == "support":
        cert = sg.membership_by_support(parse_element(args.x), seq, f, g, args.k, N, cps)
    elif args.kind == "structure":
        _, cert = sg.lemma39_witness(seq, IntervalFamily(args.family), args.m, N, f, g, checkpoints=cps)
    elif args.kind == "qbounded":
        cert = sg.qbounded_nonmembership(parse_element(args.x), seq, f, g, N, cps)
    elif args.kind == "ratio-band":
        cert = sg.ratio_band_nonmembership(parse_element(args.x), seq, Fraction(args.m1), Fraction(args.m2),
                                           f, g, N, cps)
    else:  # probe
        res = sg.corollary319_probe(seq, parse_nset(args.set), f, g, N, args.k, cps)
        print(f"{res.verdict}: {res.note}", file=sys.stderr)
        if res.certificate is None:
            return 1
        cert = res.certificate
    out = Output(args, "certify")
    out.text("certificate.cert", cert.serialize())
    out.finish()
    return 0


def cmd_experiment(args):
    if args.list or not args.name:
        for name, fn in CATALOG.items():
            print(f"{name}: {(fn.__doc__ or '').strip().splitlines()[0] if fn.__doc__ else ''}".rstrip(": "))
        return 0
    names = list(CATALOG) if args.name == "all" else [args.name]
    status = 0
    for name in names:
        rep = run_named(name)
        if args.out:
            rep.write(args.out)
        sys.stdout.write(rep.text())
        status = max(status, 0 if rep.ok else 1)
    return status


def cmd_parse_check(args):
    done = False
    if args.set:
        A = parse_nset(args.set)
        validate(A)
        print(f"set: {A.to_dsl()}")
        done = True
    if args.expr:
        print(f"expr: {expr_to_text(parse_expr(args.expr))}")
        done = True
    if args.element:
        print(f"element: {parse_element(args.element).to_dsl()}")
        done = True
    if args.seq:
        print(f"seq: {parse_seq(args.seq).text}")
        done = True
    if args.f:
        print(f"f: {modulus(args.f).id}")
        done = True
    if args.g:
        print(f"g: {weight(args.g).id}")
        done = True
    if not done:
        raise DomainError("nothing to check: give --set, --expr, --element, --seq, --f or --g")
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="charsub", description="Weighted modulus densities and "
                                "statistically characterized subgroups of the circle.")
    p.add_argument("--config", help="key = value file presetting caps")
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--precision-cap", type=int)
    p.add_argument("--generator-budget", type=int)
    p.add_argument("--magnitude-cap", type=int, dest="magnitude_cap_bits")
    p.add_argument("--window-fraction", type=float)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        return sp

    def out(sp):
        sp.add_argument("--out", help="directory for CSV/SVG files and manifest.json (default: stdout)")

    sp = add("density", cmd_density, "density trajectory of a set")
    sp.add_argument("--set", required=True)
    sp.add_argument("--f", default="x")
    sp.add_argument("--g", default="n")
    sp.add_argument("--checkpoints", default="geo:1e1..1e6")
    out(sp)

    sp = add("blocks", cmd_blocks, "block decomposition where f(g(n)) doubles")
    sp.add_argument("--f", default="x")
    sp.add_argument("--g", default="n")
    sp.add_argument("--K", type=int, default=20)
    out(sp)

    sp = add("digits", cmd_digits, "canonical digits of an element")
    sp.add_argument("--x", required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--N", type=int, default=64)
    out(sp)

    sp = add("norm", cmd_norm, "certified {a_n x} and ||a_n x||")
    sp.add_argument("--x", required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--to", type=int)
    sp.add_argument("--K", type=int)
    out(sp)

    sp = add("converge", cmd_converge, "f^g-statistical convergence report for (a_n x)")
    sp.add_argument("--x", required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--f", default="x")
    sp.add_argument("--g", default="n")
    sp.add_argument("--eps", required=True, help="comma-separated rationals in (0, 1/2)")
    sp.add_argument("--N", required=True)
    sp.add_argument("--checkpoints")
    sp.add_argument("--mode", choices=["auto", "dense", "sparse"], default="auto")
    out(sp)

    sp = add("construct", cmd_construct, "explicit weights and sets")
    sp.add_argument("kind", choices=["scale", "prop27", "antichain", "geomean", "thin"])
    sp.add_argument("--f", default="x")
    sp.add_argument("--f1", default="x")
    sp.add_argument("--f2", default="x")
    sp.add_argument("--g", default="n")
    sp.add_argument("--g1", default="log(1+n)")
    sp.add_argument("--g2", default="n")
    sp.add_argument("--K", type=int, default=5)
    sp.add_argument("--P", default="1")
    sp.add_argument("--set")
    sp.add_argument("--checkpoints", default="geo:1..1e6")
    out(sp)

    sp = add("certify", cmd_certify, "build or verify a membership certificate")
    sp.add_argument("kind", choices=["support", "structure", "qbounded", "ratio-band", "probe", "verify"])
    sp.add_argument("file", nargs="?", help="certificate file (verify)")
    sp.add_argument("--x")
    sp.add_argument("--seq", default="const-ratio 2")
    sp.add_argument("--f", default="x")
    sp.add_argument("--g", default="n")
    sp.add_argument("--N", default="10000")
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--m1")
    sp.add_argument("--m2")
    sp.add_argument("--family", default="2^(2^j)")
    sp.add_argument("--set")
    sp.add_argument("--checkpoints")
    out(sp)

    sp = add("experiment", cmd_experiment, "run a named experiment (or 'all')")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--out")

    sp = add("parse-check", cmd_parse_check, "parse and validate DSL inputs")
    for opt in ("--set", "--expr", "--element", "--seq", "--f", "--g"):
        sp.add_argument(opt)
    return p


USAGE_ERRORS = (DSLSyntaxError, DomainError, MalformedSetError, CapabilityError, RuleError, StructureError,
                HypothesisFailure, ValueError, OSError)
LIMIT_ERRORS = (PrecisionError, BudgetError)


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        base = parse_config(Path(args.config).read_text(encoding="utf-8")) if args.config else Settings()
        overrides = {k: getattr(args, k) for k in ("precision_bits", "precision_cap", "generator_budget",
                                                  "magnitude_cap_bits", "window_fraction")
                     if getattr(args, k) is not None}
        set_default(replace(base, **overrides))
        return args.func(args)
    except CertificateInvalid as exc:
        print(f"charsub: certificate invalid: {exc}", file=sys.stderr)
        return 1
    except LIMIT_ERRORS as exc:
        print(f"charsub: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except USAGE_ERRORS as exc:
        print(f"charsub: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except CharsubError as exc:
        print(f"charsub: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
