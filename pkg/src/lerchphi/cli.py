"""Command-line front end.

Subcommands: ``eval`` (single evaluation), ``selftest`` (quick closed-form
checks), ``bench`` (timing of the method suite on reference points, not
comparable across machines), ``tables`` (regenerate the reference tables of
selection heuristics, bounds and term counts).

Numbers are printed as decimal strings; JSON output carries enough digits
to reproduce the binary result exactly at the same precision.
"""

import argparse
import json
import math
import os
import re
import sys
import time

import mpmath
from mpmath import mp, mpf, mpc

from .errors import (ConvergenceError, DomainError, LerchError, PoleError,
                     PrecisionUnreachableError)
from .numerics import DIGITS_PER_BIT, PrecisionContext
from .result import METHODS
from .selector import evaluate
from . import tables as _tables

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3
EXIT_PARSE = 4

_METHOD_ALIASES = {
    "auto": None,
    "lseries": "lseries",
    "em": "euler_maclaurin",
    "uasymp": "uniform_asymptotic",
    "largez": "large_z_asymptotic",
    "quad": "quadrature",
}

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)"
    r"(\s*,\s*(?P<im>[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?))?\s*$")


class ParseError(ValueError):
    def __init__(self, msg, position=None):
        super().__init__(msg)
        self.position = position


def parse_complex(text, prec_bits=None):
    """Parse '<real>' or '<real>,<imag>' into an mpc, exactly at working precision."""
    m = _COMPLEX_RE.match(text)
    if not m:
        # locate the first offending character for the error message
        pos = 0
        for i, ch in enumerate(text):
            if ch not in "0123456789+-.eE, \t":
                pos = i
                break
        raise ParseError("cannot parse complex literal %r" % text, position=pos)
    with mp.workprec(prec_bits or mp.prec):
        re_part = mpf(m.group("re"))
        im_part = mpf(m.group("im")) if m.group("im") else mpf(0)
        return mpc(re_part, im_part)


def _parts(v):
    # split into (re, im) without mpc()'s re-rounding at ambient precision
    if isinstance(v, mpc):
        return v.real, v.imag
    return mpf(v), mpf(0)


def _roundtrip_digits(prec_bits):
    # digits that uniquely determine a prec_bits binary float
    return int(prec_bits * math.log10(2)) + 3


def _num_str(x, digits):
    if not isinstance(x, mpf):
        x = mpf(x)
    return mpmath.nstr(x, digits, strip_zeros=False)


def _format_json(res, prec_bits):
    d = _roundtrip_digits(prec_bits)
    diag = res.diagnostics
    re_part, im_part = _parts(res.value)
    out = {
        "value": {"re": _num_str(re_part, d),
                  "im": _num_str(im_part, d)},
        "prec_bits": prec_bits,
        "method": res.method,
        "error_bound": _num_str(res.error, 5),
        "diagnostics": {
            "working_prec": diag.working_prec,
            "retries": diag.retries,
            "cancellation_bits": diag.cancellation_bits,
            "N": diag.n_terms, "M": diag.m_terms, "K": diag.k_terms,
        },
    }
    if diag.best_effort:
        out["diagnostics"]["best_effort"] = True
    if diag.flags:
        out["diagnostics"]["flags"] = list(diag.flags)
    return json.dumps(out, indent=2)


def _format_text(res, prec_bits, verbose=False):
    digits = max(1, int(DIGITS_PER_BIT * prec_bits))
    re_part, im_part = _parts(res.value)
    lines = []
    if im_part == 0:
        lines.append("value  = %s" % mpmath.nstr(re_part, digits))
    else:
        lines.append("value  = %s" % mpmath.nstr(mpc(re_part, im_part), digits))
    lines.append("error <= %s" % mpmath.nstr(res.error, 3))
    lines.append("method = %s" % res.method)
    if verbose:
        for k, val in sorted(res.diagnostics.as_dict().items()):
            if k != "method":
                lines.append("%s = %s" % (k, val))
    return "\n".join(lines)


def run_eval(args):
    prec = args.prec
    if args.digits is not None:
        prec = int(math.ceil(args.digits / DIGITS_PER_BIT))
    if prec < 8:
        print("precision must be at least 8 bits", file=sys.stderr)
        return EXIT_PARSE
    try:
        with mp.workprec(prec + 20):
            z = parse_complex(args.z, prec + 20)
            s = parse_complex(args.s, prec + 20)
            a = parse_complex(args.a, prec + 20)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    method = _METHOD_ALIASES.get(args.method, args.method)
    if method is not None and method not in METHODS:
        print("unknown method %r" % args.method, file=sys.stderr)
        return EXIT_PARSE
    try:
        res = evaluate(z, s, a, prec, method=method, workers=args.workers)
    except (PoleError, DomainError) as exc:
        print("domain error: %s" % exc, file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, PrecisionUnreachableError) as exc:
        print("convergence failure: %s" % exc, file=sys.stderr)
        return EXIT_CONVERGENCE
    print(_format_json(res, prec) if args.json
          else _format_text(res, prec, args.verbose))
    return EXIT_OK


def run_selftest(args):
    checks = []
    with mp.workprec(300):
        cases = [
            ("phi(0,s,a) = a^-s", 0, 2, 3, mpf(1) / 9),
            ("phi(1,2,1) = pi^2/6", 1, 2, 1, mp.pi ** 2 / 6),
            ("phi(1/2,1,1) = 2 log 2", mpf(1) / 2, 1, 1, 2 * mpmath.log(2)),
            ("phi(1/2,2,1) = pi^2/6 - log^2 2",
             mpf(1) / 2, 2, 1, 2 * (mp.pi ** 2 / 12 - mpmath.log(2) ** 2 / 2)),
        ]
        for (name, z, s, a, want) in cases:
            res = evaluate(z, s, a, 256)
            ok = abs(mpc(res.value) - want) <= mpf(2) ** (-252)
            checks.append(ok)
            print("%-32s %s  (%s)" % (name, "ok" if ok else "FAIL", res.method))
    # one cross-method agreement probe
    r1 = evaluate(mpf("0.85"), mpf("2.5"), mpf("2.0"), 128)
    r2 = evaluate(mpf("0.85"), mpf("2.5"), mpf("2.0"), 128, method="quadrature")
    ok = abs(mpc(r1.value) - mpc(r2.value)) <= r1.error + r2.error
    checks.append(ok)
    print("%-32s %s  (%s vs %s)" % ("cross-method agreement", "ok" if ok else "FAIL",
                                    r1.method, r2.method))
    print("selftest:", "all ok" if all(checks) else "FAILURES")
    return EXIT_OK if all(checks) else EXIT_CONVERGENCE


def run_bench(args):
    points = [
        ("series point", mpf(1) / 4, mpf(10) / 4, mpf(20) / 7, ["lseries", "quadrature"]),
        ("near-unit |z|", mpf(9) / 10, mpf(10) / 4, mpf(20) / 7,
         ["lseries", "euler_maclaurin", "quadrature"]),
        ("large z and a", mpf(10000), mpf(10) / 4, mpf(2000),
         ["large_z_asymptotic", "quadrature"]),
        ("large negative z", mpf("-20000"), mpf("100.25"), mpf("501.5"),
         ["uniform_asymptotic", "large_z_asymptotic", "quadrature"]),
    ]
    prec = args.prec
    print("timings at %d bits (seconds; machine-local, not comparable)" % prec)
    for (name, z, s, a, methods) in points:
        row = ["%-18s" % name]
        for meth in methods:
            t0 = time.perf_counter()
            try:
                evaluate(z, s, a, prec, method=meth)
                dt = time.perf_counter() - t0
                row.append("%s=%.4f" % (meth, dt))
            except LerchError as exc:
                row.append("%s=n/a(%s)" % (meth, type(exc).__name__))
        print("  ".join(row))
    return EXIT_OK


def run_tables(args):
    which = args.which
    out = sys.stdout
    wrote_csv = args.csv
    try:
        if which in ("em-bound", "all"):
            _tables.em_bound_table(out, csv=wrote_csv)
        if which in ("em-terms", "all"):
            _tables.em_terms_table(out, csv=wrote_csv)
        if which in ("largez-terms", "all"):
            _tables.largez_terms_table(out, csv=wrote_csv)
        if which in ("uae-terms", "all"):
            _tables.uae_terms_table(out, csv=wrote_csv)
    except LerchError as exc:
        print("table generation error: %s" % exc, file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="lerchphi",
        description="Arbitrary-precision Lerch transcendent phi(z, s, a)")
    sub = p.add_subparsers(dest="cmd", required=True)

    pe = sub.add_parser("eval", help="evaluate phi(z, s, a)")
    pe.add_argument("--z", required=True, help="complex literal: 're' or 're,im'")
    pe.add_argument("--s", required=True)
    pe.add_argument("--a", required=True)
    pe.add_argument("--prec", type=int, default=64, help="target precision in bits")
    pe.add_argument("--digits", type=int, default=None,
                    help="decimal digits (converted to bits)")
    pe.add_argument("--method", default="auto",
                    choices=sorted(set(list(_METHOD_ALIASES) + list(METHODS))))
    pe.add_argument("--json", action="store_true")
    pe.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    pe.add_argument("--verbose", action="store_true")
    pe.set_defaults(func=run_eval)

    ps = sub.add_parser("selftest", help="closed-form sanity checks")
    ps.set_defaults(func=run_selftest)

    pb = sub.add_parser("bench", help="method timings on reference points")
    pb.add_argument("--prec", type=int, default=333)
    pb.set_defaults(func=run_bench)

    pt = sub.add_parser("tables", help="regenerate reference tables")
    pt.add_argument("--which", default="all",
                    choices=["all", "em-bound", "em-terms", "largez-terms",
                             "uae-terms"])
    pt.add_argument("--csv", action="store_true")
    pt.set_defaults(func=run_tables)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
