"""Reference-table regeneration.

Reproduces, on the local machine, the published diagnostic tables this
implementation is validated against: remainder-bound effectiveness,
Euler-Maclaurin term selection, and truncation counts of the asymptotic
expansions.  Wall-clock columns are machine-local and not comparable
across systems.
"""

import math
import time

import mpmath
from mpmath import mp, mpf, mpc

from .eulermaclaurin import (em_error_bound, em_error_estimate,
                             em_integral_term, em_tail, select_nm)
from .asymptotics import largez_k, largez_kmax, uae_k_select, uae_kmax
from .lseries import lseries_eval, sum_blocks
from .numerics import PrecisionContext
from .selector import evaluate

# (z, s, a, N, M); |z| < 1 rows have a convergent remainder integral
EM_BOUND_CASES = [
    (mpf("0.8"), mpf("3.2"), mpf("10.5"), 6, 15),
    (mpc("0.5", "0.2"), mpc("-30.2", "-1"), mpc("10.5", "5"), 10, 40),
    (mpc("0.5", "0.2"), mpc("-30.2", "-1"), mpc("100.5", "5"), 100, 2000),
    (mpc("0.5", "0.7"), mpc("-3.2", "10"), mpc("10.5", "5"), 250, 300),
    (mpc("0.5", "0.7"), mpc("30.2", "10"), mpc("10.5", "10.5"), 600, 700),
]

# term-selection rows: (z, s, a, [(target_bits, working_bits_used), ...]);
# the working precisions are those the full evaluation loop settles at
EM_TERMS_CASES = [
    (mpc("2.5", "1.5"), mpc("1.25", "2"), mpc("3.5", "5"),
     [(64, 77), (333, 400), (1024, 1228), (3333, 3999), (10000, 12000)]),
    (mpc("2.5", "7.5"), mpc("-50.25", "10"), mpc("1.5", "-1"),
     [(64, 283), (333, 1276), (1024, 3636), (3333, 11114), (10000, 31830)]),
    (mpc("2.5", "0.5"), mpc("-100.25", "10"), mpc("100.5", "-10"),
     [(64, 108), (333, 528), (1024, 1557), (3333, 4786), (10000, 12106)]),
]

LARGEZ_CASES = [
    (mpf(140), mpf(1) / 4, mpf(200), [64, 333, 1024]),
    (mpf(10000), mpf(10) / 4, mpf(2000), [64, 333, 1024, 3333, 10000]),
]

UAE_CASES = [
    (mpf("-200.65"), mpf("100.25"), mpf("501.5"), [64, 333, 1024]),
    (mpf("-20000"), mpf("100.25"), mpf("501.5"), [64, 333, 1024]),
]


def _emit(out, cols, csv):
    if csv:
        out.write(",".join(str(c) for c in cols) + "\n")
    else:
        out.write("  ".join("%-14s" % c for c in cols) + "\n")


def reference_remainder(z, s, a, N, M, prec):
    """|R| = |Phi_series - (S + I + T)| with the series as the reference."""
    ctx = PrecisionContext.for_target(prec, guard_bits=40)
    ref = lseries_eval(z, s, a, ctx).value
    with mp.workprec(prec + 40):
        s_val, _ = sum_blocks(z, s, a, N, ctx) if N > 0 else (mpc(0), mpf(0))
        i_val, _ = em_integral_term(z, s, a, N)
        t_val = em_tail(z, s, a, N, M)[0]
        return abs(mpc(ref) - (s_val + i_val + t_val))


def em_bound_table(out, csv=False):
    """Remainder-bound effectiveness table: |R|, bound, and both estimates."""
    _emit(out, ["z", "s", "a", "N", "M", "|R|", "bound", "est1", "est2"], csv)
    for (z, s, a, N, M) in EM_BOUND_CASES:
        if abs(z) < 1 and M <= 760:
            scale = -int(mpmath.mag(reference_remainder(z, s, a, N, M, 16)))
            prec = max(64, int(3.33 * scale) + 64)
            r = mpmath.nstr(reference_remainder(z, s, a, N, M, prec), 2)
        else:
            r = "divergent"
        try:
            b = mpmath.nstr(em_error_bound(z, s, a, N, M), 2)
        except Exception:
            b = "n/a"
        e1 = em_error_estimate(z, s, a, N, M, which="m1")
        e2 = em_error_estimate(z, s, a, N, M, which="m2")
        _emit(out, [z, s, a, N, M, r, b,
                    mpmath.nstr(e1, 2) if e1 is not None else "-",
                    mpmath.nstr(e2, 2) if e2 is not None else "-"], csv)


def em_terms_table(out, csv=False):
    """Euler-Maclaurin N/M selection at the working precisions of the run."""
    _emit(out, ["z", "s", "a", "bits", "N", "M", "rule", "work_bits"], csv)
    for (z, s, a, rows) in EM_TERMS_CASES:
        for (target, work) in rows:
            cfg = select_nm(z, s, a, work)
            _emit(out, [z, s, a, target, cfg.n_terms, cfg.m_terms,
                        cfg.tag, work], csv)


def largez_terms_table(out, csv=False):
    """Large-z expansion truncation counts and ceilings per precision."""
    _emit(out, ["z", "s", "a", "bits", "K", "K_max", "seconds"], csv)
    for (z, s, a, precs) in LARGEZ_CASES:
        for P in precs:
            k, k_max = largez_k(z, s, a, P)
            note = ""
            if k <= k_max and P <= 1024:
                t0 = time.perf_counter()
                try:
                    evaluate(z, s, a, P, method="large_z_asymptotic")
                except Exception as exc:
                    note = type(exc).__name__
                secs = "%.4f%s" % (time.perf_counter() - t0, note)
            else:
                secs = "-"
            _emit(out, [z, s, a, P, k, k_max, secs], csv)


def uae_terms_table(out, csv=False):
    """Uniform-expansion truncation counts per precision."""
    _emit(out, ["z", "s", "a", "bits", "K", "seconds"], csv)
    for (z, s, a, precs) in UAE_CASES:
        for P in precs:
            try:
                k = uae_k_select(z, s, a, P)
            except Exception as exc:
                _emit(out, [z, s, a, P, type(exc).__name__, "-"], csv)
                continue
            t0 = time.perf_counter()
            note = ""
            try:
                evaluate(z, s, a, P, method="uniform_asymptotic")
            except Exception as exc:
                note = type(exc).__name__
            dt = time.perf_counter() - t0
            _emit(out, [z, s, a, P, k, "%.4f%s" % (dt, note)], csv)
