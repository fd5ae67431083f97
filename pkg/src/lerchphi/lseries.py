"""Direct defining-series evaluation for |z| < 1.

Truncation indices come from Lambert-W closed forms evaluated in machine
arithmetic; the certified geometric remainder bound is checked after
summation and triggers a top-up when the W estimate fell short.  Summation
runs over fixed-size blocks so that the result is bit-identical no matter
how many workers computed the blocks.
"""

import cmath
import math
from concurrent.futures import ProcessPoolExecutor

import mpmath
from mpmath import mp, mpf, mpc

from .errors import ConvergenceError, DomainError, PoleError
from .numerics import (PrecisionContext, cancellation_bits, ensure_finite,
                       exactify, float_nint, round_to, DIGITS_PER_BIT)
from .result import ALTERNATING, LSERIES, Diagnostics, EvalResult
from .special import lambert_w, lambert_w_log

# Fixed block length: block boundaries must not depend on the worker count,
# otherwise different reduction groupings would round differently.
BLOCK = 4096

# Parallel summation pays off only past these sizes.
PARALLEL_MIN_TERMS = 1024
PARALLEL_MIN_PREC = 1024

KHAT_HARD_CAP = 50_000_000


def khat_linear_search(z, s, a, prec_bits):
    """Smallest K with |z^K (K+a)^-s| <= 2^-P by doubling + bisection (floats)."""
    z, s, a = complex(z), complex(s), complex(a)
    ln_z = math.log(abs(z))
    target = -prec_bits * math.log(2)

    def log_term(k):
        return k * ln_z - (s * cmath.log(k + a)).real

    lo, hi = 1, 2
    while log_term(hi) > target:
        lo, hi = hi, hi * 2
        if hi > KHAT_HARD_CAP:
            raise ConvergenceError("series truncation index beyond cap")
    while lo < hi:
        mid = (lo + hi) // 2
        if log_term(mid) <= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def khat(z, s, a, prec_bits):
    """Estimated series truncation index: Lambert-W closed-form seed plus a
    short local walk on the true omitted-term magnitude.

    Machine floats suffice; falls back to a full linear search whenever a
    branch precondition fails or Re(s) = 0.
    """
    z, s, a = complex(z), complex(s), complex(a)
    absz = abs(z)
    if not 0 < absz < 1:
        raise DomainError("series index needs 0 < |z| < 1")
    rs = s.real
    ln_z = math.log(absz)
    ln_a = math.log(abs(a)) if a != 0 else 0.0
    ln2 = math.log(2.0)
    try:
        if rs > 0:
            # phi1 = -(2^-P |a|^(-rs-1) |z|^|a|)^(-1/(rs+1)) * ln|z|/(rs+1) > 0;
            # the Lambert solution of the omitted-term equation carries the
            # same rs+1 that builds phi1
            lnmag = -(-prec_bits * ln2 - (rs + 1) * ln_a + abs(a) * ln_z) / (rs + 1)
            w = lambert_w_log(lnmag + math.log(-ln_z / (rs + 1)))
            k = float_nint(abs(((rs + 1) * w + abs(a) * ln_z) / ln_z))
        elif rs < 0:
            lnmag = (-prec_bits * ln2 - rs * ln_a + abs(a) * ln_z) / rs
            phi2 = -math.exp(lnmag) * ln_z / rs
            w = lambert_w(phi2, -1)
            k = float_nint(abs((rs * w + abs(a) * ln_z) / ln_z))
        else:
            return khat_linear_search(z, s, a, prec_bits)
    except (DomainError, OverflowError, ValueError):
        return khat_linear_search(z, s, a, prec_bits)
    k = max(1, k)

    # local refinement against the actual first-omitted-term magnitude
    target = -prec_bits * ln2

    def log_term(j):
        return j * ln_z - (s * cmath.log(j + a)).real

    steps = 0
    while log_term(k) > target and k < KHAT_HARD_CAP and steps < 10_000_000:
        k += 1
        steps += 1
    while k > 1 and log_term(k - 1) <= target and steps < 10_000_000:
        k -= 1
        steps += 1
    if k > KHAT_HARD_CAP:
        raise ConvergenceError("series truncation index beyond cap")
    return max(1, k)


def series_remainder_bound(z, s, a, K):
    """Certified tail bound |sum_{k>=K}| <= |z|^K / (|(K+a)^s| (1-C)).

    C majorizes the term ratio: the limit |z| suffices for Re(s) >= 0, while
    for Re(s) < 0 the ratio approaches |z| from above and the local values
    C_k = |z (k+a)^s / (k+1+a)^s| near K are taken into the maximum.
    Returns +inf when no geometric majorant exists yet (K before the term
    peak); callers top up K until the bound is finite and small.
    """
    z, s, a = exactify(z), exactify(s), exactify(a)
    absz = abs(z)
    if absz >= 1:
        raise DomainError("remainder bound needs |z| < 1")
    if absz == 0:
        return mpf(0)
    c = absz
    if s.real < 0 or s.imag != 0 or a.imag != 0:
        for j in (0, 1, 4, 16):
            cj = absz * abs(mpmath.power(K + j + a, s)
                            / mpmath.power(K + j + 1 + a, s))
            if cj > c:
                c = cj
    if c >= 1:
        return mpf("inf")
    return (mpmath.power(absz, K)
            / (abs(mpmath.power(K + a, s)) * (1 - c)))


def _block_sum(z, s, a, k0, k1):
    """Sum of terms k0 <= k < k1 plus the block's max |term| (fixed scheme).

    z^k runs as an iterative product from a binary power at the block start;
    the scheme is part of the determinism contract.
    """
    zk = mpmath.power(z, k0)
    terms = []
    max_mag = mpf(0)
    for k in range(k0, k1):
        if z == 0 and k > 0:
            break
        t = zk * mpmath.power(k + a, -s)
        terms.append(t)
        m = abs(t)
        if m > max_mag:
            max_mag = m
        zk = zk * z
    return mpmath.fsum(terms), max_mag


def _block_worker(args):
    z_t, s_t, a_t, k0, k1, prec = args
    with mp.workprec(prec):
        z = mpc(*z_t)
        s = mpc(*s_t)
        a = mpc(*a_t)
        v, m = _block_sum(z, s, a, k0, k1)
        v = mpc(v)
        return (v.real._mpf_, v.imag._mpf_), m._mpf_


def sum_blocks(z, s, a, K, ctx, workers=1):
    """sum_{k<K} z^k (k+a)^-s at ctx.working_bits, bit-identical for any workers.

    Returns (value, max_term_magnitude).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    z, s, a = exactify(z), exactify(s), exactify(a)
    prec = ctx.working_bits
    if a.imag == 0 and a.real <= 0 and mpmath.isint(a.real) and -a.real < K:
        raise PoleError("term k = %d divides by zero" % int(-a.real))
    bounds = [(k0, min(k0 + BLOCK, K)) for k0 in range(0, K, BLOCK)]
    with mp.workprec(prec):
        if workers > 1 and len(bounds) > 1:
            args = [((z.real._mpf_, z.imag._mpf_), (s.real._mpf_, s.imag._mpf_),
                     (a.real._mpf_, a.imag._mpf_), k0, k1, prec)
                    for (k0, k1) in bounds]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_block_worker, args))
            total = mpc(0)
            max_mag = mpf(0)
            for (v_t, m_t) in parts:
                total += mpc(mpf(v_t[0]), mpf(v_t[1]))
                m = mpf(m_t)
                if m > max_mag:
                    max_mag = m
        else:
            total = mpc(0)
            max_mag = mpf(0)
            for (k0, k1) in bounds:
                v, m = _block_sum(z, s, a, k0, k1)
                total += v
                if m > max_mag:
                    max_mag = m
    return total, max_mag


def sum_alternating(z, s, a, ctx):
    """Cohen-Rodriguez Villegas-Zagier acceleration for z real < 0, Re(s) > 1.

    n = ceil(1.31 * D) stages give ~(3+sqrt 8)^-n absolute accuracy for the
    alternating series sum_k (-1)^k |z|^k (k+a)^-s.
    """
    z, s, a = exactify(z), exactify(s), exactify(a)
    if z.imag != 0 or z.real >= 0:
        raise DomainError("alternating acceleration needs z real negative")
    if s.real <= 1:
        raise DomainError("alternating acceleration needs Re(s) > 1")
    digits = int(DIGITS_PER_BIT * ctx.target_bits)
    n = int(math.ceil(1.31 * digits)) + 3
    y = abs(z)
    with mp.workprec(ctx.working_bits + 16):
        d = mpmath.power(3 + mpmath.sqrt(8), n)
        d = (d + 1 / d) / 2
        b = mpf(-1)
        c = -d
        acc = mpc(0)
        yk = mpf(1)
        for k in range(n):
            c = b - c
            acc += c * yk * mpmath.power(k + a, -s)
            b = (k + n) * (k - n) * b / ((k + mpf(0.5)) * (k + 1))
            yk *= y
        val = acc / d
    return round_to(val, ctx.working_bits)


def alternating_eligible(z, s, K_hat, prec_bits):
    """Activation rule: z real negative, Re(s) > 1, K_hat > 1.2*[1.31 D]."""
    z, s = mpc(z), mpc(s)
    if z.imag != 0 or z.real >= 0 or s.real <= 1:
        return False
    digits = int(DIGITS_PER_BIT * prec_bits)
    return K_hat > 1.2 * float_nint(1.31 * digits)


def lseries_eval(z, s, a, ctx, workers=1):
    """Full L-series evaluation with working-precision and cancellation control."""
    ensure_finite(z, s, a)
    z, s, a = exactify(z), exactify(s), exactify(a)
    if abs(z) >= 1:
        raise DomainError("L-series needs |z| < 1")
    P = ctx.target_bits
    if z == 0:
        with mp.workprec(ctx.working_bits):
            val = mpmath.power(a, -s)
        diag = Diagnostics(method=LSERIES, working_prec=ctx.working_bits,
                           n_terms=1)
        return EvalResult(round_to(val, P), mpf(2) ** (-P) * abs(val),
                          LSERIES, diag)

    # working precision per the cancellation heuristics
    if s.real < 0:
        work = P + P // 3 + float_nint(-s.real) + ctx.guard_bits
    else:
        work = P + ctx.guard_bits
    k_hat = khat(z, s, a, P) + 3
    use_alt = alternating_eligible(z, s, k_hat, P)

    retries = 0
    while True:
        wctx = PrecisionContext(P, work, ctx.guard_bits)
        if use_alt:
            val = sum_alternating(z, s, a, wctx)
            max_mag = abs(val)
            method = ALTERNATING
            err = mpf(2) ** (-P)
            k_used = int(math.ceil(1.31 * int(DIGITS_PER_BIT * P))) + 3
        else:
            method = LSERIES
            par = workers if (workers > 1 and
                              (k_hat > PARALLEL_MIN_TERMS or P >= PARALLEL_MIN_PREC)) else 1
            val, max_mag = sum_blocks(z, s, a, k_hat, wctx, workers=par)
            k_used = k_hat
            with mp.workprec(work):
                err = series_remainder_bound(z, s, a, k_used)
                # top-up if the certified bound misses the absolute target
                target = mpf(2) ** (-P)
                while err > target and k_used < KHAT_HARD_CAP:
                    add = max(16, k_used // 8)
                    extra, m2 = sum_blocks(z, s, a, k_used + add, wctx, workers=1)
                    # recompute full prefix to keep the fixed-block contract
                    val, max_mag = extra, max(max_mag, m2)
                    k_used += add
                    err = series_remainder_bound(z, s, a, k_used)
        lost = cancellation_bits(max_mag, abs(val)) if abs(val) > 0 else 0
        if lost <= work - P - 4 or retries >= 4:
            break
        work += lost + 10
        retries += 1

    with mp.workprec(work):
        scale = max_mag if max_mag > 0 else abs(val)
        round_err = scale * mpf(2) ** (-work) * (k_used + 4)
        total_err = err + abs(val) * mpf(2) ** (-P) + round_err
    diag = Diagnostics(method=method, working_prec=work, n_terms=k_used,
                       retries=retries, cancellation_bits=lost)
    return EvalResult(round_to(val, P), total_err, method, diag)
