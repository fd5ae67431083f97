"""Euler-Maclaurin evaluation Phi = S + I + T + R.

S is the truncated defining series, I the incomplete-gamma integral term,
T the Bernoulli tail evaluated through a two-term holonomic recurrence, and
R the remainder controlled either by the rigorous regularized-gamma bound
or, for large M, by cheap asymptotic estimates.  Convergence of the tail
requires |log z| < 2pi (ratio test).
"""

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf, mpc

import mpmath.libmp

from .errors import ConvergenceError, DomainError, PoleError
from .numerics import (PrecisionContext, cancellation_bits, ensure_finite,
                       exactify, float_nint, is_nonpositive_int,
                       nearest_int, round_to)
from .result import EULER_MACLAURIN, Diagnostics, EvalResult
from .lseries import sum_blocks
from .special import (bernoulli_mpf, reg_q_sequence, upper_gamma,
                      upper_gamma_sequence)

# Above this M the rigorous bound series gets expensive; estimates plus a
# fixed safety margin take over.
BOUND_MAX_M = 512
ESTIMATE_MARGIN_BITS = 16

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class EMConfig:
    n_terms: int        # series split N
    m_terms: int        # Bernoulli terms M
    tag: str            # 'H' heuristic or 'A' asymptotic M selection
    prec_bits: int      # precision the heuristics were evaluated at

    def __iter__(self):
        yield self.n_terms
        yield self.m_terms
        yield self.tag


def select_nm(z, s, a, prec_bits):
    """(N, M, tag) heuristics at a given working precision.

    N = floor(D/3) decimal-digit based (N = 0 for dominant Re(a));
    M = N + floor(P/3) below 500 bits, the asymptotic tail-term estimate
    above.  The choice reflects the precision the evaluation loop actually
    runs at, so callers pass their working precision.
    """
    z, s, a = mpc(z), mpc(s), mpc(a)
    with mp.workprec(64):
        L = mpmath.log(z)
        if abs(L) >= TWO_PI:
            raise DomainError("Euler-Maclaurin needs |log z| < 2*pi")
    digits = mpmath.libmp.prec_to_dps(prec_bits)
    n = digits // 3
    if a.real > abs(s.real) + abs(z.real) + digits:
        n = 0
    # the tail/bound hypotheses need Re(a) + N > 0
    if a.real + n <= 0:
        n = int(math.floor(-a.real)) + 1
    if prec_bits < 500:
        m = n + prec_bits // 3
        tag = "H"
    else:
        with mp.workprec(64):
            num = mpmath.log(mpf(2) ** (-prec_bits - 1) * L)
            den = mpmath.log(2 * mp.pi) - mpmath.log(L)
            m = nearest_int(abs(num / den) / 2)
        tag = "A"
    return EMConfig(n, max(m, 1), tag, prec_bits)


def em_integral_term(z, s, a, N):
    """Integral term (-log z)^(s-1) z^-a Gamma(1-s, -(a+N) log z).

    Returns (value, gamma_value) so the error bound can reuse the
    incomplete gamma.  Runs at the ambient working precision.
    """
    z, s, a = exactify(z), exactify(s), exactify(a)
    if z == 1:
        raise PoleError("integral term undefined at z = 1 (log z = 0)")
    zz = z.real if (z.imag == 0 and z.real > 0) else z
    L = mpmath.log(zz)
    W = -(a + N) * L
    g = upper_gamma(1 - s, W)
    val = mpmath.power(-L, s - 1) * mpmath.power(z, -a) * g
    return val, g


def em_tail(z, s, a, N, M):
    """Bernoulli tail via the two-term holonomic recurrence.

    T = z^N (a+N)^-s (1/2 + sum_{k=1..M} B_2k/(2k)! (-log z)^(2k-1) T2_k);
    returns (T, max_term_magnitude, last_term_magnitude), the magnitudes
    feeding cancellation accounting and the fallback remainder estimate.
    """
    z, s, a = exactify(z), exactify(s), exactify(a)
    zz = z.real if (z.imag == 0 and z.real > 0) else z
    L = mpmath.log(zz)
    w = (a + N) * L
    if w == 0:
        raise PoleError("tail recurrence needs (a+N) log z != 0")
    p = s - w
    q = -1 / w
    t1 = mpc(1)
    t2 = 1 - s / w
    neg_l = -L
    lpow = neg_l                      # (-L)^(2k-1)
    lsq = neg_l * neg_l
    term = bernoulli_mpf(2) / 2 * lpow * t2
    acc = mpf(1) / 2 + term
    max_mag = max(mpf(1) / 2, abs(term))
    last_mag = abs(term)
    prev_mag = mpf(0)
    fact = mpf(2)                     # (2k)!
    for k in range(2, M + 1):
        t1n = (p * t2 + (2 * k - 3) * (t2 - t1)) * q
        t2n = (p * t1n + (2 * k - 2) * (t1n - t2)) * q
        t1, t2 = t1n, t2n
        fact *= (2 * k - 1) * (2 * k)
        lpow *= lsq
        term = bernoulli_mpf(2 * k) / fact * lpow * t2
        acc += term
        prev_mag = last_mag
        last_mag = abs(term)
        if last_mag > max_mag:
            max_mag = last_mag
    pref = mpmath.power(z, N) * mpmath.power(a + N, -s)
    apref = abs(pref)
    return pref * acc, apref * max_mag, apref * last_mag, apref * prev_mag


def em_tail_binomial_t2(z, s, a, N, k):
    """Reference T2_k as the explicit binomial sum (oracle for the recurrence)."""
    z, s, a = mpc(z), mpc(s), mpc(a)
    L = mpmath.log(z.real if (z.imag == 0 and z.real > 0) else z)
    w = -(a + N) * L
    acc = mpc(0)
    poch = mpc(1)
    for j in range(2 * k):
        if j > 0:
            poch *= (s + j - 1)
        acc += mpmath.binomial(2 * k - 1, j) * poch * mpmath.power(w, -j)
    return acc


def _bound_series(z, s, a, N, M, prec, gamma_init=None, init_prec=0):
    # |R| <= 4 (2pi)^-2M |C sum_k C(2M,k) Q(k+1-2M-s, W) (-L)^(2M+s-k-1) L^k|
    # with C = Gamma(1-s)/z^a; for s a positive integer the regularized form
    # degenerates and the Pochhammer x non-regularized gamma route is used.
    if init_prec < prec:
        gamma_init = None
    with mp.workprec(prec):
        z, s, a = exactify(z), exactify(s), exactify(a)
        zz = z.real if (z.imag == 0 and z.real > 0) else z
        L = mpmath.log(zz)
        W = -(a + N) * L
        neg_l = -L
        int_s = is_nonpositive_int(1 - s)
        if int_s:
            seq = upper_gamma_sequence(s, W, M, gamma_init=gamma_init)
            # weights (k+1-2M-s)_{2M-k}, built downward
            wt = [mpc(1)] * (2 * M + 1)
            for k in range(2 * M - 1, -1, -1):
                wt[k] = wt[k + 1] * (k + 1 - 2 * M - s)
            pref = mpmath.power(z, -a)
        else:
            seq = reg_q_sequence(s, W, M)
            wt = None
            pref = mpmath.gamma(1 - s) * mpmath.power(z, -a)
        total = mpc(0)
        max_mag = mpf(0)
        b = mpf(1)                     # C(2M, k)
        lp = mpmath.power(neg_l, 2 * M + s - 1)     # (-L)^(2M+s-k-1) L^k at k=0
        for k in range(2 * M + 1):
            term = b * seq[k] * lp
            if int_s:
                term *= wt[k]
            total += term
            m = abs(term)
            if m > max_mag:
                max_mag = m
            b = b * (2 * M - k) / (k + 1)
            lp = -lp                   # (-L)^(x-1) L^(k+1) = -(-L)^x L^k
        val = 4 * mpmath.power(2 * mp.pi, -2 * M) * abs(pref * total)
        lost = cancellation_bits(max_mag, abs(total)) if abs(total) > 0 else prec
    return val, lost


def em_error_bound(z, s, a, N, M, gamma_init=None, init_prec=0, prec_hint=None):
    """Rigorous Theorem-style remainder bound, cancellation-adaptive.

    Escalates its private working precision until the alternating bound
    series carries at least ~40 clean bits.
    """
    ensure_finite(z, s, a)
    with mp.workprec(64):
        if abs(mpmath.log(mpc(z))) >= TWO_PI:
            raise DomainError("bound hypotheses need |log z| < 2*pi")
    if mpc(a).real + N <= 0 or mpc(s).real + 2 * M <= 1:
        raise DomainError("bound hypotheses need Re(a)+N > 0 and Re(s)+2M > 1")
    prec = prec_hint or max(128, 2 * M)
    for _ in range(6):
        val, lost = _bound_series(z, s, a, N, M, prec,
                                  gamma_init=gamma_init, init_prec=init_prec)
        if lost <= prec - 40:
            return val
        prec = lost + 96
    raise ConvergenceError("bound evaluation would not stabilize")


def em_error_estimate(z, s, a, N, M, which="auto"):
    """Cheap order-of-magnitude estimates of |R| for large M.

    ``m1`` is valid for M > |(a+N) log z|; ``m2`` for M of the order of
    |(a+N) log z| with |s| << M.  ``auto`` picks by those regimes and
    returns None when neither applies.  Runs at 64-bit working precision in
    log scale, so astronomically small/large magnitudes are fine.
    """
    z, s, a = mpc(z), mpc(s), mpc(a)
    with mp.workprec(64):
        zz = z.real if (z.imag == 0 and z.real > 0) else z
        L = mpmath.log(zz)
        w_abs = abs((a + N) * L)
        if which == "auto":
            if M > 4 * w_abs:
                which = "m1"
            elif M > 0.25 * w_abs and abs(s) <= M / 4:
                which = "m2"
            else:
                return None
        if which == "m1":
            # 4 (2pi)^-2M |(-2M+1-s)_2M / (2M+s) (L/z)^(a+N) (a+N)^(1-2M-s)|;
            # the Pochhammer modulus by direct log product (loggamma would
            # pole for integer s)
            poch = mpf(0)
            base = -2 * M + 1 - s
            for j in range(2 * M):
                poch += mpmath.log(abs(base + j))
            lg = (poch - mpmath.log(2 * M + s)
                  + (a + N) * (mpmath.log(L) - L)
                  - (2 * M + s - 1) * mpmath.log(a + N)
                  - 2 * M * mpmath.log(2 * mp.pi) + mpmath.log(4))
            return mpmath.exp(lg.real)
        if which == "m2":
            g = upper_gamma(1 - s, -(a + N) * L)
            if g == 0:
                return mpf(0)
            lg = ((2 * M + s - 1) * mpmath.log(-L)
                  - min(s.real, 0) * mpmath.log(3)
                  - a * L - 2 * M * mpmath.log(2 * mp.pi) + mpmath.log(4)
                  + mpmath.log(g))
            return mpmath.exp(lg.real)
    raise ValueError("which must be auto, m1 or m2")


def _tail_model(z, t_last, t_prev):
    # geometric continuation of the last tail term, with the measured local
    # ratio when available (T2 growth can push it above (|L|/2pi)^2)
    with mp.workprec(64):
        q = (abs(mpmath.log(mpc(z))) / (2 * mp.pi)) ** 2
        if t_prev > 0 and t_last > 0:
            r = t_last / t_prev
            q = max(q, min(r, mpf("0.97")))
        if q >= 1:
            return mpf(t_last) * mpf(2) ** 8
        return mpf(t_last) * q / (1 - q) * mpf(2) ** 8


def _remainder_estimate(z, s, a, N, M, gamma_val, work, t_last, t_prev):
    # smallest defensible remainder estimate: the rigorous bound where its
    # hypotheses hold (it can be loose when the regularized-gamma factors
    # blow up), the asymptotic estimates, and the measured tail-term model
    z, s, a = mpc(z), mpc(s), mpc(a)
    hyp = (abs(z) < 1 and a.real + N > 0 and s.real + 2 * M > 1)
    fallback = _tail_model(z, t_last, t_prev)
    candidates = [fallback]
    if hyp:
        est = em_error_estimate(z, s, a, N, M)
        if est is not None:
            candidates.append(max(est * mpf(2) ** ESTIMATE_MARGIN_BITS,
                                  fallback))
    if hyp and M <= BOUND_MAX_M:
        try:
            bound = em_error_bound(z, s, a, N, M, gamma_init=gamma_val,
                                   init_prec=work)
            return min(bound, min(candidates))
        except (ConvergenceError, DomainError):
            pass
    return min(candidates)


def em_eval(z, s, a, ctx, workers=1):
    """Full Euler-Maclaurin evaluation with cancellation-driven retries."""
    ensure_finite(z, s, a)
    z, s, a = exactify(z), exactify(s), exactify(a)
    if z == 0:
        raise DomainError("Euler-Maclaurin needs z != 0")
    if z == 1:
        raise DomainError("z = 1 is routed to the Hurwitz-type path")
    with mp.workprec(64):
        if abs(mpmath.log(z)) >= TWO_PI:
            raise DomainError("Euler-Maclaurin needs |log z| < 2*pi")
    P = ctx.target_bits
    work = max(P + ctx.guard_bits, int(math.ceil(1.2 * P)))
    if s.real < 0:
        work += float_nint(-s.real)

    # one-shot feasibility sizing: the tail terms shrink by ~(|L|/2pi)^2 per
    # order while 2M stays below ~2pi(a+N) (past that the series turns
    # asymptotic-divergent), so the required M and supporting N are known
    # up front
    with mp.workprec(64):
        abs_l = abs(mpmath.log(z))
        q_step = (abs_l / (2 * mp.pi)) ** 2
        m_req = int(mpmath.ceil((P + 20) * mpmath.log(2) / -mpmath.log(q_step)))
        n_req = int(math.ceil(2 * m_req / (0.75 * 2 * math.pi) - a.real)) + 1
        cancel_forecast = max(0.0, float(n_req) * max(0.0, math.log2(abs(z)))) \
            if n_req > 0 else 0.0
    if cancel_forecast > 2 * P + 768:
        raise ConvergenceError(
            "forecast cancellation ~%d bits makes the formula impractical here"
            % int(cancel_forecast))

    retries = 0
    while True:
        cfg = select_nm(z, s, a, work)
        N = max(cfg.n_terms, n_req)
        M = max(cfg.m_terms, m_req)
        if a.imag == 0 and a.real <= 0 and mpmath.isint(a.real) and -a.real < N:
            raise PoleError("series part hits a + k = 0")
        wctx = PrecisionContext(P, work, ctx.guard_bits)
        with mp.workprec(work):
            bumps = 0
            while True:
                if N > 0:
                    s_val, s_max = sum_blocks(z, s, a, N, wctx,
                                              workers=workers)
                else:
                    s_val, s_max = mpc(0), mpf(0)
                i_val, gamma_val = em_integral_term(z, s, a, N)
                t_val, t_max, t_last, t_prev = em_tail(z, s, a, N, M)
                total = s_val + i_val + t_val
                target = mpf(2) ** (-P - 6) * max(abs(total), mpf(2) ** (-P))
                if bumps >= 3 or _tail_model(z, t_last, t_prev) <= target:
                    break
                # backstop for T2-factor growth the model missed
                ratio = t_last / t_prev if t_prev > 0 else mpf(0)
                if ratio < mpf("0.9"):
                    M = M + M // 2 + 8
                else:
                    N = N + N // 2 + 8
                bumps += 1
            peak = max(s_max, abs(i_val), t_max)
            lost = cancellation_bits(peak, abs(total)) if abs(total) > 0 \
                else work
        if lost <= work - P - 10 or retries >= 4:
            break
        work += lost + 10
        retries += 1
    if lost > work - P - 10:
        raise ConvergenceError("cancellation exhausted retry budget")

    rem = _remainder_estimate(z, s, a, N, M, gamma_val, work, t_last, t_prev)
    with mp.workprec(work):
        err = rem + abs(total) * mpf(2) ** (-(work - lost) + 8)
    diag = Diagnostics(method=EULER_MACLAURIN, working_prec=work,
                       n_terms=N, m_terms=M, retries=retries,
                       cancellation_bits=lost)
    value = round_to(total, P)
    if z.imag == 0 and s.imag == 0 and a.imag == 0 and z.real < 1:
        if abs(total.imag) <= err:
            value = round_to(total.real, P)
    return EvalResult(value, err, EULER_MACLAURIN, diag)
