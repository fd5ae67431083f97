"""Uniform asymptotic expansion and the large-z expansion.

The uniform expansion works off the saddle mu = s/a and sums Eulerian and
Laguerre-type polynomial products; the large-z expansion sums Pochhammer-
weighted coefficients c_k(u), u = log(z)/(2pi), built from peak polynomials
in coth/csch/sech of pi*u.  Truncation selection runs in machine floats on
log-magnitude models, then the selected number of working-precision terms
is summed.
"""

import cmath
import math

import mpmath
from mpmath import mp, mpf, mpc

from .errors import (BoundInvalidError, DomainError, PoleError,
                     PrecisionUnreachableError)
from .numerics import (cancellation_bits, ensure_finite, exactify,
                       float_nint, round_to)
from .polynomials import (eulerian_all, eulerian_bound_log, eulerian_ml_mag_log,
                          peak_poly, pk_all, pk_bound_log)
from .result import (LARGE_Z_ASYMPTOTIC, UNIFORM_ASYMPTOTIC, Diagnostics,
                     EvalResult)
from .special import upper_gamma

UAE_K_CAP = 20000
LARGEZ_K_CAP = 200000


# -- uniform asymptotic expansion ---------------------------------------------

def _uae_ratio(z, s, a, k):
    # validated estimate of |t_{k+1}/t_k|: (s+k) / (a (mu - log z))
    mu = s / a
    return abs((s + k) / (a * (mu - cmath.log(z))))


def uae_kmax(z, s, a):
    """Truncation ceiling of the uniform expansion: ratio-1 crossing index."""
    z, s, a = complex(z), complex(s), complex(a)
    if z in (0, 1):
        raise DomainError("kmax needs z outside {0, 1}")
    mu = s / a
    return int(math.floor(abs(abs(a * (mu - cmath.log(z))) - abs(s))))


def uae_term_log(z, s, a, k):
    """log-magnitude model of the k-th expansion term (saddle/pole bounds)."""
    z, s, a = complex(z), complex(s), complex(a)
    mu = s / a
    em = cmath.exp(mu)
    r = z / (em - z)
    w = em / z
    return (pk_bound_log(s, k) + eulerian_ml_mag_log(w, k)
            + k * math.log(abs(r)) - math.lgamma(k + 1)
            - k * math.log(abs(a)) - (s * cmath.log(a)).real)


def uae_k_select(z, s, a, prec_bits):
    """Smallest K whose modeled tail bound reaches 2^-P relative accuracy."""
    z, s, a = complex(z), complex(s), complex(a)
    lead = -(s * cmath.log(a)).real
    target = -prec_bits * math.log(2) + lead
    kcap = min(UAE_K_CAP, max(16, 4 * uae_kmax(z, s, a)))
    for k in range(2, kcap):
        c = _uae_ratio(z, s, a, k)
        if c >= 1:
            raise PrecisionUnreachableError(
                "uniform expansion terms stop decreasing before target",
                k_needed=None, k_max=k)
        if uae_term_log(z, s, a, k) - math.log(1 - c) <= target:
            return k
    raise PrecisionUnreachableError(
        "uniform expansion cannot reach 2^-%d" % prec_bits,
        k_needed=None, k_max=kcap)


def uae_error_bound(z, s, a, K, ctx=None):
    """Geometric tail bound |pref| |t_K|/(1-C), t_K from the saddle bounds."""
    zc, sc, ac = complex(z), complex(s), complex(a)
    c = _uae_ratio(zc, sc, ac, K)
    if c >= 1:
        raise BoundInvalidError("term ratio %.3f >= 1 at K = %d" % (c, K))
    mu = sc / ac
    em = cmath.exp(mu)
    r = zc / (em - zc)
    w = em / zc
    t_log = (pk_bound_log(sc, K) + eulerian_bound_log(w, K)
             + K * math.log(abs(r)) - math.lgamma(K + 1)
             - K * math.log(abs(ac)) - (sc * cmath.log(ac)).real)
    pref_log = math.log(abs(em / (em - zc)))
    return mpmath.exp(mpf(pref_log + t_log - math.log(1 - c)))


def uae_eval(z, s, a, ctx):
    """Uniform asymptotic evaluation for Re(a) > 0, z outside [1, oo)."""
    ensure_finite(z, s, a)
    z, s, a = exactify(z), exactify(s), exactify(a)
    if a.real <= 0:
        raise DomainError("uniform expansion needs Re(a) > 0")
    if z.imag == 0 and z.real >= 1:
        raise DomainError("uniform expansion needs z outside [1, oo)")
    P = ctx.target_bits
    K = uae_k_select(z, s, a, P)
    work = P + 32 + K
    with mp.workprec(work):
        mu = s / a
        em = mpmath.exp(mu)
        if em == z:
            raise DomainError("degenerate saddle: e^(s/a) = z")
        r = z / (em - z)
        w = em / z
        A = eulerian_all(w, K - 1)
        Pk = pk_all(s, K - 1)
        pref = em / (em - z)
        acc = mpmath.power(a, -s)
        max_mag = abs(acc)
        fact = mpf(2)
        rk = r * r
        apow = mpmath.power(a, -s - 2)
        inv_a = 1 / a
        for k in range(2, K):
            term = (-1) ** k * Pk[k] / fact * rk * A[k] * apow
            acc += term
            m = abs(term)
            if m > max_mag:
                max_mag = m
            fact *= (k + 1)
            rk *= r
            apow *= inv_a
        val = pref * acc
        lost = cancellation_bits(max_mag, abs(acc)) if abs(acc) > 0 else work
    err = uae_error_bound(z, s, a, K) + abs(val) * mpf(2) ** (-(work - lost) + 8)
    best_effort = bool(err > abs(val) * mpf(2) ** (-P + 2) and abs(val) > 0)
    diag = Diagnostics(method=UNIFORM_ASYMPTOTIC, working_prec=work,
                       k_terms=K, cancellation_bits=lost,
                       best_effort=best_effort)
    value = round_to(val, P)
    if z.imag == 0 and s.imag == 0 and a.imag == 0 and z.real < 1 \
            and abs(val.imag) <= err:
        value = round_to(val.real, P)
    return EvalResult(value, err, UNIFORM_ASYMPTOTIC, diag)


# -- large-z expansion ---------------------------------------------------------

def largez_kmax(z, s, a):
    """Optimal-truncation ceiling |a (2pi - i log z) - s| of the large-z series."""
    z, s, a = complex(z), complex(s), complex(a)
    if z == 0:
        raise DomainError("kmax needs z != 0")
    return int(math.floor(abs(a * (2 * math.pi - 1j * cmath.log(z)) - s)))


def _largez_term_log(s, k, den_log):
    # |t_k| model: |(s)_k| / (|a| 2pi |1-iu|)^k; Pochhammer via log products
    acc = 0.0
    sc = complex(s)
    for j in range(k):
        acc += math.log(abs(sc + j))
    return acc - k * den_log


def largez_k(z, s, a, prec_bits):
    """(K, K_max) for the large-z expansion at a target bit precision.

    The Lambert-W seed (scaled by 1.2) is refined by a linear search on the
    term-magnitude model |(s)_k|/(|a| 2pi |1-iu|)^k with a small guard.
    A K above K_max signals the precision is unreachable.
    """
    zc, sc, ac = complex(z), complex(s), complex(a)
    if zc == 0 or cmath.log(zc) == 0:
        raise DomainError("large-z expansion needs log z != 0")
    k_max = largez_kmax(zc, sc, ac)
    L = cmath.log(zc)
    u = L / (2 * math.pi)
    den_log = (math.log(abs(ac)) + math.log(2 * math.pi)
               + math.log(abs(1 - 1j * u)))
    phi = -math.log(2) * prec_bits - cmath.log(1 + abs(sc))
    seed = None
    if sc != -1:
        with mp.workprec(64):
            try:
                wm1 = mpmath.lambertw(mpc(phi / (ac * 2 * mp.pi * L)), -1)
                seed = int(round(1.2 * abs(phi / complex(wm1))))
            except (ValueError, ZeroDivisionError):
                seed = None
    # linear search on the model (5 guard bits), walking the running
    # Pochhammer log; terms reach their minimum near k_max, so searching
    # past that means the target cannot be met
    target = -(prec_bits + 5) * math.log(2)
    cap = min(LARGEZ_K_CAP, max(16, int(1.5 * k_max) + 16))
    best_k = 1
    best_log = 0.0
    acc = 0.0
    k = 0
    while k < cap:
        k += 1
        acc += math.log(abs(sc + k - 1))
        t_log = acc - k * den_log
        if t_log <= target:
            return k, k_max
        if t_log < best_log:
            best_log, best_k = t_log, k
    if seed is not None and seed > cap:
        return max(seed, cap), k_max
    return cap, k_max


def largez_coeff(k, u):
    """c_k(u) = 1/u^(k+1) - pi^(k+1)/k! coth(pi u)^(k-1) csch(pi u)^2 P_k(sech(pi u)^2).

    Runs at the ambient working precision; pole error on sinh(pi u) = 0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    u = mpc(u)
    if u == 0:
        raise PoleError("c_k undefined at u = 0")
    if u.imag == 0:
        u = u.real
    piu = mp.pi * u
    sh = mpmath.sinh(piu)
    if sh == 0:
        raise PoleError("csch pole at pi*u multiple of i*pi")
    ch = mpmath.cosh(piu)
    ct = ch / sh
    cs2 = 1 / (sh * sh)
    sech2 = 1 / (ch * ch)
    pk = peak_poly(k, sech2)
    return (mpmath.power(u, -(k + 1))
            - mpmath.power(mp.pi, k + 1) / mpmath.factorial(k)
            * mpmath.power(ct, k - 1) * cs2 * pk)


def largez_eval(z, s, a, ctx):
    """Large-z asymptotic evaluation for Re(a) > 0, log z != 0."""
    ensure_finite(z, s, a)
    z, s, a = exactify(z), exactify(s), exactify(a)
    if a.real <= 0:
        raise DomainError("large-z expansion needs Re(a) > 0")
    if z == 0 or z == 1:
        raise DomainError("large-z expansion needs log z != 0")
    P = ctx.target_bits
    K, k_max = largez_k(z, s, a, P)
    if K > k_max:
        raise PrecisionUnreachableError(
            "large-z expansion reaches only ~%d of %d required terms"
            % (k_max, K), k_needed=K, k_max=k_max)
    with mp.workprec(64):
        u_small_penalty = int(max(0, -mpmath.mag(mpmath.log(z) / (2 * mp.pi)))) * (K + 1)
    work = P + 40 + u_small_penalty
    with mp.workprec(work):
        zz = z.real if (z.imag == 0 and z.real > 0) else z
        L = mpmath.log(zz)
        u = L / (2 * mp.pi)
        a_ms = mpmath.power(a, -s)
        head = a_ms / 2 \
            + mpmath.power(-L, s - 1) * mpmath.power(z, -a) * upper_gamma(1 - s, -a * L)
        head += a_ms / 2 * (2 / L - mpmath.coth(L / 2))
        piu = mp.pi * u
        sh = mpmath.sinh(piu)
        if sh == 0:
            raise PoleError("csch pole: log z a nonzero multiple of 2*pi*i")
        ch = mpmath.cosh(piu)
        ct = ch / sh
        cs2 = 1 / (sh * sh)
        sech2 = 1 / (ch * ch)
        ct_pow = mpc(1)                  # coth^(k-1)
        u_pow = 1 / (u * u)              # u^-(k+1)
        inv_u = 1 / u
        pi_pow = mp.pi * mp.pi           # pi^(k+1)
        fact = mpf(1)
        poch = mpc(1)
        apow = 1 / a
        inv_a = 1 / a
        acc = mpc(0)
        max_mag = abs(head)
        two_pi = 2 * mp.pi
        tp_pow = two_pi * two_pi         # (2pi)^(k+1)
        for k in range(1, K + 1):
            poch = poch * (s + k - 1)
            if k > 1:
                fact *= k
                ct_pow *= ct
            pk = peak_poly(k, sech2)
            ck = u_pow - pi_pow / fact * ct_pow * cs2 * pk
            term = a_ms * poch * apow / tp_pow * ck
            acc += term
            m = abs(term)
            if m > max_mag:
                max_mag = m
            u_pow *= inv_u
            pi_pow *= mp.pi
            tp_pow *= two_pi
            apow *= inv_a
        val = head + acc
        lost = cancellation_bits(max_mag, abs(val)) if abs(val) > 0 else work
        # error: first omitted model term over (1 - ratio) plus rounding
        u_c = complex(u)
        den_log = (math.log(abs(complex(a))) + math.log(2 * math.pi)
                   + math.log(abs(1 - 1j * u_c)))
        t_next = _largez_term_log(complex(s), K + 1, den_log) \
            - (complex(s) * cmath.log(complex(a))).real
        ratio = abs((complex(s) + K + 1) / (complex(a) * 2 * math.pi * (1 - 1j * u_c)))
        tail = mpmath.exp(mpf(t_next)) / max(1e-3, 1 - ratio) if ratio < 1 \
            else mpmath.exp(mpf(t_next)) * 10
        err = tail + abs(val) * mpf(2) ** (-(work - lost) + 8)
    best_effort = bool(abs(val) > 0 and err > abs(val) * mpf(2) ** (-P + 2))
    diag = Diagnostics(method=LARGE_Z_ASYMPTOTIC, working_prec=work,
                       k_terms=K, cancellation_bits=lost,
                       best_effort=best_effort)
    value = round_to(val, P)
    if z.imag == 0 and s.imag == 0 and a.imag == 0 and abs(val.imag) <= err:
        value = round_to(val.real, P)
    return EvalResult(value, err, LARGE_Z_ASYMPTOTIC, diag)
