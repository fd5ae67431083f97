"""Eulerian polynomials, peak numbers/polynomials and Laguerre-type P_k.

Three evaluation strategies exist for Eulerian polynomials A_k(z):

* ``eulerian_all``   - the binomial recurrence, O(k^2), best when the whole
  sequence A_0..A_kmax is needed (both asymptotic expansions need that);
* ``eulerian_series``  - the polylogarithm power series, convergent for
  |z| < 1, used as a cross-check;
* ``eulerian_mittag_leffler`` - the pole expansion, fastest for one isolated
  large k.

Saddle-point magnitude bounds for A_k and P_k drive truncation selection in
the asymptotic expansions; they only need a few digits, so they run on
machine floats in log space.
"""

import cmath
import math
import threading

import mpmath
from mpmath import mp, mpf, mpc

from .errors import ConvergenceError, DomainError
from .numerics import nearest_int
from .special import lambert_w

# Triangle rows are cached up to this k; peak_poly switches to the
# functional relation with A_k beyond it.
PEAK_TRIANGLE_CACHE_MAX = 1000

_triangle_rows = [None, [1]]  # 1-indexed rows of P(k, j)
_triangle_lock = threading.Lock()


def peak_triangle(k_max):
    """Rows 1..k_max of peak numbers P(k, j), 0 <= j <= ceil(k/2)-1.

    P(k, j) = 2(j+1) P(k-1, j) + (k-2j) P(k-1, j-1), P(1, 0) = 1.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if k_max >= len(_triangle_rows):
        with _triangle_lock:
            while len(_triangle_rows) <= k_max:
                k = len(_triangle_rows)
                prev = _triangle_rows[k - 1]
                width = (k + 1) // 2
                row = []
                for j in range(width):
                    v = 0
                    if j < len(prev):
                        v += 2 * (j + 1) * prev[j]
                    if 0 <= j - 1 < len(prev):
                        v += (k - 2 * j) * prev[j - 1]
                    row.append(v)
                _triangle_rows.append(row)
    return [list(_triangle_rows[k]) for k in range(1, k_max + 1)]


def peak_row(k):
    peak_triangle(k)
    return _triangle_rows[k]


def peak_poly(k, x):
    """Peak polynomial value P_k(x) = sum_j P(k, j) x^j.

    Horner over the cached triangle row for k <= PEAK_TRIANGLE_CACHE_MAX;
    beyond that the functional relation with the Eulerian polynomial,
    P_k(4t/(1+t)^2) = 2^(k-1) (1+t)^(1-k) A_k(t), inverted through
    t = (2 - x - 2 sqrt(1-x))/x.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    x = mpc(x)
    if x == 0:
        # limit t -> 0 of the relation; equals P(k, 0) = 2^(k-1)
        return mpf(2) ** (k - 1)
    if k <= PEAK_TRIANGLE_CACHE_MAX:
        row = peak_row(k)
        acc = mpc(0)
        for c in reversed(row):
            acc = acc * x + c
        return acc.real if x.imag == 0 else acc
    if x == 1:
        return mpmath.factorial(k)
    t = (2 - x - 2 * mpmath.sqrt(1 - x)) / x
    ak = eulerian_mittag_leffler(t, k, mp.prec)
    val = mpf(2) ** (k - 1) * mpmath.power(1 + t, -(k - 1)) * ak
    return val.real if (x.imag == 0 and x.real < 1) else val


def eulerian_all(z, k_max):
    """A_0(z)..A_kmax(z) by the binomial recurrence (O(k_max^2) operations)."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    z = mpc(z)
    if z.imag == 0:
        z = z.real
    out = [mpf(1) if not isinstance(z, mpc) else mpc(1)]
    if k_max == 0:
        return out
    zm1 = z - 1
    pows = [z * 0 + 1]
    for _ in range(k_max):
        pows.append(pows[-1] * zm1)
    for k in range(1, k_max + 1):
        acc = z * 0
        b = mpf(1)  # C(k, j), updated incrementally
        for j in range(k):
            acc += b * out[j] * pows[k - 1 - j]
            b = b * (k - j) / (j + 1)
        out.append(acc)
    return out


def jstar_terms(z, k, prec_bits):
    """Terms needed by the Eulerian power series: smallest J with J^k |z|^J ~ 2^-P.

    Closed form through the -1 branch of Lambert W (complex continuation when
    the argument leaves the real branch domain).
    """
    absz = abs(mpc(z))
    if not 0 < absz < 1:
        raise DomainError("series needs 0 < |z| < 1")
    with mp.workprec(64):
        L = mpmath.log(absz)
        arg = -mpmath.power(mpf(2), mpf(-prec_bits) / k) * L / k
        try:
            w = mpmath.lambertw(arg, -1)
        except (ValueError, ZeroDivisionError):
            raise DomainError("Lambert W branch -1 failed for argument %s" % arg)
        j = nearest_int(abs((-k * w / L).real))
    return max(1, j)


def eulerian_series(z, k, prec_bits):
    """A_k(z) through the polylogarithm series, |z| != 1.

    For |z| > 1 the reflection A_k(z) = z^(k-1) A_k(1/z) is applied first.
    Powers j^k are built multiplicatively: binary exponentiation only at
    primes, one multiplication otherwise.
    """
    z = mpc(z)
    if z.imag == 0:
        z = z.real
    absz = abs(z)
    if absz == 1:
        raise DomainError("series diverges on |z| = 1")
    if k == 0:
        return mpf(1)
    if absz > 1:
        return mpmath.power(z, k - 1) * eulerian_series(1 / z, k, prec_bits)
    J = jstar_terms(z, k, prec_bits) + 2
    with mp.workprec(prec_bits + 10 + k.bit_length()):
        # smallest-prime-factor sieve for multiplicative j^k
        spf = list(range(J + 1))
        for p in range(2, int(J ** 0.5) + 1):
            if spf[p] == p:
                for q in range(p * p, J + 1, p):
                    if spf[q] == q:
                        spf[q] = p
        powk = [None] * (J + 1)
        powk[1] = mpf(1)
        acc = z * 0
        zj = z * 0 + 1
        for j in range(1, J + 1):
            zj = zj * z
            if powk[j] is None:
                p = spf[j]
                if p == j:
                    powk[j] = mpmath.power(mpf(j), k)
                else:
                    powk[j] = powk[p] * powk[j // p]
            acc += powk[j] * zj
        val = mpmath.power(1 - z, k + 1) / z * acc
    return val


def eulerian_mittag_leffler(z, k, prec_bits, max_terms=100000):
    """A_k(z) through the pole expansion of the generating function.

    A_k(z) = (z-1)^(k+1) k!/z * (1/L^(k+1) + sum_{j>=1} [(L+2pi i j)^-(k+1)
    + (L-2pi i j)^-(k+1)]) with L = log z; for real z the conjugate pairs
    collapse into a single halved real sum.
    """
    z = mpc(z)
    if z == 0 or z == 1:
        raise DomainError("pole expansion needs z outside {0, 1}")
    if k < 1:
        raise ValueError("k must be >= 1")
    real_input = z.imag == 0
    with mp.workprec(prec_bits + 20 + k.bit_length() * 2):
        L = mpmath.log(z.real) if (real_input and z.real > 0) else mpmath.log(z)
        kp1 = k + 1
        two_pi = 2 * mp.pi
        tol = mpf(2) ** (-(prec_bits + 5))
        if real_input:
            # halved forms: full sum = 2*Re(1/L^{k+1} + sum_j (L+2pi i j)^-(k+1))
            # for z > 0 the leading pole is real so Re(...) keeps one copy of it
            if z.real > 0:
                acc = mpmath.power(L, -kp1) / 2
            else:
                acc = mpmath.power(L, -kp1)
            lead = abs(acc)
            j = 1
            while j <= max_terms:
                term = mpmath.power(L + two_pi * 1j * j, -kp1)
                acc += term
                if abs(term) < tol * max(abs(acc), lead):
                    break
                j += 1
            else:
                raise ConvergenceError("pole expansion exceeded term budget")
            total = 2 * mpmath.re(acc)
            used = j
        else:
            acc = mpmath.power(L, -kp1)
            lead = abs(acc)
            j = 1
            while j <= max_terms:
                term = mpmath.power(L + two_pi * 1j * j, -kp1) \
                    + mpmath.power(L - two_pi * 1j * j, -kp1)
                acc += term
                if abs(term) < tol * max(abs(acc), lead):
                    break
                j += 1
            else:
                raise ConvergenceError("pole expansion exceeded term budget")
            total = acc
            used = j
        pref = mpmath.power(z - 1, kp1) * mpmath.factorial(k) / z
        val = pref * total
    eulerian_mittag_leffler.last_terms = used
    if real_input:
        return val.real if isinstance(val, mpc) else val
    return val


eulerian_mittag_leffler.last_terms = 0


def _wlog_complex(logx):
    # principal-ish W for huge complex arguments given log x:
    # Newton on w + log w = log x.
    w = logx - cmath.log(logx) if abs(logx) > 2.0 else complex(1.0)
    for _ in range(80):
        step = (w + cmath.log(w) - logx) / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 1e-13 * abs(w):
            break
    return w


def eulerian_bound_log(z, k):
    """log of the saddle-point bound k!|(z-1) e^phi(t0)| for |A_k(z)|."""
    if k <= 1:
        raise ValueError("bound needs k > 1")
    z = complex(z)
    if z == 1:
        raise DomainError("bound undefined at z = 1")
    # W(e^k k z) via log-space to dodge overflow; t0 = (W - k)/(z-1)
    if z.imag == 0 and z.real > 0:
        W = complex(lambert_w_logreal(k + math.log(k * z.real)))
    else:
        W = _wlog_complex(k + cmath.log(k * z))
    t0 = (W - k) / (z - 1)
    if t0 == 0:
        raise DomainError("degenerate saddle t0 = 0")
    # e^{(z-1)t0} = k z / W, so z - e^{(z-1)t0} = z (W - k)/W
    phi = -k * cmath.log(t0) - cmath.log(z * (W - k) / W)
    return math.lgamma(k + 1) + math.log(abs(z - 1)) + phi.real


def lambert_w_logreal(lx):
    # real version of _wlog_complex
    if lx <= 1.0:
        return lambert_w(math.exp(lx))
    w = lx - math.log(lx)
    for _ in range(60):
        step = (w + math.log(w) - lx) / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 1e-15 * abs(w):
            break
    return w


def eulerian_bound(z, k):
    """Saddle-point upper bound for |A_k(z)|, returned as mpf (huge ranges)."""
    return mpmath.exp(mpf(eulerian_bound_log(z, k)))


def eulerian_ml_mag_log(z, k):
    """log-magnitude estimate of A_k(z) from the leading Mittag-Leffler pole."""
    z = complex(z)
    lw = cmath.log(z)
    return (math.lgamma(k + 1) + (k + 1) * (math.log(abs(z - 1)) - math.log(abs(lw)))
            - math.log(abs(z)))


def pk_all(s, k_max):
    """P_0(s)..P_kmax(s) by the three-term recurrence P_{k+1} = k(P_k + s P_{k-1})."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    s = mpc(s)
    if s.imag == 0:
        s = s.real
    out = [s * 0 + 1]
    if k_max == 0:
        return out
    out.append(s * 0)
    for k in range(1, k_max):
        out.append(k * (out[k] + s * out[k - 1]))
    return out


def pk_bound_log(s, k):
    """log of the saddle-point bound k!|e^phi(t0)| for |P_k(s)|."""
    if k <= 1:
        raise ValueError("bound needs k > 1")
    s = complex(s)
    if s == 0 or s == 1:
        raise DomainError("bound undefined at s in {0, 1}")
    t0 = (cmath.sqrt(k * k + 4 * k * s - 2 * k + 1) + k + 1) / (2 * (1 - s))
    if t0 == 0 or t0 == 1:
        raise DomainError("degenerate saddle t0 in {0, 1}")
    phi = s * t0 / (1 - t0) + (k + s - 1) * cmath.log(1 - t0) - k * cmath.log(t0)
    return math.lgamma(k + 1) + phi.real


def pk_bound(s, k):
    """Saddle-point upper bound for |P_k(s)| as mpf."""
    return mpmath.exp(mpf(pk_bound_log(s, k)))
