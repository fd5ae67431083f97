"""Supporting special functions.

Lambert W on the two real branches (machine precision is enough for all the
truncation-index estimates that use it), the complex upper incomplete gamma
function, the regularized-Q recurrence sequences feeding the Euler-Maclaurin
error bound, and a Bernoulli number cache.
"""

import math
import threading
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .errors import ConvergenceError, DomainError, PoleError
from .numerics import is_nonpositive_int

_INV_E = -1.0 / math.e

# Exact rationals are kept below this index; larger ones go through the
# zeta connection at the caller's working precision.
BERNOULLI_EXACT_MAX = 3000


def _halley(x, w):
    # Halley iteration for w*e^w = x on floats.
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            return w
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 1e-16 * abs(w) + 1e-300:
            return w
    return w


def lambert_w(x, branch=0):
    """Real Lambert W on branch 0 or -1, solving w*e^w = x at 53-bit precision."""
    x = float(x)
    if branch == 0:
        if x < _INV_E:
            raise DomainError("principal branch needs x >= -1/e")
        if x == 0.0:
            return 0.0
        if x > 700.0:
            return lambert_w_log(math.log(x))
        # seed: branch-point series near -1/e, log asymptote for large x
        if x < -0.25:
            p = math.sqrt(2.0 * (math.e * x + 1.0))
            w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0
        elif x < 1.0:
            w = x * (1.0 - x + 1.5 * x * x) if abs(x) < 0.3 else 0.5
        else:
            lx = math.log(x)
            w = lx - math.log(lx) if lx > 1.0 else 1.0
        return _halley(x, w)
    if branch == -1:
        if not (_INV_E <= x < 0.0):
            raise DomainError("branch -1 needs -1/e <= x < 0")
        if x == _INV_E:
            return -1.0
        if x > -0.1:
            # log-form Newton on w + log(-w) = log(-x); no underflow for tiny x
            lx = math.log(-x)
            w = lx - math.log(-lx)
            for _ in range(60):
                step = (w + math.log(-w) - lx) / (1.0 + 1.0 / w)
                w -= step
                if abs(step) <= 1e-16 * abs(w):
                    break
            return w
        p = -math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0
        return _halley(x, w)
    raise DomainError("unsupported branch %r" % (branch,))


def lambert_w_log(logx):
    """Principal-branch W(x) given log(x), for arguments too large to form.

    Solves w + log w = log x by Newton iteration; needs log x > 1.
    """
    lx = float(logx)
    if lx <= 1.0:
        return lambert_w(math.exp(lx))
    w = lx - math.log(lx)
    for _ in range(60):
        g = w + math.log(w) - lx
        step = g / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 1e-16 * abs(w):
            break
    return w


def upper_gamma(a, w):
    """Complex upper incomplete gamma Gamma(a, w) at current working precision.

    Arguments on the negative real axis follow continuity from above
    (Im -> 0+), matching the package-wide branch convention.
    """
    try:
        v = mpmath.gammainc(mpc(a) if mpc(a).imag != 0 else mpf(mpc(a).real),
                            mpc(w) if mpc(w).imag != 0 else mpf(mpc(w).real),
                            mp.inf)
    except (ValueError, ZeroDivisionError, mpmath.libmp.NoConvergence) as exc:
        raise ConvergenceError("incomplete gamma failed at a=%s w=%s: %s"
                               % (a, w, exc))
    return v


def upper_gamma_sequence(s, w, M, gamma_init=None):
    """Gamma(k+1-2M-s, w) for k = 0..2M via the downward recurrence.

    Built from Gamma(1-s, w) with
    Gamma(a-1, w) = (Gamma(a, w) - e^-w w^(a-1)) / (a - 1);
    well defined for every s with s != 0 at the last step (the callers only
    use it for positive integer s or generic complex s).
    """
    s = mpc(s)
    w = mpc(w)
    seq = [mpc(0)] * (2 * M + 1)
    g = mpc(gamma_init) if gamma_init is not None else upper_gamma(1 - s, w)
    seq[2 * M] = g
    ew = mpmath.exp(-w)
    aa = 1 - s
    wp = mpmath.power(w, aa - 1)
    inv_w = 1 / w
    for k in range(2 * M - 1, -1, -1):
        if aa == 1:
            raise PoleError("gamma recurrence step division by zero (s = 0)")
        g = (g - ew * wp) / (aa - 1)
        aa -= 1
        wp *= inv_w
        seq[k] = g
    return seq


def reg_q_sequence(s, w, M, q_init=None):
    """Regularized Q(k+1-2M-s, w) for k = 0..2M, downward from Q(1-s, w).

    Uses Q(a-1, w) = Q(a, w) - e^-w w^(a-1) / Gamma(a).  For positive integer
    s every index is a non-positive integer where Q degenerates; callers must
    take the non-regularized route (upper_gamma_sequence) there, so this
    raises PoleError.
    """
    s = mpc(s)
    if is_nonpositive_int(1 - s):
        raise PoleError("Q-sequence degenerate for positive integer s; "
                        "use upper_gamma_sequence")
    w = mpc(w)
    seq = [mpc(0)] * (2 * M + 1)
    q = mpc(q_init) if q_init is not None else \
        mpmath.gammainc(1 - s, w, mp.inf, regularized=True)
    seq[2 * M] = q
    ew = mpmath.exp(-w)
    aa = 1 - s
    wp = mpmath.power(w, aa - 1)
    inv_w = 1 / w
    rg = mpmath.rgamma(aa)
    for k in range(2 * M - 1, -1, -1):
        q = q - ew * wp * rg
        # 1/Gamma(a-1) = (a-1)/Gamma(a)
        rg = rg * (aa - 1)
        aa -= 1
        wp *= inv_w
        seq[k] = q
    return seq


class BernoulliCache:
    """Append-only cache of Bernoulli numbers.

    Exact rationals below BERNOULLI_EXACT_MAX, working-precision floats (via
    the zeta connection, which mpmath uses internally) above it.  Reads are
    lock-free on the dict; writes are idempotent.
    """

    def __init__(self):
        self._exact = {}
        self._lock = threading.Lock()

    def exact(self, n):
        if n < 0:
            raise ValueError("negative Bernoulli index")
        if n >= BERNOULLI_EXACT_MAX:
            raise ValueError("index %d beyond exact threshold" % n)
        if n % 2 == 1:
            return Fraction(0) if n != 1 else Fraction(-1, 2)
        hit = self._exact.get(n)
        if hit is not None:
            return hit
        p, q = mpmath.bernfrac(n)
        val = Fraction(int(p), int(q))
        with self._lock:
            self._exact.setdefault(n, val)
        return val

    def value(self, n):
        """B_n as an mpf/mpq-derived mpf at the current working precision."""
        if n < BERNOULLI_EXACT_MAX:
            fr = self.exact(n)
            return mpf(fr.numerator) / fr.denominator
        return mpmath.bernoulli(n)


_cache = BernoulliCache()


def bernoulli(n):
    """B_n: exact Fraction below the threshold, mpf at working precision above."""
    if n < BERNOULLI_EXACT_MAX:
        return _cache.exact(n)
    return _cache.value(n)


def bernoulli_mpf(n):
    """B_n as mpf at the current working precision."""
    return _cache.value(n)
