"""Double-exponential quadrature of the Hermite-type integral representation.

The backup evaluation route: valid for Re(a) > 0 and any z off the origin
(slowly converging as |arg z| -> 2pi would require, but that never happens
on the principal branch).  The semi-infinite transform t = exp(pi/2 sinh u)
gives doubly-exponential node decay at both ends; levels halve the step and
reuse previous nodes, and the reported error is the last inter-level
difference (conservative while refinement is still active).
"""

import os
import threading

import mpmath
from mpmath import mp, mpf, mpc

from .errors import ConvergenceError, DomainError, PoleError
from .numerics import ensure_finite, exactify, round_to
from .result import QUADRATURE, Diagnostics, EvalResult
from .special import upper_gamma

DEFAULT_MAX_LEVEL = 12

_geom_cache = {}
_geom_lock = threading.Lock()


def _max_level():
    try:
        return max(3, int(os.environ.get("LERCH_MAX_LEVEL", DEFAULT_MAX_LEVEL)))
    except ValueError:
        return DEFAULT_MAX_LEVEL


def _geometry(prec, level):
    """(u, t, w) nodes introduced at ``level`` (odd multiples of h except level 0)."""
    key = (prec, level)
    hit = _geom_cache.get(key)
    if hit is not None:
        return hit
    with mp.workprec(prec + 30):
        h = mpf(1) / (1 << level)
        pi_half = mp.pi / 2
        # |u| beyond which the left-side weight alone is below 2^-(prec+40)
        u_max = mpmath.asinh((prec + 40) * mpmath.log(2) / pi_half) + 1
        js = range(0, int(u_max / h) + 2) if level == 0 else \
            range(1, int(u_max / h) + 2, 2)
        nodes = []
        for j in js:
            for sign in ((1,) if j == 0 else (1, -1)):
                u = sign * j * h
                ex = pi_half * mpmath.sinh(u)
                t = mpmath.exp(ex)
                w = pi_half * mpmath.cosh(u) * t
                nodes.append((t, w))
    with _geom_lock:
        _geom_cache.setdefault(key, nodes)
    return _geom_cache[key]


def _refine(f, prec, max_level, target_exp, scale_hint):
    with mp.workprec(prec + 30):
        tiny = mpf(2) ** (-(prec + 30))
        scale_hint = mpf(scale_hint)
        total = None
        err = None
        scale = mpf(0)
        for level in range(max_level + 1):
            h = mpf(1) / (1 << level)
            contrib = mpc(0)
            small_run = 0
            for (t, w) in _geometry(prec, level):
                try:
                    ft = f(t)
                except (ZeroDivisionError, ValueError):
                    continue
                term = w * ft
                contrib += term
                m = abs(term)
                if m > scale:
                    scale = m
                if m < tiny * max(scale, mpf(1)):
                    small_run += 1
                    if small_run >= 12:
                        break
                else:
                    small_run = 0
            if total is None:
                total = contrib * h
                continue
            new_total = total / 2 + contrib * h
            prev_err = err
            err = abs(new_total - total)
            total = new_total
            tol = mpf(2) ** (-target_exp) * max(abs(total), scale_hint)
            # two consecutive agreements guard against aliasing on
            # oscillatory integrands
            if err <= tol and prev_err is not None and prev_err <= 256 * tol:
                return total, err, False
        if err is None:
            err = abs(total)
    return total, err, True


def de_integrate(f, ctx, max_level=None, target_exp=None, scale_hint=0):
    """Integrate f over [0, oo) by exp-sinh level refinement.

    Aims the inter-level agreement at 2^-target_exp relative to
    max(|integral|, scale_hint); err is the last inter-level difference.
    Raises ConvergenceError when max_level levels are not enough.
    """
    if max_level is None:
        max_level = _max_level()
    if target_exp is None:
        target_exp = ctx.target_bits + 10
    total, err, stalled = _refine(f, ctx.working_bits, max_level, target_exp,
                                  scale_hint)
    if stalled:
        raise ConvergenceError(
            "double-exponential refinement stalled at level %d (err ~ %s)"
            % (max_level, mpmath.nstr(err, 3)))
    return total, err


def de_integrate_best_effort(f, ctx, max_level=None, target_exp=None,
                             scale_hint=0):
    """Like de_integrate but never raises; returns (value, err, stalled)."""
    if max_level is None:
        max_level = _max_level()
    if target_exp is None:
        target_exp = ctx.target_bits + 10
    return _refine(f, ctx.working_bits, max_level, target_exp, scale_hint)


def _integrand_general(z, s, a, L):
    def f(t):
        return mpmath.sin(s * mpmath.atan(t / a) - t * L) \
            / (mpmath.power(a * a + t * t, s / 2) * mpmath.expm1(2 * mp.pi * t))
    return f


def _integrand_real_params(z, s, a, L):
    # no-trig variant for z > 0 real, s and a real:
    # kernel = a^-s Im[z^-it (1 - it/a)^-s] / (e^{2pi t} - 1)
    a_ms = mpmath.power(a, -s)

    def f(t):
        g = mpmath.power(z, -1j * t) * mpmath.power(1 - 1j * t / a, -s)
        return a_ms * g.imag / mpmath.expm1(2 * mp.pi * t)
    return f


def quad_eval(z, s, a, ctx, real_variant="auto"):
    """Hermite-type integral evaluation of the Lerch transcendent.

    Handles z = 1 through the Hurwitz-zeta form of the head term; requires
    Re(a) > 0.  A result that exhausted the refinement budget is flagged
    best-effort and carries the honest inter-level error.
    """
    ensure_finite(z, s, a)
    z, s, a = exactify(z), exactify(s), exactify(a)
    if a.real <= 0:
        raise DomainError("quadrature route needs Re(a) > 0")
    if z == 0:
        with mp.workprec(ctx.working_bits):
            val = mpmath.power(a, -s)
        diag = Diagnostics(method=QUADRATURE, working_prec=ctx.working_bits)
        return EvalResult(round_to(val, ctx.target_bits),
                          abs(val) * mpf(2) ** (-ctx.target_bits), QUADRATURE, diag)
    P = ctx.target_bits
    level = 0
    work = ctx.working_bits + 10 + 2 * _max_level()
    with mp.workprec(work):
        reals = (z.imag == 0 and s.imag == 0 and a.imag == 0)
        if z == 1:
            if s == 1:
                raise PoleError("pole at z = 1, s = 1")
            head = mpmath.power(a, -s) / 2 + mpmath.power(a, 1 - s) / (s - 1)
            L = mpf(0)
        else:
            zz = z.real if (z.imag == 0 and z.real > 0) else z
            L = mpmath.log(zz)
            head = mpmath.power(a, -s) / 2 \
                + mpmath.power(-L, s - 1) * mpmath.power(z, -a) \
                * upper_gamma(1 - s, -a * L)
        if reals and z.real > 0 and real_variant in ("auto", "real"):
            f = _integrand_real_params(z.real, s.real, a.real, L)
        else:
            f = _integrand_general(z, s, a, L)
        wctx = ctx.escalated(work - ctx.working_bits)
        ival, ierr, best_effort = de_integrate_best_effort(
            f, wctx, target_exp=P + 10, scale_hint=abs(head))
        val = head + 2 * ival
        err = 2 * ierr + abs(val) * mpf(2) ** (-work + 8)
    flags = []
    if z.imag == 0 and z.real > 1:
        flags.append("branch-cut")
    diag = Diagnostics(method=QUADRATURE, working_prec=work,
                       best_effort=best_effort, flags=flags)
    value = round_to(val, P)
    if z.imag == 0 and s.imag == 0 and a.imag == 0 and z.real <= 1 and not isinstance(val, mpf):
        # Schwarz symmetry: real data off the cut gives a real value
        if abs(val.imag) <= err:
            value = round_to(val.real, P)
    return EvalResult(value, err, QUADRATURE, diag)
