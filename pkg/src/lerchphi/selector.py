"""Top-level evaluation entry point: domain checks and method dispatch.

Dispatch policy, synthesized from the per-method convergence domains:

* |z| <= 0.5            -> defining series (alternating acceleration inside);
* 0.5 < |z|, |log z| < 2pi, z != 1 -> Euler-Maclaurin;
* otherwise             -> large-z expansion when its truncation fits,
  else the uniform expansion when its bound certifies the target,
  else double-exponential quadrature (needs Re(a) > 0);
* z = 1                 -> quadrature's Hurwitz-type head (s != 1).

Failures cascade to the next applicable method; a result that cannot meet
the 2^-P target is flagged best-effort rather than silently degraded.
"""

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf, mpc

from .errors import (BoundInvalidError, ConvergenceError, DomainError,
                     LerchError, PoleError, PrecisionUnreachableError)
from .numerics import PrecisionContext, ensure_finite, exactify, round_to
from .result import (EULER_MACLAURIN, LARGE_Z_ASYMPTOTIC, LSERIES, METHODS,
                     QUADRATURE, UNIFORM_ASYMPTOTIC, Diagnostics, EvalResult)
from . import asymptotics, eulermaclaurin, lseries, quadrature

SERIES_VS_EM_CUT = 0.5
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class DomainFlags:
    pole_a: bool = False            # a is a non-positive integer
    z_one: bool = False             # z = 1 (series converges only for Re s > 1)
    z_one_pole: bool = False        # z = 1 and s = 1
    z_one_divergent: bool = False   # z = 1 and Re(s) <= 1: continuation needed
    on_cut: bool = False            # z real in (1, oo): continuation boundary
    series_divergent: bool = False  # |z| > 1: defining series diverges

    @property
    def hard_error(self):
        return self.pole_a or self.z_one_pole


def classify(z, s, a):
    """Pure domain classification of the input triple."""
    z, s, a = mpc(z), mpc(s), mpc(a)
    pole_a = (a.imag == 0 and a.real <= 0 and mpmath.isint(a.real))
    z_one = (z == 1)
    z_one_pole = z_one and s == 1
    z_one_div = z_one and s != 1 and s.real <= 1
    on_cut = (z.imag == 0 and z.real > 1)
    series_div = abs(z) > 1
    return DomainFlags(pole_a, z_one, z_one_pole, z_one_div, on_cut, series_div)


def _flag(result, name):
    if name not in result.diagnostics.flags:
        result.diagnostics.flags.append(name)
    return result


def lerch_phi(z, s, a, ctx, method=None, workers=1):
    """Evaluate the Lerch transcendent with automatic method selection.

    ``method`` forces one of the METHODS tags; otherwise the dispatch policy
    above applies.  Raises typed errors for hard poles and unsupported
    domains.
    """
    ensure_finite(z, s, a)
    z, s, a = exactify(z), exactify(s), exactify(a)
    flags = classify(z, s, a)
    if flags.pole_a:
        raise PoleError("a = %s makes a series term divide by zero" % (a,))
    if flags.z_one_pole:
        raise PoleError("pole at z = 1, s = 1")

    if method is not None:
        if method not in METHODS:
            raise ValueError("unknown method %r" % (method,))
        res = _run(method, z, s, a, ctx, workers)
    else:
        res = _dispatch(z, s, a, ctx, workers, flags)
    if flags.on_cut:
        _flag(res, "branch-cut")
    if flags.z_one_divergent:
        _flag(res, "continuation")
    return res


def _run(method, z, s, a, ctx, workers):
    if method in (LSERIES, "alternating"):
        return lseries.lseries_eval(z, s, a, ctx, workers=workers)
    if method == EULER_MACLAURIN:
        return eulermaclaurin.em_eval(z, s, a, ctx, workers=workers)
    if method == UNIFORM_ASYMPTOTIC:
        return asymptotics.uae_eval(z, s, a, ctx)
    if method == LARGE_Z_ASYMPTOTIC:
        return asymptotics.largez_eval(z, s, a, ctx)
    if method == QUADRATURE:
        return quadrature.quad_eval(z, s, a, ctx)
    raise ValueError(method)


def _dispatch(z, s, a, ctx, workers, flags):
    absz = abs(z)
    if absz <= SERIES_VS_EM_CUT:
        return lseries.lseries_eval(z, s, a, ctx, workers=workers)

    if not flags.z_one:
        with mp.workprec(64):
            logz_small = abs(mpmath.log(z)) < TWO_PI
        em_res = None
        if logz_small:
            try:
                em_res = eulermaclaurin.em_eval(z, s, a, ctx, workers=workers)
                if _met_target(em_res, ctx):
                    return em_res
            except (ConvergenceError, PoleError, DomainError):
                pass
        try:
            return _asymptotic_or_quad(z, s, a, ctx, flags)
        except DomainError:
            if em_res is not None:
                # nothing better exists; return the honest partial result
                em_res.diagnostics.best_effort = True
                return em_res
            raise
    # z = 1, s != 1: Hurwitz-type head inside the quadrature route
    return quadrature.quad_eval(z, s, a, ctx)


def _met_target(res, ctx):
    with mp.workprec(ctx.working_bits):
        scale = abs(mpc(res.value))
        floor = mpf(2) ** (-ctx.target_bits)
        return res.error <= mpf(2) ** (-ctx.target_bits + 8) * max(scale, floor)


def _asymptotic_or_quad(z, s, a, ctx, flags):
    P = ctx.target_bits
    errors = []
    lz_k = uae_k = None
    if a.real > 0:
        try:
            k, k_max = asymptotics.largez_k(z, s, a, P)
            if k <= k_max:
                lz_k = k
        except (DomainError, LerchError) as exc:
            errors.append(str(exc))
        uae_ok = not (z.imag == 0 and z.real >= 1)
        if uae_ok:
            try:
                uae_k = asymptotics.uae_k_select(z, s, a, P)
            except (PrecisionUnreachableError, DomainError) as exc:
                errors.append(str(exc))
    # prefer the smaller predicted truncation; ties go to large-z
    order = []
    if lz_k is not None and (uae_k is None or lz_k <= uae_k):
        order = [LARGE_Z_ASYMPTOTIC, UNIFORM_ASYMPTOTIC]
    elif uae_k is not None:
        order = [UNIFORM_ASYMPTOTIC, LARGE_Z_ASYMPTOTIC]
    for meth in order:
        if meth == UNIFORM_ASYMPTOTIC and uae_k is None:
            continue
        if meth == LARGE_Z_ASYMPTOTIC and lz_k is None:
            continue
        try:
            return _run(meth, z, s, a, ctx, 1)
        except (LerchError, ValueError) as exc:
            errors.append("%s: %s" % (meth, exc))
    if a.real > 0:
        try:
            return quadrature.quad_eval(z, s, a, ctx)
        except LerchError as exc:
            errors.append("quadrature: %s" % exc)
    raise DomainError("no evaluation method applies: " + "; ".join(errors)
                      if errors else "no evaluation method applies")


def evaluate(z, s, a, precision_bits=53, method=None, workers=1):
    """Library API: evaluate Phi(z, s, a) to ``precision_bits`` target bits."""
    ctx = PrecisionContext.for_target(int(precision_bits))
    return lerch_phi(z, s, a, ctx, method=method, workers=workers)
