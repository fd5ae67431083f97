"""Precision bookkeeping and elementary complex arithmetic helpers.

All arithmetic is delegated to mpmath (mpf/mpc carry their mantissas at the
precision they were produced with).  Everything here follows one branch
convention: principal logarithm with Im(log z) in (-pi, pi], and powers
w**c = exp(c*log w).  A negative real argument therefore gets Im(log) = +pi,
i.e. continuity from above, which makes quantities like (-log z)**(s-1)
deterministic when z lies on the real interval (1, oo).
"""

import math
from dataclasses import dataclass, field

from mpmath import mp, mpf, mpc
import mpmath

from .errors import DomainError, PoleError

# Sentinel returned by cancellation_bits when the result magnitude is zero.
TOTAL_CANCELLATION = 1 << 62

# Decimal/binary conversion factor used for display digit counts.
DIGITS_PER_BIT = 0.301


@dataclass(frozen=True)
class PrecisionContext:
    """Target precision, working precision and guard bits for one evaluation."""

    target_bits: int
    working_bits: int
    guard_bits: int = 20

    def __post_init__(self):
        if self.target_bits < 2:
            raise ValueError("target precision must be at least 2 bits")
        if self.working_bits < self.target_bits:
            raise ValueError("working precision below target precision")
        if self.guard_bits < 0:
            raise ValueError("guard bits must be non-negative")

    @property
    def digits(self):
        """Decimal digits matching the target precision, floor(0.301*P)."""
        return int(DIGITS_PER_BIT * self.target_bits)

    @classmethod
    def for_target(cls, target_bits, guard_bits=20):
        return cls(target_bits, target_bits + guard_bits, guard_bits)

    def escalated(self, extra_bits):
        """A copy with the working precision raised by ``extra_bits``."""
        return PrecisionContext(
            self.target_bits, self.working_bits + int(extra_bits), self.guard_bits
        )


def working_digits(prec_bits):
    """mpmath's decimal-digit equivalent of a binary precision."""
    return mpmath.libmp.prec_to_dps(prec_bits)


def to_mpc(x):
    """Convert a number or a (re, im) pair into an mpc at current precision."""
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return mpc(mpf(str(x[0])), mpf(str(x[1])))
    if isinstance(x, str):
        return mpc(mpf(x))
    return mpc(x)


def exactify(x):
    """Normalize to mpf/mpc without losing precision the input already has.

    mpc(x) would re-round an existing mpf/mpc to the ambient precision;
    existing mpmath numbers pass through untouched, machine numbers convert
    exactly, big integers get enough bits.
    """
    if isinstance(x, (mpf, mpc)):
        return x
    if isinstance(x, float):
        return mpf(x)
    if isinstance(x, int):
        with mp.workprec(max(mp.prec, x.bit_length() + 8)):
            return mpf(x)
    if isinstance(x, complex):
        return mpc(x)
    return mpc(x)


def ensure_finite(*values):
    """Reject NaN/infinite inputs at a module boundary."""
    for v in values:
        c = mpc(v)
        for part in (c.real, c.imag):
            if mpmath.isnan(part) or mpmath.isinf(part):
                raise DomainError("non-finite input: %s" % (v,))


def round_to(x, prec_bits):
    """Round an mpf/mpc to ``prec_bits`` (the one final rounding of a result)."""
    with mp.workprec(prec_bits):
        if isinstance(x, mpc) or (hasattr(x, "imag") and x.imag != 0):
            return mpc(x.real + mpf(0), x.imag + mpf(0))
        return mpf(x) + mpf(0)


def is_nonpositive_int(x):
    """True when x is (numerically) an integer <= 0."""
    c = mpc(x)
    if c.imag != 0:
        return False
    r = c.real
    return r <= 0 and mpmath.isint(r)


# -- elementary functions with domain checks ---------------------------------
#
# Thin wrappers over mpmath at the caller's working precision; they exist to
# turn silent non-finite results into typed errors.

def log(x):
    z = mpc(x)
    if z == 0:
        raise DomainError("log(0)")
    if z.imag == 0 and z.real > 0:
        return mpmath.log(z.real)
    return mpmath.log(z)


def exp(x):
    return mpmath.exp(x)


def power(w, c):
    """Principal-branch power w**c = exp(c*log w); w = 0 allowed for Re(c) > 0."""
    wz = mpc(w)
    if wz == 0:
        cz = mpc(c)
        if cz == 0:
            return mpf(1)
        if cz.real > 0:
            return mpf(0)
        raise DomainError("0 raised to a power with non-positive real part")
    return mpmath.power(w, c)


def sinh(x):
    return mpmath.sinh(x)


def cosh(x):
    return mpmath.cosh(x)


def coth(x):
    z = mpc(x)
    s = mpmath.sinh(z)
    if s == 0:
        raise PoleError("coth pole at multiple of i*pi")
    return mpmath.cosh(z) / s


def csch(x):
    z = mpc(x)
    s = mpmath.sinh(z)
    if s == 0:
        raise PoleError("csch pole at multiple of i*pi")
    return 1 / s


def sech(x):
    c = mpmath.cosh(x)
    if c == 0:
        raise PoleError("sech pole")
    return 1 / c


def atan(x):
    return mpmath.atan(x)


def cancellation_bits(max_term_mag, result_mag):
    """Bits lost to cancellation: ceil(log2(max_term_mag / result_mag)).

    ``result_mag == 0`` signals total cancellation and returns the
    TOTAL_CANCELLATION sentinel.
    """
    mx = mpf(max_term_mag)
    rs = mpf(result_mag)
    if mx < 0 or rs < 0:
        raise ValueError("magnitudes must be non-negative")
    if rs == 0:
        return TOTAL_CANCELLATION if mx > 0 else 0
    if mx <= rs:
        return 0
    return int(mpmath.ceil(mpmath.log(mx / rs, 2)))


def mag2(x):
    """Rough log2-magnitude of an mpf/mpc (integer, safe for 0)."""
    m = mpmath.mag(abs(mpc(x)) if not isinstance(x, mpf) else abs(x))
    if m == mpmath.inf or m == -mpmath.inf:
        return None
    return int(m)


def nearest_int(x):
    """The paper-style nearest-integer [x] of a real value."""
    return int(mpmath.nint(mpf(x)))


def float_nint(x):
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))
