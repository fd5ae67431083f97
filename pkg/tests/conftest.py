"""Shared test helpers: independent reference evaluations and seeded RNG."""

import random

import mpmath
import pytest
from mpmath import mp, mpf, mpc


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def ref_phi_series(z, s, a, prec, max_terms=2_000_000):
    """Plain term-by-term defining series at |z| < 1 (independent reference)."""
    with mp.workprec(prec + 20):
        z, s, a = mpc(z), mpc(s), mpc(a)
        tot = mpc(0)
        k = 0
        tol = mpf(2) ** (-prec - 10)
        while k < max_terms:
            t = mpmath.power(z, k) * mpmath.power(k + a, -s)
            tot += t
            k += 1
            if k > 4 and abs(t) < tol * max(mpf(1), abs(tot)):
                break
        return +tot


def ref_phi_hermite(z, s, a, prec):
    """Segmented mpmath.quad of the Hermite representation (any |z|, Re a > 0)."""
    with mp.workprec(prec + 40):
        z, s, a = mpc(z), mpc(s), mpc(a)
        zz = z.real if (z.imag == 0 and z.real > 0) else z
        L = mpmath.log(zz) if z != 1 else mpf(0)
        if z == 1:
            head = mpmath.power(a, -s) / 2 + mpmath.power(a, 1 - s) / (s - 1)
        else:
            head = mpmath.power(a, -s) / 2 \
                + mpmath.power(-L, s - 1) * mpmath.power(z, -a) \
                * mpmath.gammainc(1 - s, -a * L, mp.inf)

        def f(t):
            return mpmath.sin(s * mpmath.atan(t / a) - t * L) \
                / (mpmath.power(a * a + t * t, s / 2)
                   * mpmath.expm1(2 * mp.pi * t))
        pts = [0, mpf(1) / 2, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, mp.inf]
        i = mpmath.quad(f, pts, maxdegree=10)
        return +(head + 2 * i)


def ref_phi(z, s, a, prec):
    """Independent reference: series inside the disk, Hermite quad otherwise."""
    if abs(mpc(z)) < mpf("0.99"):
        return ref_phi_series(z, s, a, prec)
    return ref_phi_hermite(z, s, a, prec)


def absdiff(x, y, prec=700):
    """|x - y| computed at high precision (mpc() at 53 bits would re-round)."""
    with mp.workprec(prec):
        return abs(mpc(x) - mpc(y))


def agrees(x, y, tol):
    return absdiff(x, y) <= tol


def rel_close(x, y, rel):
    with mp.workprec(700):
        x, y = mpc(x), mpc(y)
        scale = max(abs(x), abs(y))
        return scale == 0 or abs(x - y) <= rel * scale
