import math

import pytest
import mpmath
from mpmath import mp, mpf, mpc

from conftest import absdiff, ref_phi_series
from lerchphi.errors import DomainError, PoleError
from lerchphi.numerics import PrecisionContext
from lerchphi.lseries import (BLOCK, alternating_eligible, khat,
                              khat_linear_search, lseries_eval,
                              series_remainder_bound, sum_alternating,
                              sum_blocks, _block_sum)


class TestKhat:
    def test_first_omitted_term(self):
        z, s, a, P = mpf(1) / 4, mpf(10) / 4, mpf(20) / 7, 64
        k = khat(z, s, a, P)
        with mp.workprec(120):
            omitted = abs(mpmath.power(z, k) * mpmath.power(k + a, -s))
            assert omitted <= mpf(2) ** (-P + 6)

    def test_against_linear_search(self, rng):
        for _ in range(100):
            z = mpc(rng.uniform(-0.9, 0.9), rng.uniform(-0.6, 0.6))
            if not 1e-3 < abs(z) <= 0.9:
                continue
            s = mpc(rng.uniform(-6, 6), rng.uniform(-3, 3))
            a = mpc(rng.uniform(0.3, 8), rng.uniform(-2, 2))
            k_est = khat(z, s, a, 64)
            k_true = khat_linear_search(z, s, a, 64)
            assert abs(k_est - k_true) <= 3 + k_true // 10

    def test_tiny_z(self):
        assert khat(mpf("1e-100"), 1, 1, 53) == 1

    def test_domain(self):
        with pytest.raises(DomainError):
            khat(mpf("1.2"), 1, 1, 53)


class TestRemainderBound:
    def test_zero_z(self):
        assert series_remainder_bound(0, 2, 1, 5) == 0

    def test_geometric_case(self):
        # s = 0 reduces to the pure geometric tail (1/2)^10 / (1 - 1/2)
        with mp.workprec(64):
            b = series_remainder_bound(mpf(1) / 2, 0, 1, 10)
            assert b == mpf(2) ** -9

    def test_dominates_true_tail(self, rng):
        with mp.workprec(80):
            for _ in range(50):
                z = mpc(rng.uniform(-0.8, 0.8), rng.uniform(-0.5, 0.5))
                if abs(z) < 1e-3:
                    continue
                s = mpc(rng.uniform(-3, 4), rng.uniform(-2, 2))
                a = mpf(rng.uniform(0.3, 5))
                K = rng.randint(3, 25)
                tail = mpc(0)
                for k in range(K, K + 2000):
                    tail += mpmath.power(z, k) * mpmath.power(k + a, -s)
                assert series_remainder_bound(z, s, a, K) >= abs(tail) * (1 - mpf(2) ** -40)


class TestSumBlocks:
    def test_single_term(self):
        ctx = PrecisionContext.for_target(64)
        with mp.workprec(ctx.working_bits):
            v, _ = sum_blocks(mpf("0.5"), mpf("2"), mpf("1.5"), 1, ctx)
            assert v == mpmath.power(mpf("1.5"), -2)

    def test_worker_determinism(self):
        ctx = PrecisionContext.for_target(113)
        z, s, a = mpf(1) / 3, mpf("1.25"), mpf("0.75")
        K = 3 * BLOCK + 17
        v1, m1 = sum_blocks(z, s, a, K, ctx, workers=1)
        v2, m2 = sum_blocks(z, s, a, K, ctx, workers=2)
        assert v1 == v2 and m1 == m2

    def test_matches_blockwise_reference(self):
        # reference re-summation with the same fixed-block term scheme
        ctx = PrecisionContext.for_target(64)
        z, s, a = mpf(1) / 4, mpf(10) / 4, mpf(20) / 7
        K = khat(z, s, a, 64)
        v, _ = sum_blocks(z, s, a, K, ctx)
        with mp.workprec(ctx.working_bits):
            ref = mpc(0)
            for k0 in range(0, K, BLOCK):
                bv, _ = _block_sum(mpc(z), mpc(s), mpc(a), k0, min(k0 + BLOCK, K))
                ref += bv
        assert v == ref

    def test_accuracy_against_plain_series(self):
        ctx = PrecisionContext.for_target(113)
        z, s, a = mpf(1) / 4, mpf(10) / 4, mpf(20) / 7
        K = khat(z, s, a, 113) + 3
        v, _ = sum_blocks(z, s, a, K, ctx)
        want = ref_phi_series(z, s, a, 150)
        assert absdiff(v, want) <= abs(want) * mpf(2) ** -110

    def test_pole_detection(self):
        ctx = PrecisionContext.for_target(64)
        with pytest.raises(PoleError):
            sum_blocks(mpf("0.5"), 2, -3, 10, ctx)


class TestAlternating:
    def test_reference_point(self):
        # z = -6/10, s = 10/4, a = 20/7 at 333 bits vs direct summation
        ctx = PrecisionContext.for_target(333)
        z, s, a = -mpf(6) / 10, mpf(10) / 4, mpf(20) / 7
        v = sum_alternating(z, s, a, ctx)
        want = ref_phi_series(z, s, a, 380)
        assert absdiff(v, want) <= mpf(2) ** (-333 + 10)

    def test_negligible_tail(self):
        ctx = PrecisionContext.for_target(113)
        z, s, a = mpf("-1e-30"), mpf("2.5"), mpf("1.5")
        v = sum_alternating(z, s, a, ctx)
        with mp.workprec(150):
            two_terms = mpmath.power(a, -s) + z * mpmath.power(1 + a, -s)
        assert absdiff(v, two_terms) <= abs(two_terms) * mpf(2) ** (-113 + 4)

    def test_random_against_series(self, rng):
        for _ in range(50):
            z = mpf(rng.uniform(-0.95, -0.5))
            s = mpf(rng.uniform(1.5, 8))
            a = mpf(rng.uniform(0.5, 5))
            ctx = PrecisionContext.for_target(64)
            v = sum_alternating(z, s, a, ctx)
            want = ref_phi_series(z, s, a, 100)
            assert absdiff(v, want) <= max(abs(want), mpf(1)) * mpf(2) ** (-64 + 10)

    def test_preconditions(self):
        ctx = PrecisionContext.for_target(64)
        with pytest.raises(DomainError):
            sum_alternating(mpf("0.5"), 3, 1, ctx)
        with pytest.raises(DomainError):
            sum_alternating(mpf("-0.5"), mpf("0.5"), 1, ctx)

    def test_eligibility_rule(self):
        assert not alternating_eligible(mpf("-0.5"), mpf("0.5"), 10 ** 6, 64)
        assert not alternating_eligible(mpf("0.5"), 3, 10 ** 6, 64)
        assert alternating_eligible(mpf("-0.9"), 3, 10 ** 6, 64)
        # K-hat below the threshold keeps plain summation
        assert not alternating_eligible(mpf("-0.9"), 3, 5, 64)


class TestLseriesEval:
    def test_z_zero_collapses(self):
        ctx = PrecisionContext.for_target(113)
        r = lseries_eval(0, mpf("2.5"), 3, ctx)
        with mp.workprec(200):
            want = mpmath.power(3, mpf("-2.5"))
        assert absdiff(r.value, want) <= abs(want) * mpf(2) ** -113

    def test_log_identity(self):
        # Phi(z, 1, 1) = -log(1-z)/z at z = 1/2
        ctx = PrecisionContext.for_target(333)
        r = lseries_eval(mpf(1) / 2, 1, 1, ctx)
        with mp.workprec(360):
            want = 2 * mpmath.log(2)
        assert absdiff(r.value, want) <= mpf(2) ** (-333 + 4)

    def test_alternating_dispatch(self):
        ctx = PrecisionContext.for_target(333)
        r = lseries_eval(-mpf(6) / 10, mpf(10) / 4, mpf(20) / 7, ctx)
        assert r.method == "alternating"
        want = ref_phi_series(-mpf(6) / 10, mpf(10) / 4, mpf(20) / 7, 380)
        assert absdiff(r.value, want) <= mpf(2) ** (-333 + 10)

    def test_divergent_input(self):
        ctx = PrecisionContext.for_target(64)
        with pytest.raises(DomainError):
            lseries_eval(mpf("1.01"), 2, 1, ctx)

    def test_shift_identity(self, rng):
        # Phi(z,s,a) = a^-s + z Phi(z,s,a+1), term-by-term from the series
        for _ in range(20):
            z = mpc(rng.uniform(-0.7, 0.7), rng.uniform(-0.5, 0.5))
            if abs(z) < 1e-3 or abs(z) > 0.9:
                continue
            s = mpc(rng.uniform(-2, 4), rng.uniform(-2, 2))
            a = mpf(rng.uniform(0.4, 4))
            ctx = PrecisionContext.for_target(80)
            with mp.workprec(160):
                a1 = a + 1
            lhs = lseries_eval(z, s, a, ctx).value
            rhs_tail = lseries_eval(z, s, a1, ctx).value
            with mp.workprec(160):
                rhs = mpmath.power(mpc(a), -mpc(s)) + mpc(z) * mpc(rhs_tail)
                scale = max(abs(mpc(lhs)), abs(rhs), mpf(1))
                assert abs(mpc(lhs) - rhs) <= scale * mpf(2) ** (-80 + 10)

    def test_error_estimate_honest(self, rng):
        for _ in range(10):
            z = mpf(rng.uniform(0.05, 0.85))
            s = mpf(rng.uniform(-2, 4))
            a = mpf(rng.uniform(0.4, 4))
            r = lseries_eval(z, s, a, PrecisionContext.for_target(64))
            hi = lseries_eval(z, s, a, PrecisionContext.for_target(150))
            assert absdiff(r.value, hi.value) <= r.error + hi.error

    def test_reported_diagnostics(self):
        r = lseries_eval(mpf("0.3"), 2, 1, PrecisionContext.for_target(64))
        d = r.diagnostics
        assert d.method == "lseries"
        assert d.working_prec >= 64
        assert d.n_terms >= 1
        assert d.retries <= 4
