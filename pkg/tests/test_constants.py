"""Unit tests for the constant evaluation layer (small prime bounds; the
P = 10^7 agreement gates live in the acceptance suite)."""

from fractions import Fraction

import pytest
from mpmath import mp, mpf

from normtorus.euler import (
    ConstantError,
    EulerProductSpec,
    c233_constants,
    gk_c0,
    kappa_truncated,
    mammo_closed_form,
    multicyclic_total_constant,
    multicyclic_wa_constant,
    sigma_identity_gap,
    unconditioned_product,
)


class TestEulerProduct:
    def test_unconditionally_convergent_product(self):
        # prod (1 - 1/p^2) = 1/zeta(2) = 6/pi^2
        spec = EulerProductSpec(factors={0: ([1, 0, -1], [1])}, P=10 ** 6)
        rep = gk_c0(spec)
        assert abs(rep.value - 6 / mp.pi ** 2) < mpf("1e-5")
        assert rep.tail_bound > 0

    def test_rejects_uncompensated_divergence(self):
        spec = EulerProductSpec(factors={0: ([1, 1], [1])}, P=10 ** 4)
        with pytest.raises(ConstantError):
            gk_c0(spec)

    def test_rejects_non_cancelling_densities(self):
        # density 1 per prime vs alpha = 2: even compensation cannot fix it
        spec = EulerProductSpec(factors={0: ([1, 1], [1])},
                                alpha=Fraction(2), P=10 ** 4, compensate=True)
        with pytest.raises(ConstantError):
            gk_c0(spec)

    def test_compensated_matches_direct_for_convergent_case(self):
        # (1 + 3/p) (1-1/p)^3 over p = 1 mod 3, compensated, P growth stable
        spec = lambda P: EulerProductSpec(
            modulus=3, factors={1: ([1, 3], [1])}, alpha=Fraction(3, 2),
            P=P, compensate=True)
        lo = gk_c0(spec(10 ** 5))
        hi = gk_c0(spec(2 * 10 ** 5))
        assert abs(lo.value - hi.value) <= lo.tail_bound + hi.tail_bound


class TestMulticyclic:
    def test_wa_equals_total_for_cyclic(self):
        a = multicyclic_total_constant(3, 1, P=10 ** 5)
        b = multicyclic_wa_constant(3, 1, P=10 ** 5)
        assert abs(a.value - b.value) < mpf("1e-30")

    def test_even_ell_rejected(self):
        with pytest.raises(ConstantError):
            multicyclic_total_constant(2, 2, P=10 ** 4)

    def test_two_routes_agree_at_small_P(self):
        raw = multicyclic_total_constant(3, 2, P=10 ** 6)
        closed = mammo_closed_form(P=10 ** 6)
        assert abs(raw.value - closed.value) <= \
            mpf("1e-8") + raw.tail_bound + closed.tail_bound


class TestKappa:
    def test_identity_gap(self):
        assert sigma_identity_gap() < mpf("1e-12")

    def test_monotone_in_height_with_shrinking_tail(self, norm):
        reports = [kappa_truncated(H, P=10 ** 5, norm=norm)
                   for H in (10 ** 13, 10 ** 15, 10 ** 17)]
        values = [r.value for r in reports]
        tails = [r.tail_bound for r in reports]
        assert values == sorted(values)
        assert tails == sorted(tails, reverse=True)
        assert all(t > 0 for t in tails)

    def test_conditioned_below_unconditioned(self, norm):
        rep = kappa_truncated(10 ** 17, P=10 ** 5, norm=norm)
        ep, _tail = unconditioned_product(10 ** 5)
        assert 0 < rep.value < ep

    def test_unconditioned_tail_certifies_doubling(self):
        v1, t1 = unconditioned_product(10 ** 5)
        v2, t2 = unconditioned_product(4 * 10 ** 5)
        assert abs(v2 - v1) <= t1
        assert t2 < t1

    def test_c233_shape(self, norm):
        out = c233_constants(H=10 ** 15, P=10 ** 5)
        assert 0 < out["proportion"].value < 1
        assert abs(out["wa_leading"].value / out["total_leading"].value
                   - out["proportion"].value) < mpf("1e-25")
