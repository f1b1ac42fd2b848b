"""Unit and property tests for the abelian-group layer."""

from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtorus.groups import (
    FiniteAbelianGroup,
    Subgroup,
    adm_set,
    all_alternating_forms,
    alpha,
    alpha_total,
    aut_order,
    form_value,
    restriction_is_zero,
    s_subspace,
    sha_dual_dimension,
)

GROUPS = st.sampled_from(
    [(2, 2), (3, 3), (2, 4), (4, 4), (2, 3, 3), (3, 9), (2, 2, 2), (5, 5)]
)


def _brute_restriction_zero(A, a, b):
    return all(form_value(A, f, a, b) == 0 for f in all_alternating_forms(A))


class TestArithmetic:
    def test_element_order_and_span(self):
        A = FiniteAbelianGroup([2, 4])
        assert A.element_order((1, 2)) == 2
        assert A.element_order((0, 1)) == 4
        assert len(A.span([(1, 0), (0, 1)])) == 8
        assert len(A.torsion(2)) == 4
        assert len(A.multiple(2)) == 2

    def test_rejects_non_prime_power_factors(self):
        with pytest.raises(ValueError):
            FiniteAbelianGroup([6])
        with pytest.raises(ValueError):
            FiniteAbelianGroup([])

    def test_wedge_dual_order(self):
        assert FiniteAbelianGroup([2, 2]).wedge_dual_order() == 2
        assert FiniteAbelianGroup([3, 3]).wedge_dual_order() == 3
        assert FiniteAbelianGroup([2, 3, 3]).wedge_dual_order() == 3
        assert FiniteAbelianGroup([7]).wedge_dual_order() == 1

    @given(GROUPS, st.data())
    @settings(max_examples=60, deadline=None)
    def test_add_tables_match_direct_formula(self, factors, data):
        A = FiniteAbelianGroup(list(factors))
        a = data.draw(st.sampled_from(A.elements()))
        b = data.draw(st.sampled_from(A.elements()))
        assert A.add(a, b) == tuple((x + y) % d for x, y, d in zip(a, b, A.factors))
        assert A.add(a, A.neg(a)) == A.zero
        assert A.smul(3, a) == A.add(a, A.add(a, a))


class TestRestriction:
    @given(GROUPS, st.data())
    @settings(max_examples=80, deadline=None)
    def test_closed_criterion_matches_form_evaluation(self, factors, data):
        A = FiniteAbelianGroup(list(factors))
        a = data.draw(st.sampled_from(A.elements()))
        b = data.draw(st.sampled_from(A.elements()))
        assert restriction_is_zero(A, a, b) == _brute_restriction_zero(A, a, b)

    @given(GROUPS, st.data())
    @settings(max_examples=60, deadline=None)
    def test_symmetry_and_coordinate_permutation(self, factors, data):
        A = FiniteAbelianGroup(list(factors))
        a = data.draw(st.sampled_from(A.elements()))
        b = data.draw(st.sampled_from(A.elements()))
        assert restriction_is_zero(A, a, b) == restriction_is_zero(A, b, a)
        # permuting equal factors is an automorphism and must preserve the test
        for perm in permutations(range(len(A.factors))):
            if tuple(A.factors[i] for i in perm) != A.factors:
                continue
            pa = tuple(a[i] for i in perm)
            pb = tuple(b[i] for i in perm)
            assert restriction_is_zero(A, pa, pb) == restriction_is_zero(A, a, b)


class TestAdmissible:
    def test_adm_set_is_ellA_plus_line_off_singular_subspace(self):
        for factors in ([2, 2], [3, 3], [2, 4], [3, 9], [2, 3, 3]):
            A = FiniteAbelianGroup(factors)
            S = s_subspace(A)
            for a in A.torsion(A.ell).elements:
                if a == A.zero or a in S:
                    continue
                expect = A.span(
                    [A.smul(A.ell, x) for x in A.elements()] + [a]
                ).elements
                assert adm_set(A, a).elements == expect

    def test_adm_set_rejects_bad_inputs(self):
        A = FiniteAbelianGroup([3, 3])
        with pytest.raises(ValueError):
            adm_set(A, A.zero)
        B = FiniteAbelianGroup([9])
        with pytest.raises(ValueError):
            adm_set(B, (1,))


class TestAlpha:
    @pytest.mark.parametrize("ell", [2, 3, 5])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_elementary_closed_form(self, ell, n):
        A = FiniteAbelianGroup([ell] * n)
        assert alpha(A) == Fraction(ell ** n - 1, ell ** (n - 1) * (ell - 1))

    def test_cyclic_and_mixed(self):
        for factors in ([2], [9], [5], [8]):
            assert alpha(FiniteAbelianGroup(factors)) == 1
        assert alpha(FiniteAbelianGroup([2, 3, 3])) == 1

    def test_alpha_total(self):
        assert alpha_total(FiniteAbelianGroup([3, 3])) == 4
        assert alpha_total(FiniteAbelianGroup([2, 2, 2])) == 7
        assert alpha_total(FiniteAbelianGroup([7])) == 1


class TestAut:
    def test_known_orders(self):
        assert aut_order(FiniteAbelianGroup([2])) == 1
        assert aut_order(FiniteAbelianGroup([2, 2])) == 6
        assert aut_order(FiniteAbelianGroup([3, 3])) == 48
        assert aut_order(FiniteAbelianGroup([2, 2, 2])) == 168
        assert aut_order(FiniteAbelianGroup([2, 4])) == 8
        assert aut_order(FiniteAbelianGroup([2, 3, 3])) == 48


class TestShaDual:
    def test_full_group_kills_everything(self):
        A = FiniteAbelianGroup([3, 3])
        D = A.span([(1, 0), (0, 1)])
        assert sha_dual_dimension(A, [D]) == 1

    def test_no_conditions_gives_wedge_order(self):
        A = FiniteAbelianGroup([3, 3])
        assert sha_dual_dimension(A, []) == 3
        assert sha_dual_dimension(A, [A.span([(1, 0)])]) == 3

    @given(GROUPS, st.data())
    @settings(max_examples=40, deadline=None)
    def test_order_divides_wedge_dual_order(self, factors, data):
        A = FiniteAbelianGroup(list(factors))
        gens = data.draw(
            st.lists(st.sampled_from(A.elements()), min_size=0, max_size=3)
        )
        subs = [A.span(gens)] if gens else []
        sha = sha_dual_dimension(A, subs)
        assert A.wedge_dual_order() % sha == 0
