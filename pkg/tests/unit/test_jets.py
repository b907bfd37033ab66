"""
Tests for Taylor Jets
=====================

Unit tests for core.jets module.
"""

import math

import numpy as np
import pytest

from core.errors import JetDomainError, JetMismatchError, JetOrderError
from core.jets import (
    Jet,
    basis_size,
    extract_partial,
    jet_add,
    jet_compose,
    jet_constant,
    jet_cos,
    jet_div,
    jet_einsum,
    jet_exp,
    jet_gradient,
    jet_log,
    jet_matrix_inverse,
    jet_mul,
    jet_pow,
    jet_sin,
    jet_sqrt,
    jet_stack,
    jet_variable,
    jet_variables,
    multi_indices,
    partial,
    truncate,
    values,
)


def finite_difference(f, point, i, h=1e-5):
    """Central difference of a plain function along x_i."""
    up, down = list(point), list(point)
    up[i] += h
    down[i] -= h
    return (f(up) - f(down)) / (2 * h)


class TestBasis:
    """Tests for the coefficient layout."""

    def test_basis_size(self):
        """Basis size is C(dim + order, order)."""
        assert basis_size(3, 4) == 35
        assert basis_size(1, 5) == 6

    def test_multi_indices_graded(self):
        """Multi-indices are grouped by total degree."""
        assert multi_indices(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]

    def test_lower_order_prefix(self):
        """Lower-order multi-indices are a prefix of higher-order ones."""
        assert multi_indices(3, 5)[: basis_size(3, 2)] == multi_indices(3, 2)

    def test_wrong_coefficient_axis(self):
        """Jet rejects a coefficient axis of the wrong length."""
        with pytest.raises(JetMismatchError):
            Jet(np.zeros(4), dim=2, order=2)


class TestConstruction:
    """Tests for jet constructors."""

    def test_variable(self):
        """Coordinate jet has value x0 and unit first derivative."""
        x = jet_variable(1, 0.7, dim=3, order=3)
        assert x.value == pytest.approx(0.7)
        assert extract_partial(x, (0, 1, 0)) == pytest.approx(1.0)
        assert extract_partial(x, (1, 0, 0)) == 0.0
        assert extract_partial(x, (0, 2, 0)) == 0.0

    def test_variable_index_out_of_range(self):
        """Variable index must lie inside the chart."""
        with pytest.raises(JetMismatchError):
            jet_variable(3, 0.0, dim=3)

    def test_constant_array(self):
        """Constant jets carry tensor shape."""
        c = jet_constant(np.eye(2), dim=3, order=2)
        assert c.shape == (2, 2)
        assert c.ndim == 2
        np.testing.assert_array_equal(c.value, np.eye(2))

    def test_stack_and_index(self):
        """Stacked jets index back to their parts."""
        x, y = jet_variables((0.3, 0.7), order=3)
        v = jet_stack([x, y * y])
        assert v.shape == (2,)
        assert v[1].value == pytest.approx(0.49)
        assert extract_partial(v[1], (0, 1)) == pytest.approx(1.4)

    def test_stack_truncates_to_lowest_order(self):
        """Stacking mixed orders keeps the lower order."""
        x = jet_variable(0, 0.1, dim=2, order=4)
        y = jet_variable(1, 0.2, dim=2, order=2)
        assert jet_stack([x, y]).order == 2


class TestArithmetic:
    """Tests for ring operations and analytic functions."""

    def test_product_rule(self):
        """∂x∂y(xy) = 1 and ∂x(xy) = y."""
        x, y = jet_variables((0.3, 0.7), order=3)
        f = x * y
        assert extract_partial(f, (1, 0)) == pytest.approx(0.7)
        assert extract_partial(f, (1, 1)) == pytest.approx(1.0)
        assert extract_partial(f, (2, 0)) == 0.0

    def test_mixed_partial_of_composition(self):
        """∂x∂y exp(sin(xy)) matches the closed form."""
        x0, y0 = 0.3, 0.7
        x, y = jet_variables((x0, y0), order=3)
        f = jet_exp(jet_sin(x * y))
        s, c = math.sin(x0 * y0), math.cos(x0 * y0)
        e = math.exp(s)
        expected = e * (c * c * x0 * y0 - s * x0 * y0 + c)
        assert extract_partial(f, (1, 1)) == pytest.approx(expected, rel=1e-12)

    def test_against_finite_differences(self):
        """First derivatives of a quotient agree with central differences."""
        point = (0.2, -0.4, 0.5)
        xs = jet_variables(point, order=2)
        f = jet_cos(xs[0] * xs[1]) / (2.0 + xs[2] * xs[2])

        def plain(p):
            return math.cos(p[0] * p[1]) / (2.0 + p[2] ** 2)

        for i in range(3):
            alpha = tuple(1 if k == i else 0 for k in range(3))
            assert extract_partial(f, alpha) == pytest.approx(
                finite_difference(plain, point, i), abs=1e-8
            )

    def test_division(self):
        """∂y [x / (1 + y)] = −x / (1 + y)²."""
        x, y = jet_variables((0.4, 0.25), order=3)
        q = jet_div(x, 1.0 + y)
        assert extract_partial(q, (0, 1)) == pytest.approx(-0.4 / 1.25**2)
        assert extract_partial(q, (1, 1)) == pytest.approx(-1.0 / 1.25**2)

    def test_division_by_zero_constant_term(self):
        """Dividing by a jet vanishing at the point is a domain error."""
        x, y = jet_variables((0.0, 0.5), order=2)
        with pytest.raises(JetDomainError):
            jet_div(y, x)

    def test_division_by_zero_scalar(self):
        """Dividing by the number zero is a domain error."""
        x = jet_variable(0, 0.5, dim=1, order=2)
        with pytest.raises(JetDomainError):
            x / 0.0

    def test_log_exp_round_trip(self):
        """log(exp(f)) = f to rounding."""
        x, y = jet_variables((0.3, -0.2), order=4)
        f = x * y + jet_sin(x)
        np.testing.assert_allclose(jet_log(jet_exp(f)).coeffs, f.coeffs, atol=1e-13)

    def test_log_of_nonpositive(self):
        """log needs a positive constant term."""
        x = jet_variable(0, -0.1, dim=1, order=2)
        with pytest.raises(JetDomainError):
            jet_log(x)

    def test_integer_power(self):
        """∂³x³ = 6 and x⁻² has derivative −2x⁻³."""
        x = jet_variable(0, 0.5, dim=1, order=3)
        assert extract_partial(x**3, (3,)) == pytest.approx(6.0)
        assert extract_partial(x**-2, (1,)) == pytest.approx(-2.0 / 0.125)

    def test_integer_power_of_negative_base(self):
        """Integer powers accept negative bases."""
        x = jet_variable(0, -2.0, dim=1, order=2)
        assert (x**2).value == pytest.approx(4.0)

    def test_fractional_power_of_negative_base(self):
        """Non-integer powers need a positive base."""
        x = jet_variable(0, -2.0, dim=1, order=2)
        with pytest.raises(JetDomainError):
            jet_pow(x, 0.5)

    def test_sqrt_squared(self):
        """(√f)² = f."""
        x, y = jet_variables((0.6, 0.1), order=4)
        f = 1.0 + x * x + y
        r = jet_sqrt(f)
        np.testing.assert_allclose((r * r).coeffs, f.coeffs, atol=1e-13)

    def test_strict_operations_refuse_mixed_order(self):
        """jet_add and jet_mul refuse operands of different order."""
        a = jet_variable(0, 0.1, dim=2, order=3)
        b = jet_variable(1, 0.1, dim=2, order=4)
        with pytest.raises(JetMismatchError):
            jet_add(a, b)
        with pytest.raises(JetMismatchError):
            jet_mul(a, b)

    def test_operators_align_mixed_order(self):
        """Operators truncate to the lower order."""
        a = jet_variable(0, 0.1, dim=2, order=3)
        b = jet_variable(1, 0.1, dim=2, order=4)
        assert (a + b).order == 3
        assert (a * b).order == 3

    def test_dimension_mismatch(self):
        """Jets over different charts do not combine."""
        a = jet_variable(0, 0.1, dim=2, order=3)
        b = jet_variable(0, 0.1, dim=3, order=3)
        with pytest.raises(JetMismatchError):
            a + b

    def test_higher_order_consistent(self):
        """Low-order coefficients do not depend on the order carried."""
        def build(order):
            x, y = jet_variables((0.2, 0.3), order=order)
            return jet_log(1.0 + x * y + x) / (2.0 + y)

        low, high = build(3), build(6)
        np.testing.assert_allclose(truncate(high, 3).coeffs, low.coeffs, atol=1e-15)


class TestDerivatives:
    """Tests for partial derivatives and truncation."""

    def test_partial_lowers_order(self):
        """∂(x²)/∂x = 2x as an order-(k−1) jet."""
        x = jet_variable(0, 0.3, dim=1, order=3)
        d = partial(x * x, 0)
        assert d.order == 2
        assert d.value == pytest.approx(0.6)
        assert extract_partial(d, (1,)) == pytest.approx(2.0)

    def test_gradient_with_time_axis(self):
        """A None axis contributes a zero row."""
        x, y = jet_variables((0.3, 0.7), order=2)
        grad = jet_gradient(x * y, (0, 1, None))
        np.testing.assert_allclose(grad.value, [0.7, 0.3, 0.0])

    def test_extract_beyond_order(self):
        """Derivatives beyond the jet order are refused."""
        x = jet_variable(0, 0.3, dim=2, order=2)
        with pytest.raises(JetOrderError):
            extract_partial(x, (2, 1))

    def test_extract_wrong_length(self):
        """Multi-index length must match the chart dimension."""
        x = jet_variable(0, 0.3, dim=2, order=2)
        with pytest.raises(JetMismatchError):
            extract_partial(x, (1,))

    def test_partial_of_order_zero(self):
        """Order-0 jets cannot be differentiated."""
        c = jet_constant(1.0, dim=2, order=0)
        with pytest.raises(JetOrderError):
            partial(c, 0)

    def test_truncate_cannot_raise(self):
        """Truncation only lowers the order."""
        x = jet_variable(0, 0.3, dim=2, order=2)
        with pytest.raises(JetOrderError):
            truncate(x, 3)


class TestContractions:
    """Tests for einsum, matrix inverse and composition."""

    def _matrix(self, point=(0.2, -0.1), order=3):
        x, y = jet_variables(point, order=order)
        return jet_stack(
            [jet_stack([2.0 + x * y, jet_sin(x)]), jet_stack([jet_sin(x), 1.0 + y * y])]
        )

    def test_einsum_matches_product(self):
        """Contracting jets equals the elementwise products summed."""
        a = self._matrix()
        trace_sq = jet_einsum("ij,ji->", a, a)
        direct = a[0, 0] * a[0, 0] + 2.0 * a[0, 1] * a[1, 0] + a[1, 1] * a[1, 1]
        np.testing.assert_allclose(trace_sq.coeffs, direct.coeffs, atol=1e-14)

    def test_einsum_with_constant_array(self):
        """Constant arrays contract like order-0 data."""
        a = self._matrix()
        out = jet_einsum("ij,j->i", a, np.array([1.0, 0.0]))
        np.testing.assert_allclose(out.coeffs, a[:, 0].coeffs)

    def test_matrix_inverse(self):
        """A⁻¹A is the identity jet."""
        a = self._matrix()
        ident = jet_einsum("ij,jk->ik", jet_matrix_inverse(a), a)
        expected = jet_constant(np.eye(2), dim=2, order=3)
        np.testing.assert_allclose(ident.coeffs, expected.coeffs, atol=1e-13)

    def test_singular_matrix(self):
        """Singular matrices are a domain error."""
        z = jet_constant(np.zeros((2, 2)), dim=2, order=2)
        with pytest.raises(JetDomainError):
            jet_matrix_inverse(z)

    def test_compose(self):
        """exp composed with (x + y) equals exp(x + y)."""
        x, y = jet_variables((0.2, 0.5), order=4)
        inner = x + y
        outer = jet_exp(jet_variable(0, inner.value, dim=1, order=4))
        composed = jet_compose(outer, [inner])
        np.testing.assert_allclose(composed.coeffs, jet_exp(inner).coeffs, atol=1e-13)

    def test_compose_wrong_arity(self):
        """Composition needs one inner jet per outer variable."""
        x, y = jet_variables((0.2, 0.5), order=2)
        outer = jet_variable(0, 0.0, dim=2, order=2)
        with pytest.raises(JetMismatchError):
            jet_compose(outer, [x])

    def test_values(self):
        """values() returns order-0 arrays for jets and numbers alike."""
        a = self._matrix()
        assert values(a).shape == (2, 2)
        assert values(2.5) == pytest.approx(2.5)
