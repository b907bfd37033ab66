"""
Tests for Field Expressions
===========================

Unit tests for core.field_expr module.
"""

import math

import numpy as np
import pytest

from core.errors import FieldExprGuardError, FieldExprSyntaxError
from core.field_expr import ONE, ZERO, JetEnv, parse_field_expr
from core.jets import extract_partial


class TestParsing:
    """Tests for parse_field_expr."""

    def test_parse_and_value(self):
        """Parsed expression evaluates to a float."""
        f = parse_field_expr("0.2*sin(0.5*x2 + 1.0)*x3")
        assert f.value((0.0, 1.0, 2.0)) == pytest.approx(0.4 * math.sin(1.5))

    def test_precedence(self):
        """Powers bind tighter than unary minus and products."""
        f = parse_field_expr("-x1^2 + 2*x1*x2")
        assert f.value((3.0, 1.0)) == pytest.approx(-9.0 + 6.0)

    def test_negative_exponent(self):
        """Signed exponents are part of the power."""
        f = parse_field_expr("(1 + x1)^-0.5")
        assert f.value((3.0,)) == pytest.approx(0.5)

    def test_radius(self):
        """r is the Euclidean radius of the chart point."""
        f = parse_field_expr("r^2")
        assert f.value((3.0, 4.0)) == pytest.approx(25.0)

    def test_render_round_trip(self):
        """Rendered text parses back to the same tree."""
        f = parse_field_expr("  0.2*sin(0.5*x2+1.0) * x3 - (x1 - 2)^2 ")
        again = parse_field_expr(f.render())
        assert again.tree == f.tree
        assert f.render() == "0.2*sin(0.5*x2 + 1)*x3 - (x1 - 2)^2"

    def test_variables_used(self):
        """variables_used counts leading chart variables."""
        assert parse_field_expr("x1 + x4").variables_used == 4
        assert parse_field_expr("r + 1").variables_used == 0

    def test_is_zero(self):
        """Only the literal zero is zero."""
        assert ZERO.is_zero
        assert not ONE.is_zero
        assert parse_field_expr("0").is_zero

    def test_scaled(self):
        """scaled multiplies the whole expression."""
        f = parse_field_expr("x1 + 1")
        assert f.scaled(3.0).value((1.0,)) == pytest.approx(6.0)
        assert f.scaled(1.0) is f


class TestSyntaxErrors:
    """Tests for FieldExprSyntaxError positions."""

    def test_unexpected_token_line_column(self):
        """Errors carry line and column of the offending token."""
        with pytest.raises(FieldExprSyntaxError) as exc_info:
            parse_field_expr("x1 +\n  * x2")
        assert exc_info.value.line == 2
        assert exc_info.value.column == 3
        assert "at line 2, column 3" in str(exc_info.value)

    def test_unexpected_character(self):
        """Unknown characters are reported where they stand."""
        with pytest.raises(FieldExprSyntaxError) as exc_info:
            parse_field_expr("x1 $ 2")
        assert exc_info.value.column == 4

    def test_unknown_name(self):
        """Only the listed functions are accepted."""
        with pytest.raises(FieldExprSyntaxError, match="Unknown name"):
            parse_field_expr("tan(x1)")

    def test_missing_parenthesis(self):
        """Unclosed parentheses are reported at the end of input."""
        with pytest.raises(FieldExprSyntaxError, match="Expected"):
            parse_field_expr("sin(x1")

    def test_exponent_must_be_number(self):
        """Exponents are numeric literals."""
        with pytest.raises(FieldExprSyntaxError, match="Exponent"):
            parse_field_expr("x1^x2")

    def test_x0_rejected(self):
        """Variables are numbered from x1."""
        with pytest.raises(FieldExprSyntaxError):
            parse_field_expr("x0")

    def test_empty(self):
        """Empty text is not an expression."""
        with pytest.raises(FieldExprSyntaxError, match="Empty"):
            parse_field_expr("   ")


class TestEvaluation:
    """Tests for jet evaluation and guards."""

    def test_jet_matches_value(self):
        """Jet value agrees with the float path."""
        f = parse_field_expr("exp(x1*x2) + log(2 + x3)")
        point = (0.3, -0.2, 0.4)
        assert f.evaluate(point, order=3).value == pytest.approx(f.value(point))

    def test_jet_derivative(self):
        """Jet derivatives of x1²x2."""
        f = parse_field_expr("x1^2*x2")
        jet = f.evaluate((0.5, 2.0), order=3)
        assert extract_partial(jet, (1, 0)) == pytest.approx(2.0)
        assert extract_partial(jet, (2, 1)) == pytest.approx(2.0)

    def test_shared_env(self):
        """Expressions evaluated in one environment share a chart."""
        env = JetEnv((0.1, 0.2), order=2)
        a = parse_field_expr("x1").to_jet(env)
        b = parse_field_expr("x2").to_jet(env)
        assert (a * b).value == pytest.approx(0.02)

    def test_log_guard(self):
        """log of a non-positive value fails the guard."""
        f = parse_field_expr("log(x1)")
        with pytest.raises(FieldExprGuardError):
            f.value((-1.0,))
        with pytest.raises(FieldExprGuardError):
            f.evaluate((-1.0,), order=2)

    def test_fractional_power_guard(self):
        """Non-integer powers need a positive base."""
        with pytest.raises(FieldExprGuardError):
            parse_field_expr("(x1 - 1)^0.5").value((0.5,))

    def test_variable_outside_chart(self):
        """x3 on a two-dimensional chart is a guard error."""
        with pytest.raises(FieldExprGuardError):
            parse_field_expr("x3").value((0.1, 0.2))

    def test_validate_points(self):
        """validate evaluates on every point and returns the expression."""
        f = parse_field_expr("sqrt(1 + x1)")
        pts = np.array([[0.0], [0.5], [-0.5]])
        assert f.validate(pts) is f
        with pytest.raises(FieldExprGuardError):
            f.validate(np.array([[0.0], [-2.0]]))

    def test_radius_at_origin(self):
        """r is not smooth at the origin."""
        with pytest.raises(FieldExprGuardError):
            parse_field_expr("r").evaluate((0.0, 0.0), order=2)
