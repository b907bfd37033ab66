"""
Tests for Evaluation Records
============================

Unit tests for core.evaluation module.
"""

import numpy as np
import pytest

from core.evaluation import DEFAULT_READING, Comparison, Evaluation
from core.jets import jet_variables


class TestComparison:
    """Tests for Comparison class."""

    def test_equality_residual_is_normalized(self):
        """Residual divides by max(1, |lhs|, |rhs|)."""
        c = Comparison.of("lhs=rhs", np.array([10.0, 2.0]), np.array([10.5, 2.0]))
        assert c.residual == pytest.approx(0.5 / 10.5)

    def test_small_values_not_amplified(self):
        """Values below one are compared absolutely."""
        c = Comparison.of("small", 1e-3, 0.0)
        assert c.residual == pytest.approx(1e-3)

    def test_broadcast_scalar_rhs(self):
        """A scalar right-hand side broadcasts over the left."""
        c = Comparison.of("zero", np.zeros((2, 2)), 0.0)
        assert c.lhs.shape == c.rhs.shape == (4,)
        assert c.residual == 0.0

    def test_jet_operands(self):
        """Jets are compared through their values."""
        x, y = jet_variables((0.2, 0.3), order=2)
        c = Comparison.of("xy", x * y, 0.06)
        assert c.residual == pytest.approx(0.0, abs=1e-15)

    def test_inequality_satisfied(self):
        """Satisfied inequality has zero residual and positive slack."""
        c = Comparison.of("ge", np.array([2.0, 3.0]), np.array([1.0, 1.0]), "ge")
        assert c.residual == 0.0
        assert c.slack == pytest.approx(1.0)

    def test_inequality_violated(self):
        """Violation is normalized like an equality."""
        c = Comparison.of("ge", np.array([0.0]), np.array([0.5]), "ge")
        assert c.residual == pytest.approx(0.5)
        assert c.slack == pytest.approx(-0.5)

    def test_unknown_relation(self):
        """Only eq and ge relations exist."""
        with pytest.raises(ValueError):
            Comparison.of("le", 1.0, 2.0, "le")

    def test_nan_residual(self):
        """NaN values yield a NaN residual the runner treats as failure."""
        c = Comparison.of("nan", np.array([np.nan]), 0.0)
        assert np.isnan(c.residual)


class TestEvaluation:
    """Tests for Evaluation class."""

    def test_single_reading(self):
        """single() stores comparisons under the default reading."""
        ev = Evaluation.single(
            Comparison.of("a", 1.0, 1.0), Comparison.of("b", 2.0, 3.0)
        )
        assert list(ev.readings) == [DEFAULT_READING]
        assert ev.residual() == pytest.approx(1.0 / 3.0)
        assert ev.worst() == "b"

    def test_multiple_readings(self):
        """Readings are aggregated separately."""
        ev = Evaluation.with_readings(
            {
                "sigma=-1": [Comparison.of("line", 1.0, 1.0)],
                "sigma=+1": [Comparison.of("line", 1.0, -1.0)],
            }
        )
        assert ev.residual("sigma=-1") == 0.0
        assert ev.residual("sigma=+1") == pytest.approx(2.0)

    def test_unknown_reading(self):
        """Asking for a missing reading raises KeyError."""
        ev = Evaluation.single(Comparison.of("a", 1.0, 1.0))
        with pytest.raises(KeyError):
            ev.residual("other")

    def test_slack_only_counts_inequalities(self):
        """Equalities do not contribute to slack."""
        ev = Evaluation.single(
            Comparison.of("eq", 5.0, 0.0),
            Comparison.of("ge", 2.0, 1.5, "ge"),
        )
        assert ev.slack() == pytest.approx(0.5)

    def test_empty_evaluation(self):
        """No comparisons means zero residual and no worst label."""
        ev = Evaluation.single()
        assert ev.residual() == 0.0
        assert ev.worst() == ""
