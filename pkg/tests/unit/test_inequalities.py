"""
Tests for Sign Rows
===================

Unit tests for core.inequalities module.
"""

from types import SimpleNamespace

import pytest

from core.errors import DataClassError, HypothesisError
from core.fieldeq import MatterData
from core.inequalities import INEQUALITY_ROWS, harnack_quantity, require_signs
from core.settings import CONFIG_DIR
from core.solutions import SolutionCatalog, random_data
from core.target import ScalarTarget


def holds(ev, tol=1e-8):
    return ev.residual() < tol


class TestRequireSigns:
    """Tests for the sign hypotheses."""

    @pytest.mark.parametrize(
        "matter",
        [
            MatterData(cosmological_constant=-0.1),
            MatterData(kappa=0.5),
            MatterData(kappa_prime=-0.5),
            MatterData(target=ScalarTarget("flat", 2, "quartic", -1.0)),
        ],
    )
    def test_rejects(self, matter):
        """Each broken hypothesis is reported."""
        with pytest.raises(HypothesisError):
            require_signs(SimpleNamespace(matter=matter))

    def test_accepts_phantom_matter(self):
        """Λ ≥ 0, κ < 0, κ′ > 0 with a quadratic potential is fine."""
        require_signs(SimpleNamespace(matter=MatterData(0.2, -1.0, 0.5)))


class TestRandomDataRows:
    """Algebraic sign rows on generated data."""

    @pytest.mark.parametrize("identity_id", ["INEQ-2.44", "INEQ-2.47"])
    def test_stationary_rows(self, identity_id, stationary_sample):
        """Stationary algebraic steps hold on arbitrary data."""
        assert holds(INEQUALITY_ROWS[identity_id](stationary_sample))

    @pytest.mark.parametrize("identity_id", ["INEQ-3.14", "INEQ-3.15", "INEQ-3.16"])
    def test_static_rows(self, identity_id, static_sample):
        """Static scalar steps hold in four dimensions."""
        assert holds(INEQUALITY_ROWS[identity_id](static_sample))

    def test_harnack_needs_static_data(self, stationary_sample):
        """Twisting data are skipped."""
        with pytest.raises(DataClassError):
            INEQUALITY_ROWS["INEQ-3.17"](stationary_sample)


class TestSolutionRows:
    """Rows that only hold on solutions."""

    def test_harnack_quantity_on_de_sitter(self):
        """Without fields h = |∇log u|²."""
        entry = SolutionCatalog(CONFIG_DIR / "solutions.json").get("deSitter-static")
        s = entry.field_data().sample((0.5, 0.2, 0.1), order=3)
        dl2 = s.pkg.spatial.norm_sq(s.pkg.dlog_u)
        assert harnack_quantity(s).value == pytest.approx(dl2.value)


class TestTargetAndArithmetic:
    """Target curvature and constant checks."""

    def test_targets_are_nonpositively_curved(self):
        """Random 2-planes of warped targets have K ≤ 0."""
        s = random_data("target", seed=4).sample((1.1, 0.2, 0.3, -0.1), order=2)
        assert holds(INEQUALITY_ROWS["INEQ-Lemma2.1"](s), tol=1e-10)

    def test_coefficients(self):
        """The constant inequalities hold for n = 3…64, with equality at n = 3."""
        s = random_data("none", seed=0).sample((0.0,) * 3)
        assert holds(INEQUALITY_ROWS["INEQ-coeff-3.17"](s), tol=1e-12)
