"""
Tests for Target Geometry
=========================

Unit tests for core.target module.
"""

import numpy as np
import pytest

from core.errors import ConfigError, GeometryError
from core.jets import jet_variables, values
from core.target import FlatTarget, HyperbolicTarget, ScalarTarget, WarpedTarget

TARGETS = [
    WarpedTarget.for_stationary(kappa=-0.7),
    WarpedTarget.for_static(kappa=-1.3, n=4),
    WarpedTarget(c=(0.4, 1.7), l=(0.5, 2.5)),
    HyperbolicTarget(3),
]


def target_point(target):
    return [1.3] + [0.2 * (a + 1) for a in range(target.dim - 1)]


class TestWarpedTarget:
    """Tests for WarpedTarget class."""

    def test_validation(self):
        """Coefficients are positive, one exponent each."""
        with pytest.raises(GeometryError):
            WarpedTarget(c=(1.0,), l=(1.0, 2.0))
        with pytest.raises(GeometryError, match="positive"):
            WarpedTarget(c=(-1.0,), l=(1.0,))

    def test_stationary_target(self):
        """The stationary target is four-dimensional with c = (1, −2κ, −2κ)."""
        target = WarpedTarget.for_stationary(kappa=-0.5)
        assert target.dim == 4
        assert target.c == (1.0, 1.0, 1.0)
        assert target.l == (2.0, 1.0, 1.0)

    def test_static_target(self):
        """The static target coefficient is −4κ(n−2)/(n−1)."""
        target = WarpedTarget.for_static(kappa=-1.0, n=3)
        assert target.c == (2.0,)

    def test_upper_half_space(self):
        """y₁ ≤ 0 leaves the target."""
        target = WarpedTarget.for_static(kappa=-1.0, n=3)
        with pytest.raises(GeometryError, match="upper half space"):
            target.metric(jet_variables([-0.5, 0.0], 1))

    def test_hyperbolic_plane_inside(self):
        """The (y₁, y₂) plane of the stationary target has curvature −1."""
        target = WarpedTarget.for_stationary(kappa=-1.0)
        e = np.eye(4)
        k = target.sectional_curvature([1.4, 0.1, 0.2, 0.3], e[0], e[1])
        assert k == pytest.approx(-1.0)


class TestCurvaturePaths:
    """Closed forms against the generic curvature code."""

    @pytest.mark.parametrize("target", TARGETS, ids=lambda t: type(t).__name__)
    def test_christoffel(self, target):
        """Γ from the closed form equals Γ from the metric jets."""
        phi = jet_variables(target_point(target), 3)
        closed = values(target.christoffel_along(phi, "closed"))
        generic = values(target.christoffel_along(phi, "jet"))
        np.testing.assert_allclose(closed, generic, atol=1e-12)

    @pytest.mark.parametrize("target", TARGETS, ids=lambda t: type(t).__name__)
    def test_riemann(self, target):
        """Lowered Riemann from the closed form equals the generic one."""
        phi = jet_variables(target_point(target), 3)
        closed = values(target.riemann_along(phi, "closed"))
        generic = values(target.riemann_along(phi, "jet"))
        np.testing.assert_allclose(closed, generic, atol=1e-12)

    def test_unknown_path(self):
        """Only closed and jet paths exist."""
        phi = jet_variables([1.0, 0.0], 2)
        with pytest.raises(ValueError):
            HyperbolicTarget(2).christoffel_along(phi, "numeric")

    def test_flat(self):
        """ℝ^k has no curvature."""
        phi = jet_variables([0.3, -0.1], 2)
        assert np.all(values(FlatTarget(2).riemann(phi)) == 0.0)

    def test_hyperbolic_curvature(self):
        """Hyperbolic space has sectional curvature −1."""
        e = np.eye(3)
        k = HyperbolicTarget(3).sectional_curvature([2.0, 0.5, 0.1], e[1], e[2])
        assert k == pytest.approx(-1.0)


class TestScalarTarget:
    """Tests for ScalarTarget class."""

    def test_unknown_kind(self):
        """Targets are flat or hyperbolic."""
        with pytest.raises(ConfigError):
            ScalarTarget("spherical")

    def test_potential_must_fit_kind(self):
        """The distance potential lives on hyperbolic targets."""
        with pytest.raises(ConfigError, match="not available"):
            ScalarTarget("flat", 2, "distance")

    def test_quadratic_value(self):
        """V = a|y|²."""
        y = jet_variables([0.3, 0.4], 1)
        assert ScalarTarget().value(y, 2.0).value == pytest.approx(0.5)

    def test_distance_vanishes_at_base_point(self):
        """V(e₁) = 0 for the distance potential."""
        y = jet_variables([1.0, 0.0], 1)
        target = ScalarTarget("hyperbolic", 2, "distance")
        assert target.value(y, 1.0).value == pytest.approx(0.0)

    def test_convexity(self):
        """Negative quartic coefficients are not convex."""
        assert ScalarTarget("flat", 2, "quartic", 0.5).is_convex()
        assert not ScalarTarget("flat", 2, "quartic", -0.5).is_convex()

    def test_gradient_on_flat_target(self):
        """∇V = 2a y on ℝ^k."""
        phi = jet_variables([0.3, -0.2], 2)
        grad = values(ScalarTarget().gradient(phi, 1.5))
        np.testing.assert_allclose(grad, [0.9, -0.6], atol=1e-13)
