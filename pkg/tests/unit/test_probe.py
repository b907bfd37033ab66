"""
Tests for Estimate Probe
========================

Unit tests for core.probe module.
"""

import math

import pytest

from core.errors import CatalogError, HypothesisError
from core.probe import (
    DEFAULT_CENTER,
    SCALE_OFFSET,
    ball_points,
    estimate_probe,
    probe_many,
    radial_distance,
    radius_at_offset,
    require_probe_hypotheses,
    rescale,
    scale_check,
)
from core.settings import CONFIG_DIR
from core.solutions import SolutionCatalog, random_data


PROBE_NAMES = [
    e.name for e in SolutionCatalog(CONFIG_DIR / "solutions.json").probe_entries()
]

@pytest.fixture(scope="module")
def catalog():
    return SolutionCatalog(CONFIG_DIR / "solutions.json")


class TestDistances:
    """Tests for radial distances."""

    def test_flat(self, catalog):
        """Flat radial distance is the coordinate difference."""
        data = catalog.get("minkowski").field_data()
        assert radial_distance(data, 0.5, 1.0) == pytest.approx(0.5, rel=1e-10)
        assert radial_distance(data, 1.0, 0.5) == pytest.approx(0.5, rel=1e-10)
        assert radial_distance(data, 0.7, 0.7) == 0.0

    def test_de_sitter(self, catalog):
        """Static de Sitter has dist = √(3/Λ)(asin(r₂√(Λ/3)) − asin(r₁√(Λ/3)))."""
        data = catalog.get("deSitter-static").field_data()
        k = math.sqrt(0.5 / 3.0)
        expected = (math.asin(1.2 * k) - math.asin(0.4 * k)) / k
        assert radial_distance(data, 0.4, 1.2) == pytest.approx(expected, rel=1e-9)

    def test_outside_domain(self, catalog):
        """Intervals must stay inside the validity domain."""
        data = catalog.get("deSitter-static").field_data()
        with pytest.raises(CatalogError, match="leaves the domain"):
            radial_distance(data, 0.1, 1.0)

    def test_needs_shell(self):
        """Cube-domain data have no radial direction."""
        with pytest.raises(CatalogError, match="spherically symmetric"):
            radial_distance(random_data("random", 1), 0.1, 0.2)

    def test_offset_inverts_distance(self, catalog):
        """radius_at_offset is the inverse of radial_distance."""
        data = catalog.get("deSitter-static").field_data()
        r = radius_at_offset(data, 1.0, 0.15)
        assert radial_distance(data, 1.0, r) == pytest.approx(0.15, rel=1e-9)
        assert radius_at_offset(data, 1.0, -0.15) < 1.0


class TestHypotheses:
    """Tests for require_probe_hypotheses."""

    def test_positive_kappa_rejected(self, catalog):
        """Reissner–Nordström has κ > 0."""
        data = catalog.get("reissner-nordstrom").field_data()
        with pytest.raises(HypothesisError, match="κ"):
            require_probe_hypotheses(data)

    def test_probe_entries_accepted(self, catalog):
        """Every entry marked for probing satisfies the hypotheses."""
        for entry in catalog.probe_entries():
            require_probe_hypotheses(entry.field_data())


class TestBalls:
    """Tests for ball sampling and the probe."""

    def test_ball_points(self, catalog):
        """The center plus radial × angular points within half the radius."""
        data = catalog.get("minkowski").field_data()
        points = ball_points(data, 1.0, 0.2, radial=4, angular=3)
        assert len(points) == 13
        assert points[0] == ((1.0, 0.0, 0.0), 0.0)
        assert all(0.0 <= dist <= 0.1 + 1e-12 for _, dist in points)
        for point, dist in points:
            assert math.dist(point, (1.0, 0.0, 0.0)) == pytest.approx(dist, rel=5e-2)

    def test_ball_points_cover_radial_diameter(self, catalog):
        """Both ends of the radial diameter at a/2 are sampled."""
        data = catalog.get("minkowski").field_data()
        points = ball_points(data, 1.0, 0.2, radial=4, angular=3)
        ends = [p for p, dist in points if dist == pytest.approx(0.1)]
        assert min(p[0] for p in ends) == pytest.approx(0.9, abs=1e-12)
        assert max(p[0] for p in ends) == pytest.approx(1.1, abs=1e-12)

    def test_ball_exits_domain(self, catalog):
        """A ball reaching past r_min raises CatalogError."""
        data = catalog.get("deSitter-static").field_data()
        with pytest.raises(CatalogError):
            ball_points(data, 0.3, 0.4, radial=2, angular=2)

    def test_flat_constants_vanish(self, catalog):
        """Flat space has zero constants and a satisfied Harnack bound."""
        data = catalog.get("minkowski").field_data()
        result = estimate_probe(data, radii=(0.1,), radial=2, angular=2, order=3)
        assert result.name == "minkowski"
        assert all(abs(v) < 1e-12 for v in result.constants.values())
        assert result.min_h == 0.0
        assert result.harnack_ok
        assert len(result.csv_rows()) == 1

    def test_estimate_rejects_hypotheses(self, catalog):
        """The probe refuses κ > 0 entries."""
        data = catalog.get("reissner-nordstrom").field_data()
        with pytest.raises(HypothesisError):
            estimate_probe(data, radii=(0.1,), radial=1, angular=1)

    async def test_probe_many(self, catalog):
        """Concurrent probing keeps entry and ball order."""
        datasets = [
            catalog.get("minkowski").field_data(),
            catalog.get("deSitter-static").field_data(),
        ]
        results = await probe_many(
            datasets, radii=(0.1, 0.2), radial=2, angular=1, max_workers=2
        )
        assert [r.name for r in results] == ["minkowski", "deSitter-static"]
        assert [b.radius for b in results[1].balls] == [0.1, 0.2]
        assert results[1].constants["sup_f"] > 0.0


class TestRescaling:
    """Tests for the blow-up rescaling."""

    def test_invalid_factor(self, catalog):
        """Factors must be positive."""
        data = catalog.get("minkowski").field_data()
        with pytest.raises(ValueError):
            rescale(data, -1.0)

    def test_distances_scale(self, catalog):
        """ḡ → λḡ scales distances by √λ."""
        data = catalog.get("deSitter-static").field_data()
        scaled = rescale(data, 4.0)
        assert radial_distance(scaled, 0.5, 1.0) == pytest.approx(
            2.0 * radial_distance(data, 0.5, 1.0), rel=1e-9
        )
        assert scaled.matter.cosmological_constant == pytest.approx(0.125)

    @pytest.mark.parametrize("name", PROBE_NAMES)
    def test_f_is_scale_invariant(self, catalog, name):
        """f = h·d² at an off-center base point survives the rescaling."""
        data = catalog.get(name).field_data()
        check = scale_check(data, base_radius=DEFAULT_CENTER + SCALE_OFFSET)
        assert radial_distance(data, DEFAULT_CENTER, DEFAULT_CENTER + SCALE_OFFSET) > 0
        assert check.relative_change < 1e-9
        if name != "minkowski":
            assert check.f > 0.0

    def test_flat_scale_is_trivial(self, catalog):
        """h = 0 on flat space: f stays zero under a unit rescaling."""
        data = catalog.get("minkowski").field_data()
        check = scale_check(data, base_radius=1.1, order=3)
        assert check.factor == 1.0
        assert check.f == check.f_rescaled == 0.0
