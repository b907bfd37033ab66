"""
Tests for Samples
=================

Unit tests for core.sample module.
"""

import numpy as np
import pytest

from core.errors import CatalogError, DataClassError
from core.field_expr import parse_field_expr
from core.sample import Domain, FieldData
from core.solutions import random_data
from core.stationary import StationaryData


class TestDomain:
    """Tests for Domain class."""

    def test_unknown_kind(self):
        """Only cube, shell and upper domains exist."""
        with pytest.raises(CatalogError):
            Domain("sphere")

    def test_shell_bounds(self):
        """Shells need 0 < r_min < r_max."""
        with pytest.raises(CatalogError, match="r_min"):
            Domain("shell", 3, r_min=1.0, r_max=0.5)

    def test_upper_bounds(self):
        """Upper domains need 0 < low < high."""
        with pytest.raises(CatalogError):
            Domain("upper", 4, low=0.0)

    def test_points_deterministic(self):
        """Points depend only on the generator state."""
        d = Domain("cube", 3)
        a = d.points(np.random.default_rng(5), 4)
        b = d.points(np.random.default_rng(5), 4)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (4, 3)

    @pytest.mark.parametrize(
        "domain",
        [
            Domain("cube", 3, half_width=0.2),
            Domain("shell", 3, r_min=0.3, r_max=1.0, max_cos=0.8),
            Domain("upper", 4, low=0.5, high=2.0),
        ],
    )
    def test_points_inside(self, domain):
        """Drawn points lie in the domain."""
        pts = domain.points(np.random.default_rng(0), 25)
        assert all(domain.contains(p) for p in pts)

    def test_contains_checks_dimension(self):
        """Points of the wrong dimension are outside."""
        assert not Domain("cube", 3).contains((0.0, 0.0))

    def test_shell_axis_excluded(self):
        """max_cos keeps points off the x_n axis."""
        d = Domain("shell", 3, r_min=0.3, r_max=1.0, max_cos=0.8)
        assert not d.contains((0.0, 0.0, 0.5))
        assert d.contains((0.5, 0.0, 0.0))


class TestFieldData:
    """Tests for FieldData validation."""

    def test_unknown_data_class(self):
        """Data classes are a closed set."""
        with pytest.raises(DataClassError):
            FieldData("x", "exotic")

    def test_electric_twice(self):
        """E comes either as a form or a potential."""
        x1 = parse_field_expr("x1")
        with pytest.raises(DataClassError, match="both"):
            FieldData(
                "x",
                "random",
                stationary=StationaryData.flat(3),
                electric=(x1, x1, x1),
                electric_potential=x1,
            )

    def test_dimension_mismatch(self):
        """Stationary dimension must match the domain."""
        with pytest.raises(DataClassError):
            FieldData(
                "x",
                "coulomb",
                stationary=StationaryData.flat(3),
                domain=Domain("cube", 4),
            )

    def test_scalar_component_count(self):
        """One scalar component per target dimension."""
        with pytest.raises(DataClassError, match="scalar"):
            FieldData(
                "x",
                "random",
                stationary=StationaryData.flat(3),
                scalar=(parse_field_expr("x1"),),
            )

    def test_validate_lapse(self):
        """u ≤ 0 on a sample point is rejected."""
        data = FieldData(
            "x", "coulomb", stationary=StationaryData.flat(3, parse_field_expr("x1"))
        )
        with pytest.raises(CatalogError, match="u ≤ 0"):
            data.validate(np.array([[0.2, 0.0, 0.0], [-0.1, 0.0, 0.0]]))


class TestSample:
    """Tests for Sample class."""

    def test_none_has_no_stationary_data(self):
        """Arithmetic data cannot build the stationary package."""
        s = random_data("none", 0).sample((0.0, 0.0, 0.0))
        with pytest.raises(DataClassError):
            s.pkg

    def test_missing_parts(self):
        """Missing test scalar and warped target raise DataClassError."""
        s = random_data("coulomb", 1).sample((0.5, 0.0, 0.0))
        with pytest.raises(DataClassError):
            s.test_scalar
        with pytest.raises(DataClassError):
            s.warped

    def test_memo(self):
        """memo computes once per sample."""
        s = random_data("none", 0).sample((0.0, 0.0, 0.0))
        calls = []
        for _ in range(3):
            s.memo("k", lambda: calls.append(1) or len(calls))
        assert calls == [1]

    def test_rng_depends_on_index(self):
        """Per-sample generators differ by plan index."""
        data = random_data("random", 2)
        a = data.sample((0.0, 0.0, 0.0), index=0).rng.uniform()
        b = data.sample((0.0, 0.0, 0.0), index=1).rng.uniform()
        assert a != b
        assert a == data.sample((0.1, 0.0, 0.0), index=0).rng.uniform()

    def test_potentials_give_forms(self, stationary_sample):
        """E = dφ₃ and B = dφ₄ on the random class."""
        em = stationary_sample.em
        assert em.E.shape == (3,)
        assert em.B is not None

    def test_static_has_no_magnetic_field(self, static_sample):
        """Static random data carry B = 0."""
        assert static_sample.em.B is None
        assert static_sample.n == 4

    def test_repr(self, stationary_sample):
        """repr names the label and the point."""
        assert "random#1" in repr(stationary_sample)


class TestGenerators:
    """Tests for the seeded generators."""

    @pytest.mark.parametrize(
        "data_class,dim",
        [
            ("random", 3),
            ("random-forms", 3),
            ("exact-twist", 3),
            ("coulomb", 3),
            ("target", 4),
            ("bochner", 3),
        ],
    )
    def test_classes(self, data_class, dim):
        """Each generator produces its data class and chart dimension."""
        data = random_data(data_class, 4)
        assert data.data_class == data_class
        assert data.domain.dim == dim
        assert data.seed == 4

    def test_static_dimension_cycles(self):
        """random-static picks n = 3 + seed mod 3 unless told otherwise."""
        assert [random_data("random-static", s).n for s in (0, 1, 2, 3)] == [3, 4, 5, 3]
        assert random_data("random-static", 0, dim=5).n == 5

    def test_seeded(self):
        """The same seed gives the same expressions."""
        a = random_data("random", 9).stationary.u.render()
        b = random_data("random", 9).stationary.u.render()
        assert a == b
        assert a != random_data("random", 10).stationary.u.render()

    def test_exact_twist_potential(self, twist_sample):
        """Exact-twist data satisfy ω = dψ."""
        p = twist_sample.pkg
        diff = p.omega - p.spatial.d(twist_sample.psi)
        assert np.max(np.abs(np.asarray(diff.value))) < 1e-12

    def test_unknown_class(self):
        """catalog data have no generator."""
        with pytest.raises(CatalogError):
            random_data("catalog", 0)
