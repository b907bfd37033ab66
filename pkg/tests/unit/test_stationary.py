"""
Tests for Stationary Reduction
==============================

Unit tests for core.stationary module.
"""

import numpy as np
import pytest

from core.errors import DataClassError, GeometryError
from core.field_expr import parse_field_expr
from core.jets import Jet, values
from core.solutions import random_data
from core.stationary import (
    REDUCTION_ROWS,
    EMDecomposition,
    StationaryData,
    assemble,
    check_identity,
    resolve_twist_sign,
)

DIRECT_ROWS = sorted(set(REDUCTION_ROWS) - {"ID-3.19"})


def closes(ev, tol=1e-8):
    return min(ev.residual(name) for name in ev.readings) < tol


class TestStationaryData:
    """Tests for StationaryData validation."""

    def test_metric_shape(self):
        """g must be n × n."""
        one = parse_field_expr("1")
        with pytest.raises(GeometryError, match="3×3"):
            StationaryData(n=3, u=one, g=((one, one), (one, one)))

    def test_metric_symmetric(self):
        """g_ij and g_ji must agree."""
        one, zero, x = (parse_field_expr(t) for t in ("1", "0", "x1"))
        with pytest.raises(GeometryError, match="symmetric"):
            StationaryData(n=2, u=one, g=((one, x), (zero, one)))

    def test_static_theta(self):
        """Static data cannot carry θ."""
        flat = StationaryData.flat(2)
        with pytest.raises(GeometryError, match="Static"):
            StationaryData(
                n=2,
                u=flat.u,
                g=flat.g,
                theta=(parse_field_expr("x1"),) * 2,
                static=True,
            )


class TestStationaryPackage:
    """Tests for StationaryPackage construction."""

    def test_non_positive_lapse(self):
        """u ≤ 0 at the point is rejected."""
        data = StationaryData.flat(3, parse_field_expr("x1"))
        with pytest.raises(GeometryError, match="not positive"):
            assemble(data, (-0.1, 0.0, 0.0))

    def test_chart_dimension(self):
        """Data and chart dimensions must match."""
        with pytest.raises(GeometryError):
            assemble(StationaryData.flat(3), (0.1, 0.2))

    def test_flat_static(self):
        """u = 1 on flat g gives a flat ḡ and no twist."""
        p = assemble(StationaryData.flat(3), (0.1, 0.2, 0.3), order=3)
        assert np.allclose(values(p.ricci_bar), 0.0)
        assert np.allclose(values(p.omega), 0.0)
        assert p.gbar.det_sign == -1

    def test_killing(self, stationary_sample):
        """No metric component depends on t."""
        assert stationary_sample.pkg.killing_defect() == 0.0

    def test_frame_orthogonality(self, stationary_sample):
        """ḡ(e₀, e_i) = 0 and ĝ(e₀, e₀) = u²."""
        p = stationary_sample.pkg
        gf = values(p.gbar.frame_components(p.gbar.g, p.frame))
        np.testing.assert_allclose(gf[0, 1:], 0.0, atol=1e-13)
        hf = values(p.ghat.frame_components(p.ghat.g, p.frame))
        assert hf[0, 0] == pytest.approx(p.u.value**2)

    def test_twist_needs_three_dimensions(self):
        """ω is only defined for n = 3 stationary data."""
        flat = StationaryData.flat(4)
        x = parse_field_expr("0.1*x2")
        zero = parse_field_expr("0")
        data = StationaryData(n=4, u=flat.u, g=flat.g, theta=(zero, x, zero, zero))
        with pytest.raises(DataClassError):
            assemble(data, (0.1, 0.1, 0.1, 0.1), order=3).omega


class TestMaxwellSplit:
    """Tests for EMDecomposition."""

    def test_magnetic_beyond_three(self, static_sample):
        """Magnetic fields need n = 3."""
        p = static_sample.pkg
        with pytest.raises(DataClassError):
            EMDecomposition(p, static_sample.em.E, Jet.zeros((4,), 4, 3))

    def test_f_squared(self, stationary_sample):
        """F_αβF^αβ = 2u⁻²(|B|² − |E|²)."""
        s = stationary_sample
        p, em = s.pkg, s.em
        expected = 2.0 * (p.spatial.norm_sq(em.B) - p.spatial.norm_sq(em.E)) / p.u**2
        assert em.norm_sq().value == pytest.approx(expected.value, rel=1e-10)


class TestReductionRows:
    """Reduction identities on generated data."""

    @pytest.mark.parametrize("identity_id", DIRECT_ROWS)
    def test_rows_close_on_random_data(self, identity_id, stationary_sample):
        """Every reduction row closes on seeded stationary data."""
        assert closes(check_identity(identity_id, stationary_sample))

    @pytest.mark.parametrize(
        "identity_id", ["ID-2.6", "ID-2.5c", "ID-EB-norm", "ID-3.19"]
    )
    def test_static_rows(self, identity_id, static_sample):
        """Dimension-general rows close on static data in four dimensions."""
        assert closes(check_identity(identity_id, static_sample))

    def test_unknown_row(self, stationary_sample):
        """check_identity only knows reduction rows."""
        with pytest.raises(KeyError):
            check_identity("ID-2.16", stationary_sample)

    def test_twist_sign(self):
        """Exactly one sign of the twist-curl identity closes."""
        data = random_data("random", 5)
        pts = data.domain.points(np.random.default_rng(0), 3)
        samples = [data.sample(p, 4, i) for i, p in enumerate(pts)]
        resolution = resolve_twist_sign(samples)
        assert resolution.reading in ("sigma=-1", "sigma=+1")
        assert resolution.residuals[resolution.reading] < 1e-8
        other = {"sigma=-1", "sigma=+1"} - {resolution.reading}
        assert resolution.residuals[other.pop()] > 1e-6

    def test_twist_sign_undecided_on_static(self):
        """Static data cannot decide the sign."""
        data = random_data("random-static", 0)
        samples = [data.sample((0.1, 0.2, -0.1), 4)]
        with pytest.raises(GeometryError, match="undecided"):
            resolve_twist_sign(samples)
