"""
Tests for Harmonic Maps
=======================

Unit tests for core.harmonic_map module.
"""

import pytest

from core.errors import DataClassError, GeometryError
from core.fieldeq import TransportTable
from core.harmonic_map import (
    MAP_ROWS,
    MAP_TRANSPORT_ROWS,
    MapDifferential,
    static_map,
    stationary_map,
)
from core.settings import CONFIG_DIR
from core.solutions import random_data
from core.target import HyperbolicTarget

TWIST_ROWS = [
    "ID-2.26/2.28",
    "ID-2.32",
    "ID-2.35",
    "ID-2.36",
    "ID-2.37",
    "ID-2.38",
    "ID-2.40",
    "ID-2.41",
    "ID-2.46",
]
STATIC_ROWS = ["ID-3.8", "ID-3.9", "ID-3.10", "ID-3.11", "ID-3.12"]
TARGET_ROWS = ["ID-2.23", "ID-2.24", "ID-2.25", "ID-2.39"]


def closes(ev, tol=1e-8):
    return min(ev.residual(name) for name in ev.readings) < tol


@pytest.fixture
def table():
    return TransportTable.from_yaml(CONFIG_DIR / "transport.yaml")


class TestMapDifferential:
    """Tests for MapDifferential class."""

    def test_component_count(self, stationary_sample):
        """One component per target coordinate."""
        p = stationary_sample.pkg
        with pytest.raises(GeometryError, match="3-d target"):
            MapDifferential(p.ghat, HyperbolicTarget(3), [p.u])

    def test_stationary_map_needs_twist_potential(self, stationary_sample):
        """Random data carry no ψ."""
        with pytest.raises(DataClassError, match="twist potential"):
            stationary_map(stationary_sample)

    def test_static_map_needs_static_data(self, twist_sample):
        """The static map is refused on twisting data."""
        with pytest.raises(DataClassError):
            static_map(twist_sample)

    def test_maps_are_memoized(self, twist_sample):
        """A sample builds each map once per path."""
        first = stationary_map(twist_sample)
        assert stationary_map(twist_sample) is first
        assert stationary_map(twist_sample, "jet") is not first

    def test_energy_is_nonnegative(self, twist_sample):
        """e(Φ) ≥ 0 on a Riemannian target."""
        assert stationary_map(twist_sample).energy.value >= 0.0

    def test_closed_and_jet_paths_agree(self, twist_sample):
        """Both curvature paths give the same tension."""
        closed = stationary_map(twist_sample).tension.value
        generic = stationary_map(twist_sample, "jet").tension.value
        assert closed == pytest.approx(generic, abs=1e-10)


class TestMapRows:
    """Map rows on generated data."""

    @pytest.mark.parametrize("identity_id", TWIST_ROWS)
    def test_twist_rows(self, identity_id, twist_sample):
        """Unconditional chain rows close on exact-twist data."""
        assert closes(MAP_ROWS[identity_id](twist_sample))

    @pytest.mark.parametrize("identity_id", STATIC_ROWS)
    def test_static_rows(self, identity_id, static_sample):
        """Static chain rows close in four dimensions."""
        assert closes(MAP_ROWS[identity_id](static_sample))

    @pytest.mark.parametrize("identity_id", TARGET_ROWS)
    def test_target_rows(self, identity_id):
        """Closed-form target curvature matches the metric."""
        s = random_data("target", seed=3).sample((1.2, 0.3, -0.2, 0.1), order=2)
        assert closes(MAP_ROWS[identity_id](s))

    def test_bochner_row(self):
        """The Bochner formula holds for a random map."""
        s = random_data("bochner", seed=0).sample((0.1, -0.2, 0.15), order=4)
        assert closes(MAP_ROWS["ID-2.31"](s))

    def test_bochner_row_needs_map(self, stationary_sample):
        """Data without map components are skipped."""
        with pytest.raises(DataClassError):
            MAP_ROWS["ID-2.31"](stationary_sample)


class TestMapTransports:
    """Map transport rows against the frozen table."""

    @pytest.mark.parametrize(
        "identity_id", ["ID-2.29", "ID-2.30", "ID-2.33/2.34", "ID-2.41-stress"]
    )
    def test_stationary_transports(self, identity_id, twist_sample, table):
        """Frozen coefficients close the stationary transports."""
        transport = MAP_TRANSPORT_ROWS[identity_id](twist_sample)
        assert closes(transport.evaluate(table.coefficients(identity_id, 3)))

    def test_static_transport(self, static_sample, table):
        """The static stress pullback transport closes for n = 4."""
        transport = MAP_TRANSPORT_ROWS["ID-3.9-stress"](static_sample)
        assert closes(transport.evaluate(table.coefficients("ID-3.9-stress", 4)))
