"""
Tests for Solution Catalog
==========================

Unit tests for core.solutions module.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from core.errors import CatalogError
from core.solutions import (
    SolutionCatalog,
    SolutionEntry,
    check_entry,
    min_eigenvalue,
    random_stationary,
    validate_random,
)


@pytest.fixture
def catalog(catalog_path: Path) -> SolutionCatalog:
    return SolutionCatalog(catalog_path)


class TestCatalog:
    """Tests for SolutionCatalog class."""

    def test_load(self, catalog):
        """The shipped catalog loads every entry."""
        assert len(catalog) == 12
        assert "phantom-RN" in catalog.names
        assert catalog.get("taub-nut").mode == "stationary"

    def test_unknown_entry(self, catalog):
        """Unknown names raise CatalogError listing what exists."""
        with pytest.raises(CatalogError, match="minkowski"):
            catalog.get("kerr")

    def test_probe_entries(self, catalog):
        """κ > 0 entries are excluded from probing."""
        names = [e.name for e in catalog.probe_entries()]
        assert "reissner-nordstrom" not in names
        assert "deSitter-static" in names

    def test_missing_file(self, temp_dir: Path):
        """Missing catalog raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            SolutionCatalog(temp_dir / "none.json")

    def test_malformed_json(self, temp_dir: Path):
        """JSON errors carry the position."""
        path = temp_dir / "bad.json"
        path.write_text('{"entries": [\n  {"name": }\n]}')
        with pytest.raises(CatalogError, match="line 2"):
            SolutionCatalog(path)

    def test_duplicate_entry(self, temp_dir: Path):
        """Entry names are unique."""
        path = temp_dir / "dup.json"
        entry = {"name": "flat", "n": 3}
        path.write_text(json.dumps({"entries": [entry, entry]}))
        with pytest.raises(CatalogError, match="Duplicate"):
            SolutionCatalog(path)

    def test_with_params_and_save(self, catalog, temp_dir: Path):
        """Updated parameters survive a save and reload."""
        catalog.with_params("phantom-RN", {"c_q": 0.75})
        path = catalog.save(temp_dir / "out.json")
        again = SolutionCatalog(path)
        assert again.get("phantom-RN").params["c_q"] == 0.75
        assert again.get("phantom-RN").params["M"] == 0.1
        assert again.names == catalog.names


class TestSolutionEntry:
    """Tests for SolutionEntry class."""

    def test_unknown_mode(self):
        """Modes are static or stationary."""
        with pytest.raises(CatalogError, match="mode"):
            SolutionEntry.from_dict({"name": "x", "mode": "dynamic"})

    def test_unknown_oracle(self):
        """Oracles are a closed set."""
        with pytest.raises(CatalogError, match="oracles"):
            SolutionEntry.from_dict({"name": "x", "oracles": ["ricci"]})

    def test_missing_name(self):
        """Entries need a name."""
        with pytest.raises(CatalogError, match="missing"):
            SolutionEntry.from_dict({"n": 3})

    def test_resolve(self, catalog):
        """Overrides replace defaults inside their ranges."""
        entry = catalog.get("deSitter-static")
        assert entry.resolve({"Lambda": 0.25}) == {"Lambda": 0.25}
        with pytest.raises(CatalogError, match="outside"):
            entry.resolve({"Lambda": 2.0})
        with pytest.raises(CatalogError, match="no parameter"):
            entry.resolve({"mass": 1.0})

    def test_field_data(self, catalog):
        """Templates are filled with the resolved parameters."""
        data = catalog.get("deSitter-static").field_data({"Lambda": 0.3})
        assert data.label == "deSitter-static"
        assert data.matter.cosmological_constant == pytest.approx(0.3)
        u = data.stationary.u.value((1.0, 0.0, 0.0))
        assert u == pytest.approx((1.0 - 0.1) ** 0.5)

    def test_spherical_metric_symmetric(self, catalog):
        """Spherical metrics reduce to g_rr on the x¹ axis."""
        data = catalog.get("tangherlini-4").field_data()
        g = data.stationary.g
        point = (0.5, 0.0, 0.0, 0.0)
        assert g[0][0].value(point) == pytest.approx(1.0 / (1.0 - 0.05 / 0.25))
        assert g[1][1].value(point) == pytest.approx(1.0)


class TestOracles:
    """Tests for check_entry."""

    @pytest.mark.parametrize("name", ["minkowski", "deSitter-static", "coulomb-static"])
    def test_entries_solve_their_equations(self, catalog, name):
        """Oracles vanish on exact solutions."""
        result = check_entry(catalog.get(name), points=3, order=3)
        assert result.passed, result.residuals
        assert result.points == 3

    def test_wrong_parameter_fails(self, catalog):
        """A charged entry with the wrong normalization fails its oracle."""
        result = check_entry(
            catalog.get("phantom-RN"), points=3, order=3, overrides={"c_q": 0.2}
        )
        assert not result.passed
        assert result.residuals["einstein"] > 1e-6


class TestRandomData:
    """Tests for the random generators' guards."""

    def test_amplitude_bound(self):
        """Amplitude above the default bound is refused."""
        with pytest.raises(CatalogError):
            random_stationary(0, amplitude=0.5)

    def test_metric_is_positive(self):
        """Generated metrics stay above the SPD floor."""
        data = random_stationary(3)
        validate_random(data, points=20)
        pts = data.domain.points(np.random.default_rng(1), 20)
        assert min_eigenvalue(data.stationary.g, pts) > 0.5
