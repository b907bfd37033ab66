"""
Tests for Identity Registry
===========================

Unit tests for core.identity_registry module.
"""

from pathlib import Path

import pytest
import yaml

from core.errors import ConfigError, UnknownIdentityError
from core.identity_registry import IdentityEntry, IdentityRegistry, IdentitySuite
from core.solutions import random_data


class TestIdentityEntry:
    """Tests for IdentityEntry class."""

    def test_from_dict(self):
        """Registry fields map onto the entry."""
        entry = IdentityEntry.from_dict(
            "ID-2.6",
            "reduction",
            {"class": "unconditional", "anchor": "Δ̂f", "dims": [3, 4]},
        )
        assert entry.data == ("random",)
        assert entry.dims == (3, 4)
        assert entry.default_tolerance == 1e-8
        assert not entry.selftest

    def test_row_tolerance_overrides_class(self):
        """A tolerance in the registry beats the class default."""
        entry = IdentityEntry.from_dict("ID-x", "s", {"tolerance": 1e-5})
        assert entry.default_tolerance == 1e-5

    def test_unknown_class(self):
        """Classifications are a closed set."""
        with pytest.raises(ConfigError, match="unknown class"):
            IdentityEntry.from_dict("ID-x", "s", {"class": "heuristic"})

    def test_unknown_data_class(self):
        """Data classes are a closed set."""
        with pytest.raises(ConfigError, match="data classes"):
            IdentityEntry.from_dict("ID-x", "s", {"data": ["lattice"]})


class TestIdentitySuite:
    """Tests for IdentitySuite class."""

    def test_initial_state(self):
        """Suites start unloaded."""
        suite = IdentitySuite("reduction", {"type": "reduction"})
        assert suite.enabled
        assert not suite.is_loaded()
        assert "unloaded" in repr(suite)

    async def test_load_once(self):
        """Loading twice returns the same handler."""
        suite = IdentitySuite(
            "reduction", {"type": "reduction", "identities": {"ID-2.6": {}}}
        )
        first = await suite.load()
        assert await suite.load() is first
        assert suite.is_loaded()
        suite.unload()
        assert not suite.is_loaded()

    async def test_failed_initialization(self):
        """Rows without implementation fail the load."""
        suite = IdentitySuite(
            "reduction", {"type": "reduction", "identities": {"ID-9.99": {}}}
        )
        with pytest.raises(RuntimeError, match="does not implement"):
            await suite.load()


class TestIdentityRegistry:
    """Tests for IdentityRegistry class."""

    def test_load(self, sample_registry: Path):
        """Registry lists entries of every suite."""
        registry = IdentityRegistry(sample_registry)
        assert len(registry) == 4
        assert "ID-2.6" in registry
        expected = {"reduction", "tensor_properties", "inequalities"}
        assert set(registry.suites) == expected

    def test_missing_file(self, temp_dir: Path):
        """Missing registry raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            IdentityRegistry(temp_dir / "missing.yaml")

    def test_duplicate_id(self, temp_dir: Path, sample_registry_dict: dict):
        """An id listed in two suites is rejected."""
        suites = sample_registry_dict["suites"]
        suites["tensor_properties"]["identities"]["ID-2.6"] = {"data": ["none"]}
        path = temp_dir / "dup.yaml"
        path.write_text(yaml.dump(sample_registry_dict, allow_unicode=True))
        with pytest.raises(ConfigError, match="twice"):
            IdentityRegistry(path)

    def test_malformed_yaml(self, temp_dir: Path):
        """YAML errors become ConfigError."""
        path = temp_dir / "bad.yaml"
        path.write_text("suites:\n  reduction: [unclosed\n")
        with pytest.raises(ConfigError):
            IdentityRegistry(path)

    def test_get(self, sample_registry: Path):
        """get() raises UnknownIdentityError, a KeyError."""
        registry = IdentityRegistry(sample_registry)
        assert registry.get("PROP-sphere").classification == "property"
        with pytest.raises(UnknownIdentityError):
            registry.get("ID-9.99")
        with pytest.raises(KeyError):
            registry.get("ID-9.99")

    def test_select(self, sample_registry: Path):
        """Selection skips disabled suites and keeps registry order."""
        registry = IdentityRegistry(sample_registry)
        assert [e.id for e in registry.select()] == ["ID-2.2a", "ID-2.6", "PROP-sphere"]
        assert [e.id for e in registry.select(selftest=True)] == [
            "ID-2.2a",
            "PROP-sphere",
        ]
        assert [e.id for e in registry.select(ids=["ID-2.6"])] == ["ID-2.6"]
        assert [e.id for e in registry.select(suites=["tensor_properties"])] == [
            "PROP-sphere"
        ]

    def test_select_unknown(self, sample_registry: Path):
        """Unknown ids and suites are errors."""
        registry = IdentityRegistry(sample_registry)
        with pytest.raises(UnknownIdentityError):
            registry.select(ids=["ID-9.99"])
        with pytest.raises(ConfigError, match="Unknown suites"):
            registry.select(suites=["topology"])

    async def test_describe_loads_only_needed_suite(self, sample_registry: Path):
        """Describing one id loads its suite only."""
        registry = IdentityRegistry(sample_registry)
        [desc] = await registry.describe_identities(["ID-2.6", "ID-9.99"])
        assert desc["id"] == "ID-2.6"
        assert desc["implementation"].startswith("core.stationary.")
        assert desc["transport"] is False
        assert registry.suites["reduction"].is_loaded()
        assert not registry.suites["tensor_properties"].is_loaded()

    async def test_evaluate(self, sample_registry: Path):
        """Evaluation goes through the suite handler."""
        registry = IdentityRegistry(sample_registry)
        sample = random_data("none", 0).sample((0.3, -0.2, 0.1), order=4)
        ev = await registry.evaluate("PROP-sphere", sample)
        assert ev.residual() < 1e-9

    def test_get_all_suites(self, sample_registry: Path):
        """Suite listing carries status and ids."""
        registry = IdentityRegistry(sample_registry)
        suites = {s["name"]: s for s in registry.get_all_suites()}
        assert suites["inequalities"]["enabled"] is False
        assert suites["reduction"]["identities"] == ["ID-2.2a", "ID-2.6"]
        assert suites["reduction"]["loaded"] is False

    async def test_cleanup(self, sample_registry: Path):
        """cleanup() unloads every suite."""
        registry = IdentityRegistry(sample_registry)
        await registry.handler_for("PROP-sphere")
        await registry.cleanup()
        assert not any(s.is_loaded() for s in registry.suites.values())

    def test_shipped_registry(self, registry_path: Path):
        """The shipped registry loads and every row has an anchor."""
        registry = IdentityRegistry(registry_path)
        assert len(registry) > 50
        assert all(e.anchor for e in registry.entries.values())
        assert any(e.selftest for e in registry.entries.values())
