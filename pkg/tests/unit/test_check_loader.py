"""
Tests for Check Loader
======================

Unit tests for core.check_loader module.
"""

from pathlib import Path

import pytest

from core.check_loader import CheckLoader
from core.errors import ConfigError, UnknownIdentityError
from core.fieldeq import TransportTable
from handlers.field_equations import FieldEquationsHandler
from handlers.reduction import ReductionHandler


class TestCheckLoader:
    """Tests for CheckLoader.load_handler."""

    @pytest.mark.parametrize(
        "handler_type",
        [
            "reduction",
            "field_equations",
            "harmonic_maps",
            "inequalities",
            "tensor_properties",
        ],
    )
    async def test_known_types(self, handler_type):
        """Every suite type loads with an empty identity table."""
        handler = await CheckLoader.load_handler(
            handler_type, {"name": handler_type, "identities": {}}
        )
        assert handler.name == handler_type
        assert handler.provided

    def test_package_star_import(self):
        """The handlers package exports nothing it does not define."""
        namespace: dict = {}
        exec("from handlers import *", namespace)
        assert not any(name.endswith("Handler") for name in namespace)

    async def test_unknown_type(self):
        """Unknown handler types raise ValueError."""
        with pytest.raises(ValueError, match="Unknown handler type"):
            await CheckLoader.load_handler("topology", {})

    async def test_missing_row(self):
        """Identities without a row function fail initialization."""
        with pytest.raises(ValueError, match="does not implement"):
            await CheckLoader.load_handler(
                "reduction", {"name": "reduction", "identities": {"ID-2.16": {}}}
            )


class TestRowTableHandler:
    """Tests for RowTableHandler behaviour."""

    async def test_transport_table_loaded(self, sample_transport: Path):
        """Transport rows load the frozen table."""
        handler = await CheckLoader.load_handler(
            "field_equations",
            {
                "name": "field_equations",
                "identities": {"ID-2.16": {"class": "transport"}},
                "transport": str(sample_transport),
            },
        )
        assert isinstance(handler, FieldEquationsHandler)
        assert "ID-2.16" in handler.table

    async def test_missing_coefficients(self, sample_transport: Path):
        """A transport row absent from the table is a config error."""
        with pytest.raises(ConfigError, match="ID-2.15"):
            await CheckLoader.load_handler(
                "field_equations",
                {
                    "name": "field_equations",
                    "identities": {"ID-2.15": {}},
                    "transport": str(sample_transport),
                },
            )

    def test_describe(self):
        """Descriptions name the implementing function."""
        handler = ReductionHandler(
            {
                "name": "reduction",
                "identities": {"ID-2.6": {"class": "unconditional", "anchor": "Δ̂f"}},
            }
        )
        desc = handler.describe("ID-2.6")
        assert desc["suite"] == "reduction"
        assert desc["anchor"] == "Δ̂f"
        assert desc["implementation"] == "core.stationary.laplacians_row"
        assert desc["summary"]

    def test_describe_transport(self):
        """Transport rows are flagged."""
        handler = FieldEquationsHandler({"name": "field_equations"})
        assert handler.describe("ID-2.16")["transport"] is True

    def test_unknown_identity(self, stationary_sample):
        """Rows outside the suite raise UnknownIdentityError."""
        handler = ReductionHandler({"name": "reduction"})
        with pytest.raises(UnknownIdentityError):
            handler.evaluate("ID-2.16", stationary_sample)
        with pytest.raises(UnknownIdentityError):
            handler.describe("ID-9.99")

    def test_uninitialized_transport(self, stationary_sample):
        """Transport rows need the table loaded by initialize()."""
        handler = FieldEquationsHandler({"name": "field_equations"})
        with pytest.raises(ConfigError, match="not initialized"):
            handler.evaluate("ID-2.16", stationary_sample)

    async def test_execute_in_thread(self, stationary_sample):
        """execute() returns the row's evaluation."""
        handler = await CheckLoader.load_handler(
            "reduction", {"name": "reduction", "identities": {"ID-2.6": {}}}
        )
        ev = await handler.execute("ID-2.6", stationary_sample)
        assert ev.residual() < 1e-8


class TestTransportTable:
    """Tests for TransportTable class."""

    def test_per_dimension_coefficients(self, sample_transport: Path):
        """Per-dimension entries resolve by n."""
        table = TransportTable.from_yaml(sample_transport)
        assert table.coefficients("ID-2.16", 3) == {
            "einstein_ee": 1.0,
            "einstein_xx_g": -1.0,
        }
        assert table.coefficients("ID-3.7", 4) == {"dstarF_spatial": -1.0}
        with pytest.raises(ConfigError, match="n = 5"):
            table.coefficients("ID-3.7", 5)

    def test_missing_row(self, sample_transport: Path):
        """Unknown rows raise ConfigError."""
        table = TransportTable.from_yaml(sample_transport)
        with pytest.raises(ConfigError):
            table.coefficients("ID-2.21", 3)

    def test_missing_file(self, temp_dir: Path):
        """A missing table raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            TransportTable.from_yaml(temp_dir / "none.yaml")
