"""
Test Fixtures
=============

Shared pytest fixtures for identity-verify tests.

Registries are written to a temporary directory so tests never depend on
the shipped configuration except where they check it on purpose.
"""

import shutil
import tempfile
from pathlib import Path
from typing import Generator

import numpy as np
import pytest
import yaml

from core.settings import CONFIG_DIR, RunConfig
from core.solutions import random_data


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Temporary directory cleaned up after test."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def sample_registry_dict() -> dict:
    """Small registry configuration as dict."""
    return {
        "suites": {
            "reduction": {
                "enabled": True,
                "type": "reduction",
                "description": "Reduction formulas",
                "identities": {
                    "ID-2.2a": {
                        "class": "unconditional",
                        "anchor": "Ric(ḡ) reduction",
                        "data": ["random", "random-forms"],
                        "dims": [3],
                        "selftest": True,
                    },
                    "ID-2.6": {
                        "class": "unconditional",
                        "anchor": "Δ̂f = u²Δ̃f = Δf + ⟨dlog u, df⟩",
                        "data": ["random", "random-static"],
                        "dims": [3, 4, 5],
                    },
                },
            },
            "tensor_properties": {
                "enabled": True,
                "type": "tensor_properties",
                "description": "Jet and tensor self-checks",
                "identities": {
                    "PROP-sphere": {
                        "class": "property",
                        "anchor": "round sphere R = 2",
                        "data": ["none"],
                        "selftest": True,
                    },
                },
            },
            "inequalities": {
                "enabled": False,
                "type": "inequalities",
                "description": "Disabled suite",
                "identities": {
                    "INEQ-coeff-3.17": {
                        "class": "inequality",
                        "anchor": "coefficient positivity",
                        "data": ["none"],
                    },
                },
            },
        },
    }


@pytest.fixture
def sample_registry(temp_dir: Path, sample_registry_dict: dict) -> Path:
    """
    Create a small identities.yaml for testing.

    Returns path to the registry file.
    """
    registry_path = temp_dir / "identities.yaml"
    with open(registry_path, "w") as f:
        yaml.dump(sample_registry_dict, f, allow_unicode=True)
    return registry_path


@pytest.fixture
def sample_transport(temp_dir: Path) -> Path:
    """Transport table with one plain and one per-dimension row."""
    transport_path = temp_dir / "transport.yaml"
    with open(transport_path, "w") as f:
        yaml.dump(
            {
                "version": 1,
                "rows": {
                    "ID-2.16": {
                        "coefficients": {"einstein_ee": 1, "einstein_xx_g": -1}
                    },
                    "ID-3.7": {"coefficients": {"dstarF_spatial": {3: 1, 4: -1}}},
                },
            },
            f,
        )
    return transport_path


@pytest.fixture
def registry_path() -> Path:
    """The shipped identity registry."""
    return CONFIG_DIR / "identities.yaml"


@pytest.fixture
def transport_path() -> Path:
    """The shipped transport table."""
    return CONFIG_DIR / "transport.yaml"


@pytest.fixture
def catalog_path() -> Path:
    """The shipped solution catalog."""
    return CONFIG_DIR / "solutions.json"


@pytest.fixture
def small_config() -> RunConfig:
    """Run configuration small enough for unit and integration tests."""
    return RunConfig(seeds=2, points=3, max_workers=2)


@pytest.fixture
def stationary_sample():
    """Seeded stationary sample with potentials, n = 3."""
    data = random_data("random", seed=1)
    return data.sample((0.1, -0.2, 0.15), order=4, index=0)


@pytest.fixture
def static_sample():
    """Seeded static sample in four spatial dimensions."""
    data = random_data("random-static", seed=2, dim=4)
    return data.sample((0.05, 0.1, -0.1, 0.2), order=4, index=0)


@pytest.fixture
def twist_sample():
    """Exact-twist sample (ω = dψ)."""
    data = random_data("exact-twist", seed=3)
    point = data.domain.points(np.random.default_rng(0), 1)[0]
    return data.sample(point, order=4, index=0)
