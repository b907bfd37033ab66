"""
Run Settings
============

Run configuration for the command-line surface.

Values are layered: built-in defaults, then the environment (``.env`` is
loaded with python-dotenv), then a JSON config file, then command-line flags.

Environment:
    IDENTITY_MAX_WORKERS: Cap on the worker pool
    IDENTITY_JET_ORDER: Default jet order
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from dotenv import load_dotenv

from core.errors import ConfigError

logger = logging.getLogger(__name__)

ROOT = Path(__file__).parent.parent
CONFIG_DIR = ROOT / "config"

COMMANDS = ("verify", "catalog", "probe", "selftest", "list", "fit-transport")
MIN_ORDER, MAX_ORDER = 3, 6

# Default tolerance per identity class; registry entries may tighten or relax.
CLASS_TOLERANCES = {
    "unconditional": 1e-8,
    "transport": 1e-8,
    "conditional": 1e-7,
    "inequality": 1e-10,
    "property": 1e-9,
}


def load_environment(env_path: Optional[Path] = None) -> None:
    """Load ``.env`` from the repository root if present."""
    env_path = env_path or ROOT / ".env"
    if env_path.exists():
        load_dotenv(env_path)
        logger.debug(f".env loaded from {env_path}")


def _env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got '{raw}'") from e


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one invocation needs.

    Attributes:
        command: One of ``COMMANDS``
        ids: Identity ids to run (empty means all)
        suites: Suite names to run (empty means all)
        seeds: Seeds per identity
        points: Sample points per seed
        seed_offset: First seed
        order: Jet order
        tolerance: Global tolerance override
        tolerance_overrides: Per-identity tolerance
        dims: Spatial dimensions for dimension-general rows
        registry: Identity registry YAML
        transport: Frozen transport table YAML
        catalog: Solution catalog JSON
        report: JSON report path
        summary: Text summary path
        csv: Probe CSV path
        fail_fast: Cancel the run on the first failed sample
        max_workers: Worker pool size
    """

    command: str = "verify"
    ids: tuple[str, ...] = ()
    suites: tuple[str, ...] = ()
    seeds: int = 100
    points: int = 20
    seed_offset: int = 0
    order: int = 4
    tolerance: Optional[float] = None
    tolerance_overrides: Mapping[str, float] = field(default_factory=dict)
    dims: tuple[int, ...] = (3, 4, 5)
    registry: Path = CONFIG_DIR / "identities.yaml"
    transport: Path = CONFIG_DIR / "transport.yaml"
    catalog: Path = CONFIG_DIR / "solutions.json"
    report: Optional[Path] = None
    summary: Optional[Path] = None
    csv: Optional[Path] = None
    fail_fast: bool = False
    max_workers: int = 4

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}'")
        if self.seeds < 1:
            raise ConfigError(f"seeds must be ≥ 1, got {self.seeds}")
        if self.points < 1:
            raise ConfigError(f"points must be ≥ 1, got {self.points}")
        if not MIN_ORDER <= self.order <= MAX_ORDER:
            raise ConfigError(
                f"Jet order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {self.order}"
            )
        if self.tolerance is not None and self.tolerance <= 0:
            raise ConfigError(f"Tolerance must be positive, got {self.tolerance}")
        for key, tol in self.tolerance_overrides.items():
            if tol <= 0:
                raise ConfigError(f"Tolerance for {key} must be positive, got {tol}")
        if any(d < 2 for d in self.dims):
            raise ConfigError(f"Spatial dimensions must be ≥ 2, got {self.dims}")
        if self.max_workers < 1:
            raise ConfigError(f"max_workers must be ≥ 1, got {self.max_workers}")

    def tolerance_for(self, identity_id: str, default: float) -> float:
        """Per-id override, then the global override, then the registry default."""
        if identity_id in self.tolerance_overrides:
            return float(self.tolerance_overrides[identity_id])
        if self.tolerance is not None:
            return self.tolerance
        return default

    def updated(self, **changes: Any) -> "RunConfig":
        """Copy with the non-None values of ``changes`` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def environment(self) -> dict[str, Any]:
        """The stanza recorded in every report."""
        return {
            "jet_order": self.order,
            "seeds": self.seeds,
            "points": self.points,
            "seed_offset": self.seed_offset,
            "dims": list(self.dims),
            "tolerance": self.tolerance,
            "tolerance_overrides": dict(sorted(self.tolerance_overrides.items())),
        }


_PATH_FIELDS = {"registry", "transport", "catalog", "report", "summary", "csv"}
_TUPLE_FIELDS = {"ids", "suites", "dims"}


def _coerce(data: Mapping[str, Any], source: str) -> dict[str, Any]:
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    out = {}
    for key, value in data.items():
        if value is None:
            continue
        if key in _PATH_FIELDS:
            value = Path(value)
        elif key in _TUPLE_FIELDS:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v]
            value = tuple(int(v) for v in value) if key == "dims" else tuple(value)
        elif key == "tolerance_overrides":
            value = {str(k): float(v) for k, v in value.items()}
        out[key] = value
    return out


def read_config_file(path: Union[str, Path]) -> dict[str, Any]:
    """
    Parse a JSON run configuration.

    Raises:
        FileNotFoundError: If the file is missing
        ConfigError: If the JSON is malformed or has unknown keys
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return _coerce(data, str(path))


def build_run_config(
    flags: Optional[Mapping[str, Any]] = None,
    config_file: Optional[Union[str, Path]] = None,
) -> RunConfig:
    """
    Layer defaults, environment, config file and flags.

    Raises:
        ConfigError: On any invalid value
    """
    layered: dict[str, Any] = {}
    workers = _env_int("IDENTITY_MAX_WORKERS")
    if workers is not None:
        layered["max_workers"] = workers
    order = _env_int("IDENTITY_JET_ORDER")
    if order is not None:
        layered["order"] = order
    if config_file is not None:
        layered.update(read_config_file(config_file))
    if flags:
        layered.update(_coerce(flags, "command line"))
    try:
        config = RunConfig(**layered)
    except TypeError as e:
        raise ConfigError(str(e)) from e
    logger.debug(f"Run config: {config}")
    return config
