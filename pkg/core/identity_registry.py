"""
Identity Registry
=================

Registry of identity rows grouped into suites, with lazily loaded handlers.

The registry file lists every row once, with its classification, a short
anchor statement, and the data classes it is evaluated on. Handlers are only
imported when a row of their suite is described or evaluated.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence

import yaml

from core.check_loader import CheckHandler, CheckLoader
from core.errors import ConfigError, UnknownIdentityError
from core.evaluation import Evaluation
from core.sample import DATA_CLASSES
from core.settings import CLASS_TOLERANCES

if TYPE_CHECKING:
    from core.sample import Sample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdentityEntry:
    """
    One registry row.

    Attributes:
        id: Identity id (``ID-2.6``, ``INEQ-3.17``, ``PROP-bianchi``)
        suite: Suite that evaluates the row
        classification: unconditional, transport, conditional, inequality or
            property
        anchor: Short statement of the identity
        data: Data classes the row is evaluated on
        dims: Spatial dimensions, or None for whatever the data class uses
        catalog: Catalog entries used by the catalog data class (empty: all)
        tolerance: Row tolerance, or None for the class default
        selftest: Whether ``selftest`` runs the row
    """

    id: str
    suite: str
    classification: str
    anchor: str
    data: tuple[str, ...]
    dims: Optional[tuple[int, ...]] = None
    catalog: tuple[str, ...] = ()
    tolerance: Optional[float] = None
    selftest: bool = False

    @classmethod
    def from_dict(cls, identity_id: str, suite: str, cfg: dict) -> "IdentityEntry":
        classification = cfg.get("class", "unconditional")
        if classification not in CLASS_TOLERANCES:
            raise ConfigError(f"{identity_id}: unknown class '{classification}'")
        data = tuple(cfg.get("data", ["random"]))
        unknown = set(data) - set(DATA_CLASSES)
        if unknown:
            raise ConfigError(f"{identity_id}: unknown data classes {sorted(unknown)}")
        dims = cfg.get("dims")
        tolerance = cfg.get("tolerance")
        return cls(
            id=identity_id,
            suite=suite,
            classification=classification,
            anchor=cfg.get("anchor", ""),
            data=data,
            dims=tuple(int(d) for d in dims) if dims else None,
            catalog=tuple(cfg.get("catalog", ())),
            tolerance=float(tolerance) if tolerance is not None else None,
            selftest=bool(cfg.get("selftest", False)),
        )

    @property
    def default_tolerance(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return CLASS_TOLERANCES[self.classification]


class IdentitySuite:
    """
    Represents a loadable suite of identity rows.

    Attributes:
        name: Suite identifier (e.g. "reduction")
        enabled: Whether the suite takes part in runs
        type: Handler type passed to :class:`CheckLoader`
        identities: Registry fields per identity id
        description: Human-readable suite description
        transport: Path of the frozen transport table
    """

    def __init__(self, name: str, config: dict, transport: Optional[Path] = None):
        self.name = name
        self.enabled = config.get("enabled", True)
        self.type = config["type"]
        self.identities: Dict[str, dict] = dict(config.get("identities") or {})
        self.description = config.get("description", "")
        self.transport = transport

        # Internal state
        self._loaded = False
        self._handler: Optional[CheckHandler] = None

    async def load(self) -> CheckHandler:
        """
        Lazy load the suite handler.

        Raises:
            ImportError: If the handler module cannot be imported
            RuntimeError: If handler initialization fails
        """
        if self._loaded and self._handler:
            return self._handler

        logger.info(f"Loading suite: {self.name} (type: {self.type})")

        config = {
            "name": self.name,
            "type": self.type,
            "identities": self.identities,
            "description": self.description,
        }
        if self.transport is not None:
            config["transport"] = str(self.transport)

        try:
            self._handler = await CheckLoader.load_handler(self.type, config)
            self._loaded = True
            logger.info(f"Suite loaded successfully: {self.name}")
            return self._handler
        except ImportError as e:
            logger.error(f"Failed to import handler for {self.name}: {e}")
            raise
        except Exception as e:
            logger.error(f"Failed to initialize {self.name}: {e}")
            raise RuntimeError(f"Handler initialization failed: {e}") from e

    def unload(self) -> None:
        logger.info(f"Unloading suite: {self.name}")
        self._loaded = False
        self._handler = None

    def is_loaded(self) -> bool:
        return self._loaded

    def __repr__(self) -> str:
        status = "loaded" if self._loaded else "unloaded"
        return f"<IdentitySuite {self.name} ({status})>"


class IdentityRegistry:
    """
    Every identity row and the suites evaluating them.

    Example:
        >>> registry = IdentityRegistry(Path("config/identities.yaml"))
        >>> registry.get("ID-2.6").classification
        'unconditional'
        >>> ev = await registry.evaluate("ID-2.6", sample)
    """

    def __init__(self, registry_path: Path, transport_path: Optional[Path] = None):
        """
        Raises:
            FileNotFoundError: If the registry file doesn't exist
            ConfigError: If it is malformed or lists an id twice
        """
        self.registry_path = Path(registry_path)
        self.transport_path = transport_path
        self.suites: Dict[str, IdentitySuite] = {}
        self.entries: Dict[str, IdentityEntry] = {}
        self.config: Dict[str, Any] = {}

        self._load_registry()
        logger.info(
            f"Registry initialized with {len(self.entries)} identities "
            f"in {len(self.suites)} suites"
        )

    def _load_registry(self) -> None:
        if not self.registry_path.exists():
            raise FileNotFoundError(f"Registry not found: {self.registry_path}")

        with open(self.registry_path) as f:
            try:
                self.config = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"{self.registry_path}: {e}") from e

        self.suites, self.entries = {}, {}
        for name, cfg in (self.config.get("suites") or {}).items():
            suite = IdentitySuite(name, cfg, self.transport_path)
            self.suites[name] = suite
            for identity_id, fields in suite.identities.items():
                if identity_id in self.entries:
                    raise ConfigError(f"Identity {identity_id} is registered twice")
                entry = IdentityEntry.from_dict(identity_id, name, fields or {})
                self.entries[identity_id] = entry

        logger.debug(f"Loaded {len(self.entries)} identities from registry")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, identity_id: str) -> bool:
        return identity_id in self.entries

    def get(self, identity_id: str) -> IdentityEntry:
        """
        Raises:
            UnknownIdentityError: If the id is not registered
        """
        try:
            return self.entries[identity_id]
        except KeyError:
            raise UnknownIdentityError(identity_id) from None

    def select(
        self,
        ids: Sequence[str] = (),
        suites: Sequence[str] = (),
        selftest: bool = False,
    ) -> List[IdentityEntry]:
        """
        Entries of enabled suites, in registry order.

        Raises:
            UnknownIdentityError: If an id is not registered
            ConfigError: If a suite is not registered
        """
        for identity_id in ids:
            self.get(identity_id)
        unknown = set(suites) - set(self.suites)
        if unknown:
            raise ConfigError(f"Unknown suites {sorted(unknown)}")
        out = []
        for entry in self.entries.values():
            if not self.suites[entry.suite].enabled:
                continue
            if ids and entry.id not in ids:
                continue
            if suites and entry.suite not in suites:
                continue
            if selftest and not entry.selftest:
                continue
            out.append(entry)
        return out

    async def handler_for(self, identity_id: str) -> CheckHandler:
        entry = self.get(identity_id)
        return await self.suites[entry.suite].load()

    async def describe_identities(self, identity_ids: List[str]) -> List[dict]:
        """Full descriptions, loading suites as needed."""
        logger.debug(f"Describing identities: {identity_ids}")
        descriptions = []
        for identity_id in identity_ids:
            if identity_id not in self.entries:
                logger.warning(f"Identity '{identity_id}' not found in registry")
                continue
            try:
                handler = await self.handler_for(identity_id)
                descriptions.append(handler.describe(identity_id))
            except Exception as e:
                logger.error(f"Failed to describe {identity_id}: {e}")
                descriptions.append({"id": identity_id, "error": str(e)})
        return descriptions

    async def evaluate(self, identity_id: str, sample: "Sample") -> Evaluation:
        """
        Evaluate one row at one sample.

        Raises:
            UnknownIdentityError: If the id is not registered
            DataClassError: If the sample does not fit the row
        """
        handler = await self.handler_for(identity_id)
        return await handler.execute(identity_id, sample)

    def get_all_suites(self) -> List[dict]:
        return [
            {
                "name": s.name,
                "enabled": s.enabled,
                "type": s.type,
                "identities": list(s.identities),
                "description": s.description,
                "loaded": s.is_loaded(),
            }
            for s in self.suites.values()
        ]

    async def cleanup(self) -> None:
        for suite in self.suites.values():
            if suite.is_loaded() and suite._handler is not None:
                await suite._handler.cleanup()
            suite.unload()
