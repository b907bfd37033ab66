"""
Check Loader
============

Plugin system for loading identity suite handlers.

Provides the base class every suite handler implements and the factory that
creates a handler from its type name.
"""

import asyncio
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Mapping, Optional

from core.errors import ConfigError, UnknownIdentityError
from core.evaluation import Evaluation
from core.fieldeq import Transport, TransportTable
from core.settings import CONFIG_DIR

if TYPE_CHECKING:
    from core.sample import Sample

logger = logging.getLogger(__name__)


class CheckHandler(ABC):
    """
    Base class for all suite handlers.

    Each suite (reduction formulas, field equations, harmonic maps,
    inequalities, tensor properties) implements this interface so the
    registry and runner treat them uniformly.

    Pattern:
    1. Initialize handler with config dict
    2. Call initialize() to load frozen data and check the row table
    3. Use describe() to get the row description
    4. Use execute() (or evaluate() from a worker thread) to check a sample
    """

    def __init__(self, config: dict):
        """
        Initialize handler.

        Args:
            config: Configuration dict with keys:
                - name: Suite name
                - type: Handler type
                - identities: Mapping of identity id to registry fields
                - transport: Optional path to the frozen transport table
                - description: Suite description
        """
        self.config = config
        self.name = config.get("name", self.__class__.__name__)
        self.identities: dict[str, dict] = dict(config.get("identities", {}))
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @abstractmethod
    async def initialize(self) -> None:
        """
        Prepare the suite.

        Raises:
            ValueError: If a configured identity has no implementation
            FileNotFoundError: If frozen data is missing
        """

    @abstractmethod
    def describe(self, identity_id: str) -> dict:
        """
        Full description of one identity.

        Returns:
            Dict with id, suite, class, anchor, data classes and the
            docstring of the implementing row
        """

    @abstractmethod
    def evaluate(self, identity_id: str, sample: "Sample") -> Evaluation:
        """
        Evaluate one identity at one sample.

        Raises:
            UnknownIdentityError: If the suite does not provide the id
            DataClassError: If the sample's data do not fit the identity
        """

    async def execute(self, identity_id: str, sample: "Sample") -> Evaluation:
        """Evaluate in a worker thread."""
        return await asyncio.to_thread(self.evaluate, identity_id, sample)

    async def cleanup(self) -> None:
        """Release cached data (optional)."""

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.name} ({len(self.identities)} ids)>"


Row = Callable[["Sample"], Evaluation]
TransportRow = Callable[["Sample"], Transport]


class RowTableHandler(CheckHandler):
    """
    Handler backed by tables of row functions.

    Subclasses set ``rows`` (direct comparisons) and ``transports`` (rows
    closed against frozen residual-transport coefficients).
    """

    rows: Mapping[str, Row] = {}
    transports: Mapping[str, TransportRow] = {}

    def __init__(self, config: dict):
        super().__init__(config)
        self.table: Optional[TransportTable] = None

    @property
    def provided(self) -> list[str]:
        return list(self.rows) + list(self.transports)

    async def initialize(self) -> None:
        missing = [i for i in self.identities if i not in self.provided]
        if missing:
            raise ValueError(f"Suite {self.name} does not implement {missing}")
        needed = [i for i in self.identities if i in self.transports]
        if needed:
            path = Path(self.config.get("transport", CONFIG_DIR / "transport.yaml"))
            self.table = TransportTable.from_yaml(path)
            absent = [i for i in needed if i not in self.table]
            if absent:
                raise ConfigError(f"No frozen coefficients for {absent}")
        self.logger.info(f"Suite {self.name} ready with {len(self.identities)} ids")

    def _row(self, identity_id: str) -> Callable:
        if identity_id in self.rows:
            return self.rows[identity_id]
        if identity_id in self.transports:
            return self.transports[identity_id]
        raise UnknownIdentityError(identity_id)

    def describe(self, identity_id: str) -> dict:
        fn = self._row(identity_id)
        entry = self.identities.get(identity_id, {})
        doc = (fn.__doc__ or "").strip().splitlines()
        return {
            "id": identity_id,
            "suite": self.name,
            "class": entry.get("class", ""),
            "anchor": entry.get("anchor", ""),
            "data": list(entry.get("data", [])),
            "transport": identity_id in self.transports,
            "implementation": f"{fn.__module__}.{fn.__name__}",
            "summary": doc[0] if doc else "",
        }

    def transport(self, identity_id: str, sample: "Sample") -> Transport:
        if identity_id not in self.transports:
            raise UnknownIdentityError(identity_id)
        return self.transports[identity_id](sample)

    def evaluate(self, identity_id: str, sample: "Sample") -> Evaluation:
        if identity_id in self.rows:
            return self.rows[identity_id](sample)
        transport = self.transport(identity_id, sample)
        if self.table is None:
            raise ConfigError(f"Suite {self.name} was not initialized")
        return transport.evaluate(self.table.coefficients(identity_id, sample.n))


class CheckLoader:
    """
    Factory for creating suite handlers.

    Loads the appropriate handler class based on the handler type.
    """

    @staticmethod
    async def load_handler(handler_type: str, config: dict) -> CheckHandler:
        """
        Load and initialize a handler.

        Args:
            handler_type: Type identifier (e.g. "reduction", "harmonic_maps")
            config: Handler configuration dict

        Returns:
            Initialized CheckHandler instance

        Raises:
            ValueError: If handler_type is unknown
            ImportError: If the handler module cannot be imported

        Example:
            >>> handler = await CheckLoader.load_handler(
            ...     "reduction", {"name": "reduction", "identities": {"ID-2.6": {}}}
            ... )
        """
        logger.debug(f"Loading handler for type: {handler_type}")

        try:
            if handler_type == "reduction":
                from handlers.reduction import ReductionHandler

                handler = ReductionHandler(config)

            elif handler_type == "field_equations":
                from handlers.field_equations import FieldEquationsHandler

                handler = FieldEquationsHandler(config)

            elif handler_type == "harmonic_maps":
                from handlers.harmonic_maps import HarmonicMapsHandler

                handler = HarmonicMapsHandler(config)

            elif handler_type == "inequalities":
                from handlers.inequalities import InequalitiesHandler

                handler = InequalitiesHandler(config)

            elif handler_type == "tensor_properties":
                from handlers.tensor_properties import TensorPropertiesHandler

                handler = TensorPropertiesHandler(config)

            else:
                raise ValueError(f"Unknown handler type: {handler_type}")

            await handler.initialize()

            logger.info(f"Handler loaded: {handler_type}")
            return handler

        except ImportError as e:
            logger.error(f"Failed to import handler for {handler_type}: {e}")
            raise
        except Exception as e:
            logger.error(f"Failed to load handler for {handler_type}: {e}")
            raise
