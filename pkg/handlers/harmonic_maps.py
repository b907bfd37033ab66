"""
Harmonic Maps Handler
=====================

Suite handler for the harmonic-map rows: the warped target geometry, the
Bochner formula for a general map, the chain of formulas for the stationary
map Φ = (u², ψ, φ₃, φ₄) and its static counterpart, and the master
identities whose printed form admits more than one reading.
"""

from core.check_loader import RowTableHandler
from core.harmonic_map import MAP_ROWS, MAP_TRANSPORT_ROWS


class HarmonicMapsHandler(RowTableHandler):
    """Handler for harmonic-map rows."""

    rows = MAP_ROWS
    transports = MAP_TRANSPORT_ROWS

    async def initialize(self) -> None:
        await super().initialize()
        conditional = [
            i for i, cfg in self.identities.items() if cfg.get("class") == "conditional"
        ]
        if conditional:
            self.logger.info(f"Conditional rows need solution data: {conditional}")
