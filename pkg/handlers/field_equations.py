"""
Field Equations Handler
=======================

Suite handler for the stress-tensor algebra and the residual-transport rows
of the Einstein–Maxwell–Klein–Gordon system.

Stress rows are unconditional. Transport rows compute ρ = LHS − RHS of a
derived equation on arbitrary data and close against Σ c_k b_k, the frozen
combination of field-equation residuals read from ``config/transport.yaml``.
"""

from typing import TYPE_CHECKING

from core.check_loader import RowTableHandler
from core.fieldeq import STRESS_ROWS, TRANSPORT_ROWS, residual_bundle

if TYPE_CHECKING:
    from core.sample import Sample


class FieldEquationsHandler(RowTableHandler):
    """Handler for stress and transport rows."""

    rows = STRESS_ROWS
    transports = TRANSPORT_ROWS

    def residuals(self, sample: "Sample") -> dict[str, float]:
        """Largest Einstein, Maxwell and Klein–Gordon residual at a sample."""
        largest = residual_bundle(sample).largest()
        self.logger.debug(f"Residuals at {sample}: {largest}")
        return largest
