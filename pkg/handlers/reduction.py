"""
Reduction Handler
=================

Suite handler for the stationary reduction formulas.

Rows compare the Ricci tensor of ḡ in the frame (e₀, e₁, …, eₙ) with its
expression through (u, θ, g), relate the hat and conformal metrics to g, and
check the Maxwell split of F into E and B. Every row is unconditional: it
holds on arbitrary data.
"""

from typing import TYPE_CHECKING, Sequence

from core.check_loader import RowTableHandler
from core.stationary import REDUCTION_ROWS, SignResolution, resolve_twist_sign

if TYPE_CHECKING:
    from core.sample import Sample


class ReductionHandler(RowTableHandler):
    """Handler for the reduction identities."""

    rows = REDUCTION_ROWS

    def resolve_twist_sign(self, samples: Sequence["Sample"]) -> SignResolution:
        """
        Decide the ± of the twist-curl identity on the given samples.

        Raises:
            GeometryError: If the samples do not single out one sign
        """
        resolution = resolve_twist_sign(samples)
        self.logger.info(
            f"Twist curl closes with {resolution.reading} "
            f"(residuals {resolution.residuals})"
        )
        return resolution
