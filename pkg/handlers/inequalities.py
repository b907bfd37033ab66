"""
Inequalities Handler
====================

Suite handler for the pointwise inequalities behind the curvature
estimates. Each row returns lhs ≥ rhs comparisons; the normalized residual
is the violation, and the report records the smallest slack lhs − rhs.

Samples whose matter violates the sign hypotheses (Λ ≥ 0, κ ≤ 0, κ′ ≥ 0,
convex V) are skipped rather than failed.
"""

from typing import TYPE_CHECKING

from core.check_loader import RowTableHandler
from core.errors import ConfigError, DataClassError, HypothesisError
from core.evaluation import Evaluation
from core.inequalities import INEQUALITY_ROWS

if TYPE_CHECKING:
    from core.sample import Sample


class InequalitiesHandler(RowTableHandler):
    """Handler for inequality rows."""

    rows = INEQUALITY_ROWS

    def evaluate(self, identity_id: str, sample: "Sample") -> Evaluation:
        try:
            ev = super().evaluate(identity_id, sample)
        except HypothesisError as e:
            raise DataClassError(f"{identity_id} does not apply: {e}") from e
        for reading, comps in ev.readings.items():
            if not any(c.relation == "ge" for c in comps):
                raise ConfigError(
                    f"{identity_id} ({reading}) returned no inequality comparison"
                )
        return ev
