"""
Evaluation Records
==================

Per-sample comparison records produced by every identity row.

A row evaluates one or more :class:`Comparison` objects at one sample. Rows
whose printed form admits more than one reading return one tuple of
comparisons per reading; the runner aggregates readings separately and the
report names the reading that closes.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from core.jets import Jet, values

logger = logging.getLogger(__name__)

DEFAULT_READING = "printed"

ArrayLike = Union[Jet, float, np.ndarray]


def _flat(a: ArrayLike) -> np.ndarray:
    return np.atleast_1d(values(a)).astype(float).ravel()


@dataclass(frozen=True)
class Comparison:
    """
    One side-by-side comparison at a sample.

    Attributes:
        label: Short name of the compared line (``"lhs=rhs"``, ``"line 3"``)
        lhs: Left-hand side values
        rhs: Right-hand side values (broadcast against lhs)
        relation: ``"eq"`` for an equality, ``"ge"`` for lhs ≥ rhs
    """

    label: str
    lhs: np.ndarray
    rhs: np.ndarray
    relation: str = "eq"

    def __post_init__(self):
        if self.relation not in ("eq", "ge"):
            raise ValueError(f"Unknown relation '{self.relation}'")

    @classmethod
    def of(
        cls, label: str, lhs: ArrayLike, rhs: ArrayLike, relation: str = "eq"
    ) -> "Comparison":
        left, right = np.broadcast_arrays(_flat(lhs), _flat(rhs))
        return cls(label, left.copy(), right.copy(), relation)

    @property
    def scale(self) -> float:
        parts = [1.0]
        if self.lhs.size:
            parts.append(float(np.max(np.abs(self.lhs))))
            parts.append(float(np.max(np.abs(self.rhs))))
        return max(parts)

    @property
    def residual(self) -> float:
        """Normalized residual: max|lhs − rhs| / max(1, |lhs|, |rhs|).

        For an inequality this is the normalized violation, zero when
        lhs ≥ rhs everywhere.
        """
        if not self.lhs.size:
            return 0.0
        if self.relation == "ge":
            return max(0.0, float(np.max(self.rhs - self.lhs))) / self.scale
        return float(np.max(np.abs(self.lhs - self.rhs))) / self.scale

    @property
    def slack(self) -> float:
        """min(lhs − rhs); only meaningful for inequalities."""
        if not self.lhs.size:
            return 0.0
        return float(np.min(self.lhs - self.rhs))


@dataclass(frozen=True)
class Evaluation:
    """
    Outcome of one identity row at one sample.

    Attributes:
        readings: Comparisons per reading name
    """

    readings: Mapping[str, tuple[Comparison, ...]] = field(default_factory=dict)

    @classmethod
    def single(cls, *comparisons: Comparison) -> "Evaluation":
        return cls({DEFAULT_READING: tuple(comparisons)})

    @classmethod
    def with_readings(
        cls, readings: Mapping[str, Sequence[Comparison]]
    ) -> "Evaluation":
        return cls({name: tuple(comps) for name, comps in readings.items()})

    def residual(self, reading: str = DEFAULT_READING) -> float:
        comps = self.readings.get(reading)
        if comps is None:
            raise KeyError(f"No reading '{reading}' (have {sorted(self.readings)})")
        return max((c.residual for c in comps), default=0.0)

    def slack(self, reading: str = DEFAULT_READING) -> float:
        comps = [c for c in self.readings.get(reading, ()) if c.relation == "ge"]
        return min((c.slack for c in comps), default=0.0)

    def worst(self, reading: str = DEFAULT_READING) -> str:
        comps = self.readings.get(reading, ())
        if not comps:
            return ""
        return max(comps, key=lambda c: c.residual).label
