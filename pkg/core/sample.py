"""
Samples
=======

A field data set evaluated at one chart point.

:class:`FieldData` is the serializable description: stationary triple,
matter constants, Maxwell and scalar fields as :class:`FieldExpr` text, and
the domain points are drawn from. :class:`Sample` binds it to a point and a
jet order and lazily builds every jet the identity rows consume. Rows never
build fields themselves, so each quantity is computed once per sample.

Data classes:

    - random: seeded stationary data, n = 3, E = dφ₃, B = dφ₄, scalar field
    - random-forms: seeded stationary data with arbitrary E and B 1-forms
    - random-static: seeded static data, n = 3..5, E = dφ₃, scalar field
    - exact-twist: flat g, u(x¹), θ with ω = dψ, potentials and scalar field
    - coulomb: flat static g, Coulomb electric field
    - catalog: an exact solution from ``config/solutions.json``
    - target: a point of a warped target space, no spacetime data
    - bochner: random domain data together with a random map into a target
    - none: no data (arithmetic rows)
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Mapping, Optional, Sequence

import numpy as np

from core.errors import CatalogError, DataClassError
from core.field_expr import FieldExpr, JetEnv
from core.fieldeq import MatterData, ResidualBundle, residual_bundle
from core.jets import DEFAULT_ORDER, Jet, jet_stack
from core.stationary import EMDecomposition, StationaryData, StationaryPackage
from core.target import WarpedTarget

logger = logging.getLogger(__name__)

DATA_CLASSES = (
    "random",
    "random-forms",
    "random-static",
    "exact-twist",
    "coulomb",
    "catalog",
    "target",
    "bochner",
    "none",
)

DOMAIN_KINDS = ("cube", "shell", "upper")


@dataclass(frozen=True)
class Domain:
    """
    Region sample points are drawn from.

    Attributes:
        kind: ``"cube"`` ([−w, w]ⁿ), ``"shell"`` (r_min ≤ |x| ≤ r_max) or
            ``"upper"`` (y₁ ∈ [low, high], other coordinates in [−w, w])
        dim: Chart dimension
        half_width: w
        r_min: Inner shell radius
        r_max: Outer shell radius
        low: Lower bound of y₁ on the upper half space
        high: Upper bound of y₁ on the upper half space
        max_cos: Shell points keep |x_n|/|x| ≤ max_cos (off-axis charts)
    """

    kind: str = "cube"
    dim: int = 3
    half_width: float = 0.5
    r_min: float = 0.0
    r_max: float = 0.0
    low: float = 0.3
    high: float = 3.0
    max_cos: float = 1.0

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise CatalogError(f"Unknown domain kind '{self.kind}'")
        if self.kind == "shell" and not 0.0 < self.r_min < self.r_max:
            raise CatalogError(
                f"Shell needs 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]"
            )
        if self.kind == "upper" and not 0.0 < self.low < self.high:
            raise CatalogError("Upper domain needs 0 < low < high")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Domain":
        return cls(**dict(data))

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "shell":
            out = {"kind": "shell", "dim": self.dim}
            out.update(r_min=self.r_min, r_max=self.r_max)
            if self.max_cos < 1.0:
                out["max_cos"] = self.max_cos
            return out
        if self.kind == "upper":
            out = {"kind": "upper", "dim": self.dim, "low": self.low}
            return out | {"high": self.high, "half_width": self.half_width}
        return {"kind": "cube", "dim": self.dim, "half_width": self.half_width}

    def contains(self, point: Sequence[float]) -> bool:
        x = np.asarray(point, dtype=float)
        if x.shape != (self.dim,):
            return False
        if self.kind == "cube":
            return bool(np.all(np.abs(x) <= self.half_width))
        if self.kind == "upper":
            rest = np.all(np.abs(x[1:]) <= self.half_width)
            return bool(self.low <= x[0] <= self.high and rest)
        r = float(np.linalg.norm(x))
        if not self.r_min <= r <= self.r_max:
            return False
        return abs(x[-1]) <= self.max_cos * r

    def points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` points; deterministic in the generator state."""
        if self.kind == "cube":
            return rng.uniform(-self.half_width, self.half_width, (count, self.dim))
        if self.kind == "upper":
            pts = rng.uniform(-self.half_width, self.half_width, (count, self.dim))
            pts[:, 0] = rng.uniform(self.low, self.high, count)
            return pts
        out = []
        while len(out) < count:
            direction = rng.standard_normal(self.dim)
            direction /= np.linalg.norm(direction)
            if abs(direction[-1]) > self.max_cos:
                continue
            out.append(direction * rng.uniform(self.r_min, self.r_max))
        return np.array(out)


@dataclass(frozen=True)
class FieldData:
    """
    Serializable field content of one data set.

    Attributes:
        label: Name used in reports (catalog entry name or ``random#seed``)
        data_class: One of ``DATA_CLASSES``
        stationary: (u, θ, g), absent for target and none classes
        matter: Coupling constants and scalar target
        electric: E components when E is not given by a potential
        magnetic: B components when B is not given by a potential
        electric_potential: φ₃ with E = dφ₃
        magnetic_potential: φ₄ with B = dφ₄
        scalar: Components of the scalar field φ
        twist_potential: ψ with ω = dψ
        test_scalar: Auxiliary function for the Hessian and Laplacian rows
        warped: Warped target of the target and bochner classes
        map_components: Components of a map into ``warped``
        domain: Where sample points are drawn
        seed: Generator seed (0 for catalog entries)
    """

    label: str
    data_class: str
    stationary: Optional[StationaryData] = None
    matter: MatterData = field(default_factory=MatterData)
    electric: tuple[FieldExpr, ...] = ()
    magnetic: tuple[FieldExpr, ...] = ()
    electric_potential: Optional[FieldExpr] = None
    magnetic_potential: Optional[FieldExpr] = None
    scalar: tuple[FieldExpr, ...] = ()
    twist_potential: Optional[FieldExpr] = None
    test_scalar: Optional[FieldExpr] = None
    warped: Optional[WarpedTarget] = None
    map_components: tuple[FieldExpr, ...] = ()
    domain: Domain = field(default_factory=Domain)
    seed: int = 0

    def __post_init__(self):
        if self.data_class not in DATA_CLASSES:
            raise DataClassError(f"Unknown data class '{self.data_class}'")
        if self.electric and self.electric_potential is not None:
            raise DataClassError(f"{self.label}: E given both as form and potential")
        if self.magnetic and self.magnetic_potential is not None:
            raise DataClassError(f"{self.label}: B given both as form and potential")
        if self.scalar and len(self.scalar) != self.matter.target.dim:
            raise DataClassError(
                f"{self.label}: {len(self.scalar)} scalar components for a "
                f"{self.matter.target.dim}-dimensional target"
            )
        if self.stationary is not None and self.stationary.n != self.domain.dim:
            raise DataClassError(
                f"{self.label}: {self.stationary.n}-d data on a "
                f"{self.domain.dim}-d domain"
            )

    @property
    def n(self) -> int:
        return self.stationary.n if self.stationary else self.domain.dim

    def expressions(self) -> list[FieldExpr]:
        exprs = self.stationary.expressions() if self.stationary else []
        exprs += list(self.electric) + list(self.magnetic) + list(self.scalar)
        exprs += list(self.map_components)
        for extra in (
            self.electric_potential,
            self.magnetic_potential,
            self.twist_potential,
            self.test_scalar,
        ):
            if extra is not None:
                exprs.append(extra)
        return exprs

    def validate(self, points: np.ndarray) -> "FieldData":
        """
        Check every expression and the lapse on sample points.

        Raises:
            FieldExprGuardError: If an expression leaves its domain
            CatalogError: If u ≤ 0 somewhere
        """
        for expr in self.expressions():
            expr.validate(points)
        if self.stationary is not None:
            for p in np.atleast_2d(points):
                if self.stationary.u.value(p) <= 0.0:
                    raise CatalogError(f"{self.label}: u ≤ 0 at {tuple(p)}")
        return self

    def sample(
        self, point: Sequence[float], order: int = DEFAULT_ORDER, index: int = 0
    ) -> "Sample":
        return Sample(self, point, order, index)


class Sample:
    """
    Field data bound to one point.

    Attributes:
        data: The field data
        point: Chart point
        order: Jet order
        index: Position of the point in the run plan (seeds ``rng``)

    Example:
        >>> s = random_data("random", seed=0).sample((0.1, -0.2, 0.3))
        >>> s.pkg.ricci_bar
    """

    def __init__(
        self,
        data: FieldData,
        point: Sequence[float],
        order: int = DEFAULT_ORDER,
        index: int = 0,
    ):
        self.data = data
        self.point = tuple(float(x) for x in point)
        self.order = order
        self.index = index
        self._memo: dict[Hashable, Any] = {}

    def __repr__(self) -> str:
        coords = ", ".join(f"{x:.4g}" for x in self.point)
        return f"<Sample {self.data.label} at ({coords})>"

    @property
    def seed(self) -> int:
        return self.data.seed

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def matter(self) -> MatterData:
        return self.data.matter

    @cached_property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng([abs(self.seed), self.index])

    def memo(self, key: Hashable, factory: Callable[[], Any]) -> Any:
        """Compute once per sample."""
        if key not in self._memo:
            self._memo[key] = factory()
        return self._memo[key]

    @cached_property
    def env(self) -> JetEnv:
        return JetEnv(self.point, self.order)

    def _jet(self, expr: Optional[FieldExpr]) -> Optional[Jet]:
        return None if expr is None else expr.to_jet(self.env)

    def _zeros(self, shape: tuple[int, ...]) -> Jet:
        return Jet.zeros(shape, self.env.dim, self.order)

    @cached_property
    def pkg(self) -> StationaryPackage:
        """
        Raises:
            DataClassError: If the data carry no stationary triple
        """
        if self.data.stationary is None:
            raise DataClassError(f"{self.data.label} carries no stationary data")
        return StationaryPackage(self.data.stationary, self.env)

    @cached_property
    def electric_potential(self) -> Optional[Jet]:
        return self._jet(self.data.electric_potential)

    @cached_property
    def magnetic_potential(self) -> Optional[Jet]:
        return self._jet(self.data.magnetic_potential)

    @cached_property
    def em(self) -> EMDecomposition:
        """E and B; a vanishing magnetic potential counts as B absent."""
        p, data = self.pkg, self.data
        if self.electric_potential is not None:
            E = p.spatial.d(self.electric_potential)
        elif data.electric:
            E = jet_stack([self._jet(e) for e in data.electric])
        else:
            E = self._zeros((p.n,))
        B = None
        magnetic = data.magnetic_potential
        if magnetic is not None and not magnetic.is_zero:
            B = p.spatial.d(self.magnetic_potential)
        elif data.magnetic:
            B = jet_stack([self._jet(b) for b in data.magnetic])
        return EMDecomposition(p, E, B)

    @cached_property
    def phi(self) -> list[Jet]:
        return [self._jet(f) for f in self.data.scalar]

    @cached_property
    def V(self) -> Jet:
        """V∘φ, zero without a scalar field."""
        if not self.phi:
            return self._zeros(())
        return self.matter.target.value(self.phi, self.matter.mass_term)

    @cached_property
    def psi(self) -> Optional[Jet]:
        return self._jet(self.data.twist_potential)

    @cached_property
    def test_scalar(self) -> Jet:
        if self.data.test_scalar is None:
            raise DataClassError(f"{self.data.label} has no test scalar")
        return self._jet(self.data.test_scalar)

    @property
    def warped(self) -> WarpedTarget:
        if self.data.warped is None:
            raise DataClassError(f"{self.data.label} has no warped target")
        return self.data.warped

    @cached_property
    def map_components(self) -> list[Jet]:
        return [self._jet(f) for f in self.data.map_components]

    @cached_property
    def residuals(self) -> ResidualBundle:
        return residual_bundle(self)
