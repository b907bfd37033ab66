"""
Target Geometry
===============

Riemannian targets of the maps appearing in the Bochner chain.

Every target exposes its metric, Christoffel symbols and lowered Riemann
tensor in closed form, evaluated directly on the jets of a map. The same
quantities are also available through the generic curvature code: the metric
is expanded as a jet field in target-chart variables, handed to
:class:`~core.tensor.MetricValue`, and composed back onto the domain with
:func:`~core.jets.jet_compose`. The two paths share nothing but the metric
formula.

Targets:
    - :class:`WarpedTarget`: y₁⁻²dy₁² + Σ c_a y₁^{−l_a} dy_a² on y₁ > 0
    - :class:`FlatTarget`: Euclidean ℝ^k
    - :class:`HyperbolicTarget`: upper half space y₁⁻²δ (curvature −1)
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import ConfigError, GeometryError
from core.jets import Jet, jet_compose, jet_einsum, jet_stack, jet_variables
from core.tensor import MetricValue

logger = logging.getLogger(__name__)

CURVATURE_PATHS = ("closed", "jet")


def _assemble(shape: tuple[int, ...], entries: dict, like: Jet) -> Jet:
    coeffs = np.zeros(tuple(shape) + (like.coeffs.shape[-1],))
    for index, jet in entries.items():
        coeffs[index] = jet.coeffs
    return Jet(coeffs, like.dim, like.order)


def _check_upper(y: Sequence[Jet]) -> None:
    if y[0].value <= 0:
        raise GeometryError(
            f"Target point leaves the upper half space: y₁ = {y[0].value:.6g}"
        )


class TargetGeometry(ABC):
    """
    Target manifold given in one chart.

    Subclasses implement the closed forms; the jet path is shared.
    """

    dim: int

    @abstractmethod
    def metric(self, y: Sequence[Jet]) -> Jet:
        """h_ab at the jets y."""

    @abstractmethod
    def christoffel(self, y: Sequence[Jet]) -> Jet:
        """Γ^a_bc at the jets y, upper index first."""

    @abstractmethod
    def riemann(self, y: Sequence[Jet]) -> Jet:
        """R_abcd at the jets y."""

    def metric_value(self, y0: Sequence[float], order: int) -> MetricValue:
        """The metric as a jet field in target-chart variables around y0."""
        if len(y0) != self.dim:
            raise GeometryError(f"{len(y0)} coordinates for a {self.dim}-d target")
        metric = self.metric(jet_variables(y0, order))
        return MetricValue(metric, signature=(self.dim, 0))

    def composed(self, quantity: str, phi: Sequence[Jet]) -> Jet:
        """
        A curvature quantity of the generic code, pulled back along phi.

        Args:
            quantity: Attribute of MetricValue (``"christoffel"``,
                ``"riemann_lowered"``, ``"g"``)
            phi: Map components as scalar jets over the domain
        """
        y0 = [float(p.value) for p in phi]
        mv = self.metric_value(y0, phi[0].order)
        return jet_compose(getattr(mv, quantity), phi)

    def christoffel_along(self, phi: Sequence[Jet], path: str = "closed") -> Jet:
        if path == "closed":
            return self.christoffel(phi)
        if path == "jet":
            return self.composed("christoffel", phi)
        raise ValueError(f"Unknown curvature path '{path}'")

    def riemann_along(self, phi: Sequence[Jet], path: str = "closed") -> Jet:
        if path == "closed":
            return self.riemann(phi)
        if path == "jet":
            return self.composed("riemann_lowered", phi)
        raise ValueError(f"Unknown curvature path '{path}'")

    def sectional_curvature(
        self, y0: Sequence[float], x: np.ndarray, v: np.ndarray
    ) -> float:
        rm = np.asarray(self.riemann(jet_variables(y0, 0)).value)
        h = np.asarray(self.metric(jet_variables(y0, 0)).value)
        num = np.einsum("abcd,a,b,c,d->", rm, x, v, x, v)
        den = (x @ h @ x) * (v @ h @ v) - (x @ h @ v) ** 2
        if abs(den) <= 1e-14:
            raise GeometryError("Degenerate 2-plane")
        return float(num / den)


@dataclass(frozen=True)
class WarpedTarget(TargetGeometry):
    """
    y₁⁻²dy₁² + c₂y₁^{−l₂}dy₂² + … on the upper half space.

    Attributes:
        c: Positive warping coefficients c₂..c_m
        l: Warping exponents l₂..l_m

    Example:
        >>> target = WarpedTarget.for_stationary(kappa=-1.0)
        >>> target.christoffel(jet_variables([2.0, 0.0, 0.0, 0.0], 0))
    """

    c: tuple[float, ...]
    l: tuple[float, ...]

    def __post_init__(self):
        if len(self.c) != len(self.l):
            raise GeometryError("Warped target needs one exponent per coefficient")
        if any(c <= 0 for c in self.c):
            raise GeometryError(f"Warping coefficients must be positive, got {self.c}")

    @classmethod
    def for_stationary(cls, kappa: float) -> "WarpedTarget":
        """y₁⁻²(dy₁² + dy₂²) − 2κy₁⁻¹(dy₃² + dy₄²)."""
        return cls(c=(1.0, -2.0 * kappa, -2.0 * kappa), l=(2.0, 1.0, 1.0))

    @classmethod
    def for_static(cls, kappa: float, n: int) -> "WarpedTarget":
        """y₁⁻²dy₁² − 4κ(n−2)/(n−1) y₁⁻¹dy₂²."""
        return cls(c=(-4.0 * kappa * (n - 2) / (n - 1),), l=(1.0,))

    @property
    def dim(self) -> int:
        return len(self.c) + 1

    def metric(self, y: Sequence[Jet]) -> Jet:
        _check_upper(y)
        y1 = y[0]
        entries = {(0, 0): y1**-2}
        for a, (c, l) in enumerate(zip(self.c, self.l), start=1):
            entries[(a, a)] = c * y1**-l
        return _assemble((self.dim, self.dim), entries, y1)

    def christoffel(self, y: Sequence[Jet]) -> Jet:
        _check_upper(y)
        y1 = y[0]
        entries = {(0, 0, 0): -(y1**-1)}
        for b, (c, l) in enumerate(zip(self.c, self.l), start=1):
            entries[(0, b, b)] = 0.5 * c * l * y1 ** (1.0 - l)
            entries[(b, 0, b)] = -0.5 * l * y1**-1
            entries[(b, b, 0)] = entries[(b, 0, b)]
        return _assemble((self.dim,) * 3, entries, y1)

    def riemann(self, y: Sequence[Jet]) -> Jet:
        _check_upper(y)
        y1 = y[0]
        entries = {}

        def pair(i: int, j: int, value: Jet) -> None:
            entries[(i, j, i, j)] = value
            entries[(j, i, j, i)] = value
            entries[(i, j, j, i)] = -value
            entries[(j, i, i, j)] = -value

        for a, (c, l) in enumerate(zip(self.c, self.l), start=1):
            pair(0, a, -0.25 * c * l * l * y1 ** (-l - 2.0))
        for a in range(1, self.dim):
            for b in range(a + 1, self.dim):
                ca, la = self.c[a - 1], self.l[a - 1]
                cb, lb = self.c[b - 1], self.l[b - 1]
                pair(a, b, -0.25 * ca * cb * la * lb * y1 ** (-la - lb))
        return _assemble((self.dim,) * 4, entries, y1)


@dataclass(frozen=True)
class FlatTarget(TargetGeometry):
    """Euclidean ℝ^k."""

    dim: int = 2

    def metric(self, y: Sequence[Jet]) -> Jet:
        return _assemble((self.dim, self.dim), {}, y[0]) + np.eye(self.dim)

    def christoffel(self, y: Sequence[Jet]) -> Jet:
        return _assemble((self.dim,) * 3, {}, y[0])

    def riemann(self, y: Sequence[Jet]) -> Jet:
        return _assemble((self.dim,) * 4, {}, y[0])


@dataclass(frozen=True)
class HyperbolicTarget(TargetGeometry):
    """Upper half space y₁⁻²δ of constant curvature −1."""

    dim: int = 2

    def metric(self, y: Sequence[Jet]) -> Jet:
        _check_upper(y)
        return y[0] ** -2 * np.eye(self.dim)

    def christoffel(self, y: Sequence[Jet]) -> Jet:
        _check_upper(y)
        k = self.dim
        sigma = -(y[0] ** -1)
        entries = {}
        for a in range(k):
            for b in range(k):
                for c in range(k):
                    term = 0.0
                    if a == b and c == 0:
                        term += 1.0
                    if a == c and b == 0:
                        term += 1.0
                    if b == c and a == 0:
                        term -= 1.0
                    if term:
                        entries[(a, b, c)] = term * sigma
        return _assemble((k,) * 3, entries, y[0])

    def riemann(self, y: Sequence[Jet]) -> Jet:
        h = self.metric(y)
        return -(
            jet_einsum("ac,bd->abcd", h, h) - jet_einsum("ad,bc->abcd", h, h)
        )


POTENTIALS = {
    "flat": ("quadratic", "quartic", "none"),
    "hyperbolic": ("distance", "none"),
}


@dataclass(frozen=True)
class ScalarTarget:
    """
    Target (W, g_W) of the scalar field together with its potential.

    The potential carries the factor a = m²/ħ²:

        - quadratic: V = a|y|²
        - quartic:   V = a|y|² + b|y|⁴
        - distance:  V = a(cosh d(y, e₁) − 1) = a|y − e₁|²/(2y₁)

    Attributes:
        kind: ``"flat"`` or ``"hyperbolic"``
        dim: Target dimension k
        potential: Potential family
        quartic: Coefficient b of the quartic family (≥ 0 keeps V convex)

    Raises:
        ConfigError: On an unknown kind or a potential the kind does not carry
    """

    kind: str = "flat"
    dim: int = 2
    potential: str = "quadratic"
    quartic: float = 0.0

    def __post_init__(self):
        if self.kind not in POTENTIALS:
            raise ConfigError(f"Unknown scalar target '{self.kind}'")
        if self.potential not in POTENTIALS[self.kind]:
            raise ConfigError(
                f"Potential '{self.potential}' is not available on a {self.kind} target"
            )

    @property
    def geometry(self) -> TargetGeometry:
        if self.kind == "flat":
            return FlatTarget(self.dim)
        return HyperbolicTarget(self.dim)

    def value(self, y: Sequence[Jet], mass_term: float) -> Jet:
        """V at the jets y."""
        if self.potential == "none":
            return 0.0 * y[0]
        if self.potential == "distance":
            _check_upper(y)
            shifted = [y[0] - 1.0] + list(y[1:])
            sq = sum((s * s for s in shifted[1:]), shifted[0] * shifted[0])
            return mass_term * sq / (2.0 * y[0])
        sq = sum((c * c for c in y[1:]), y[0] * y[0])
        if self.potential == "quartic":
            return mass_term * sq + self.quartic * sq * sq
        return mass_term * sq

    def _pulled_back(self, phi: Sequence[Jet], mass_term: float, hessian: bool) -> Jet:
        y0 = [float(p.value) for p in phi]
        order = phi[0].order
        mv = self.geometry.metric_value(y0, order)
        v = self.value(jet_variables(y0, order), mass_term)
        return jet_compose(mv.hessian(v) if hessian else mv.gradient(v), phi)

    def gradient(self, phi: Sequence[Jet], mass_term: float) -> Jet:
        """(∇V)∘φ, index up."""
        return self._pulled_back(phi, mass_term, hessian=False)

    def hessian(self, phi: Sequence[Jet], mass_term: float) -> Jet:
        """(Hess V)∘φ."""
        return self._pulled_back(phi, mass_term, hessian=True)

    def is_convex(self) -> bool:
        return self.potential != "quartic" or self.quartic >= 0.0


def stack_map(components: Sequence[Jet]) -> Jet:
    return jet_stack(list(components))
