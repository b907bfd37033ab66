"""
Tensor Calculus
===============

Pointwise coordinate tensor calculus over jet-valued fields.

Tensors are :class:`~core.jets.Jet` arrays whose tensor axes are coordinate
indices. A :class:`MetricValue` couples a metric jet with an ``axes`` map
from coordinates to jet variables (``None`` marks a coordinate every field is
independent of, such as the Killing time), so spacetime tensors can be built
over a purely spatial chart.

Conventions:
    - Γ^l_mn = ½ g^ls (∂_m g_sn + ∂_n g_sm - ∂_s g_mn)
    - R^r_smn = ∂_m Γ^r_ns - ∂_n Γ^r_ms + Γ^r_ml Γ^l_ns - Γ^r_nl Γ^l_ms
    - Ric_sn = R^r_srn, so the round sphere has positive scalar curvature
    - derivative indices are placed first
    - k-forms are fully antisymmetric arrays with ω = (1/k!) ω_I dx^I
    - (∗ω)_J = (1/k!) √|g| ε_IJ ω^I with ε = +1 on the orientation tuple
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from math import factorial, log
from typing import Optional, Sequence

import numpy as np

from core.errors import GeometryError, JetDomainError
from core.jets import (
    Jet,
    euler,
    inverse_euler,
    jet_einsum,
    jet_exp,
    jet_gradient,
    jet_matrix_inverse,
    jet_stack,
    require_order,
)

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
SYMMETRY_TOL = 1e-13
_SLOTS = "abcdefghijk"


def _scale(a: Jet) -> float:
    return max(1.0, float(np.max(np.abs(a.coeffs))) if a.coeffs.size else 0.0)


@dataclass(frozen=True)
class TensorValue:
    """
    Jet tensor with declared variance and symmetry.

    Attributes:
        comps: Component jets, one tensor axis per slot
        variance: One character per slot, ``"u"`` (up) or ``"d"`` (down)
        symmetry: ``"none"``, ``"symmetric"`` or ``"antisymmetric"`` in the
            first two slots
    """

    comps: Jet
    variance: str
    symmetry: str = "none"

    def __post_init__(self):
        if len(self.variance) != self.comps.ndim:
            raise GeometryError(
                f"Variance '{self.variance}' does not match rank {self.comps.ndim}"
            )
        if set(self.variance) - {"u", "d"}:
            raise GeometryError(f"Bad variance string '{self.variance}'")
        if self.symmetry not in ("none", "symmetric", "antisymmetric"):
            raise GeometryError(f"Unknown symmetry class '{self.symmetry}'")

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def dim(self) -> int:
        return self.comps.shape[0] if self.rank else 0

    def symmetry_defect(self) -> float:
        """Largest coefficient violation of the declared symmetry, relative."""
        if self.symmetry == "none" or self.rank < 2:
            return 0.0
        swapped = self.comps.swapaxes(0, 1).coeffs
        sign = 1.0 if self.symmetry == "symmetric" else -1.0
        return float(np.max(np.abs(self.comps.coeffs - sign * swapped))) / _scale(
            self.comps
        )

    def validate(self, tol: float = SYMMETRY_TOL) -> "TensorValue":
        defect = self.symmetry_defect()
        if defect > tol:
            raise GeometryError(
                f"Declared {self.symmetry} tensor violates symmetry by {defect:.2e}"
            )
        return self


class MetricValue:
    """
    Metric jet with cached connection and curvature.

    Attributes:
        g: Metric components, jet of shape (D, D)
        axes: Jet variable for each coordinate, or None
        signature: (positive, negative) eigenvalue counts at the point
        orientation: Coordinate tuple on which ε = +1

    Raises:
        GeometryError: If g is not symmetric, singular, or ill-signed

    Example:
        >>> metric = MetricValue(g, axes=(0, 1, 2), signature=(3, 0))
        >>> metric.scalar_curvature.value
    """

    def __init__(
        self,
        g: Jet,
        axes: Optional[Sequence[Optional[int]]] = None,
        signature: Optional[tuple[int, int]] = None,
        orientation: Optional[Sequence[int]] = None,
    ):
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise GeometryError(f"Metric must be square, got shape {g.shape}")
        self.g = g
        self.size = g.shape[0]
        self.axes = tuple(axes) if axes is not None else tuple(range(self.size))
        if len(self.axes) != self.size:
            raise GeometryError(
                f"{len(self.axes)} coordinate axes for a {self.size}-d metric"
            )
        self.orientation = (
            tuple(orientation) if orientation is not None else tuple(range(self.size))
        )
        if sorted(self.orientation) != list(range(self.size)):
            raise GeometryError(f"Orientation {self.orientation} is not a permutation")

        TensorValue(g, "dd", "symmetric").validate()
        g0 = np.asarray(g.value, dtype=float).reshape(self.size, self.size)
        if abs(np.linalg.det(g0)) <= SINGULAR_TOL:
            raise GeometryError("Singular metric at the evaluation point")
        eig = np.linalg.eigvalsh(0.5 * (g0 + g0.T))
        found = (int(np.sum(eig > 0)), int(np.sum(eig < 0)))
        if signature is not None and tuple(signature) != found:
            raise GeometryError(
                f"Metric signature {found} does not match declared {tuple(signature)}"
            )
        self.signature = found

    def __repr__(self) -> str:
        return (
            f"<MetricValue dim={self.size} signature={self.signature} "
            f"order={self.g.order}>"
        )

    @property
    def order(self) -> int:
        return self.g.order

    @property
    def det_sign(self) -> int:
        return -1 if self.signature[1] % 2 else 1

    def d(self, t: Jet) -> Jet:
        """Coordinate gradient, derivative index first."""
        return jet_gradient(t, self.axes)

    # -- metric algebra ----------------------------------------------------

    @cached_property
    def inverse(self) -> Jet:
        try:
            return jet_matrix_inverse(self.g, SINGULAR_TOL)
        except JetDomainError as e:
            raise GeometryError(str(e)) from e

    @cached_property
    def log_abs_det(self) -> Jet:
        """log|det g| through E(L) = tr(g⁻¹ E(g))."""
        eg = euler(self.g)
        e_log = jet_einsum("ij,ji->", self.inverse, eg)
        g0 = np.asarray(self.g.value).reshape(self.size, self.size)
        return inverse_euler(e_log, log(abs(np.linalg.det(g0))))

    @cached_property
    def volume_element(self) -> Jet:
        """√|det g|."""
        return jet_exp(0.5 * self.log_abs_det)

    @cached_property
    def christoffel(self) -> Jet:
        """Γ^l_mn with the upper index first."""
        require_order(self.g, 1, "christoffel")
        dg = self.d(self.g)
        lowered = 0.5 * (
            jet_einsum("msn->smn", dg) + jet_einsum("nsm->smn", dg) - dg
        )
        return jet_einsum("ls,smn->lmn", self.inverse, lowered)

    @cached_property
    def riemann(self) -> Jet:
        """R^r_smn."""
        require_order(self.g, 2, "riemann")
        gam = self.christoffel
        dgam = self.d(gam)
        quad = jet_einsum("rml,lns->rsmn", gam, gam)
        return (
            jet_einsum("mrns->rsmn", dgam)
            - jet_einsum("nrms->rsmn", dgam)
            + quad
            - quad.swapaxes(2, 3)
        )

    @cached_property
    def riemann_lowered(self) -> Jet:
        """R_qsmn = g_qr R^r_smn."""
        return jet_einsum("qr,rsmn->qsmn", self.g, self.riemann)

    @cached_property
    def ricci(self) -> Jet:
        return jet_einsum("rsrn->sn", self.riemann)

    @cached_property
    def scalar_curvature(self) -> Jet:
        return jet_einsum("sn,sn->", self.inverse, self.ricci)

    # -- index gymnastics ----------------------------------------------------

    def raise_index(self, t: Jet, slot: int = 0) -> Jet:
        s = _SLOTS[: t.ndim]
        out = s[:slot] + "z" + s[slot + 1 :]
        return jet_einsum(f"z{s[slot]},{s}->{out}", self.inverse, t)

    def lower_index(self, t: Jet, slot: int = 0) -> Jet:
        s = _SLOTS[: t.ndim]
        out = s[:slot] + "z" + s[slot + 1 :]
        return jet_einsum(f"z{s[slot]},{s}->{out}", self.g, t)

    def raise_all(self, t: Jet) -> Jet:
        for slot in range(t.ndim):
            t = self.raise_index(t, slot)
        return t

    def inner(self, a: Jet, b: Jet) -> Jet:
        """Full contraction of two covariant tensors of equal rank."""
        if a.shape != b.shape:
            raise GeometryError(f"Inner product of shapes {a.shape} and {b.shape}")
        if a.ndim == 0:
            return a * b
        return (a * self.raise_all(b)).sum()

    def norm_sq(self, a: Jet) -> Jet:
        return self.inner(a, a)

    # -- differential operators ----------------------------------------------

    def covariant_derivative(self, t: Jet, variance: str) -> Jet:
        """
        ∇t with the derivative index first.

        Args:
            t: Tensor jet with one axis per slot
            variance: ``"u"``/``"d"`` per slot

        Raises:
            JetOrderError: If t has order 0
        """
        if len(variance) != t.ndim:
            raise GeometryError(f"Variance '{variance}' does not match rank {t.ndim}")
        require_order(t, 1, "covariant derivative")
        gam = self.christoffel
        out = self.d(t)
        s = _SLOTS[: t.ndim]
        for k, v in enumerate(variance):
            swapped = s[:k] + "l" + s[k + 1 :]
            if v == "u":
                out = out + jet_einsum(f"{s[k]}ml,{swapped}->m{s}", gam, t)
            else:
                out = out - jet_einsum(f"lm{s[k]},{swapped}->m{s}", gam, t)
        return out

    def gradient(self, f: Jet) -> Jet:
        """Vector field ∇f (index up)."""
        return self.raise_index(self.d(f), 0)

    def hessian(self, f: Jet) -> Jet:
        require_order(f, 2, "hessian")
        return self.covariant_derivative(self.d(f), "d")

    def laplacian(self, f: Jet) -> Jet:
        """Δf = g^ij ∇_i∇_j f."""
        return jet_einsum("ij,ij->", self.inverse, self.hessian(f))

    def divergence(self, v: Jet) -> Jet:
        """∇_i v^i of a vector field."""
        return jet_einsum("ii->", self.covariant_derivative(v, "u"))

    # -- forms -------------------------------------------------------------

    @cached_property
    def epsilon(self) -> np.ndarray:
        return levi_civita(self.size, self.orientation)

    def hodge(self, form: Jet) -> Jet:
        """
        Hodge dual of a k-form.

        Raises:
            GeometryError: If k exceeds the dimension
        """
        k = form.ndim
        if k > self.size:
            raise GeometryError(f"Cannot dualize a {k}-form in dimension {self.size}")
        raised = self.raise_all(form)
        s = _SLOTS[: self.size]
        dual = jet_einsum(f"{s},{s[:k]}->{s[k:]}", self.epsilon, raised)
        return dual * self.volume_element * (1.0 / factorial(k))

    def form_inner(self, a: Jet, b: Jet) -> Jet:
        """⟨a, b⟩ = (1/k!) a_I b^I."""
        return self.inner(a, b) * (1.0 / factorial(a.ndim))

    def form_norm_sq(self, a: Jet) -> Jet:
        return self.form_inner(a, a)

    def sectional_curvature(self, x: np.ndarray, y: np.ndarray) -> float:
        """Sectional curvature of the plane spanned by two vectors."""
        rm = np.asarray(self.riemann_lowered.value)
        g0 = np.asarray(self.g.value)
        num = np.einsum("abcd,a,b,c,d->", rm, x, y, x, y)
        den = (x @ g0 @ x) * (y @ g0 @ y) - (x @ g0 @ y) ** 2
        if abs(den) <= SINGULAR_TOL:
            raise GeometryError("Degenerate 2-plane")
        return float(num / den)

    def frame_components(self, t: Jet, frame: Jet | np.ndarray) -> Jet:
        """Components T(e_a, e_b, ...) of a covariant tensor in a frame.

        ``frame[a]`` holds the coordinate components of e_a.
        """
        s = _SLOTS[: t.ndim]
        frames = ",".join(f"{c.upper()}{c}" for c in s)
        ops = [frame] * t.ndim
        return jet_einsum(f"{frames},{s}->{s.upper()}", *ops, t)


# -- exterior algebra ------------------------------------------------------------------


def levi_civita(dim: int, orientation: Optional[Sequence[int]] = None) -> np.ndarray:
    """Permutation symbol with ε[orientation] = +1."""
    orientation = tuple(orientation) if orientation is not None else tuple(range(dim))
    eps = np.zeros((dim,) * dim)
    for perm in permutations(range(dim)):
        eps[tuple(orientation[p] for p in perm)] = _perm_sign(perm)
    return eps


def _perm_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def exterior_derivative(form: Jet, axes: Sequence[Optional[int]]) -> Jet:
    """
    d of a k-form given as an antisymmetric array (a scalar jet is a 0-form).

    (dω)_{i0..ik} = Σ_j (-1)^j ∂_{ij} ω_{i0..îj..ik}
    """
    require_order(form, 1, "exterior derivative")
    grad = jet_gradient(form, axes)
    k = form.ndim
    total = np.zeros(grad.coeffs.shape)
    for j in range(k + 1):
        total += (-1) ** j * np.moveaxis(grad.coeffs, 0, j)
    return Jet(total, grad.dim, grad.order)


def wedge(a: Jet, b: Jet) -> Jet:
    """Wedge product through (k, l)-shuffles."""
    k, l = a.ndim, b.ndim
    if k == 0 or l == 0:
        return a * b
    sa, sb = _SLOTS[:k], _SLOTS[k : k + l]
    prod = jet_einsum(f"{sa},{sb}->{sa}{sb}", a, b)
    n = k + l
    total = np.zeros(prod.coeffs.shape)
    for first in combinations(range(n), k):
        rest = [i for i in range(n) if i not in first]
        perm = list(first) + rest
        # slot perm[p] of the result receives tensor axis p
        inverse = np.argsort(perm)
        total += _perm_sign(perm) * np.transpose(
            prod.coeffs, list(inverse) + [n]
        )
    return Jet(total, prod.dim, prod.order)


def interior_product(v: Jet | np.ndarray, form: Jet) -> Jet:
    """i_v ω, contracting the first slot."""
    s = _SLOTS[: form.ndim]
    return jet_einsum(f"{s[0]},{s}->{s[1:]}", v, form)


def one_form(components: Sequence[Jet]) -> Jet:
    """Stack scalar jets into a covector."""
    return jet_stack(list(components), axis=0)


def metric_compatibility_defect(metric: MetricValue) -> float:
    """max |∇g| at the point, relative to the metric scale."""
    nabla_g = metric.covariant_derivative(metric.g, "dd")
    return float(np.max(np.abs(nabla_g.value))) / max(
        1.0, float(np.max(np.abs(metric.g.value)))
    )


def first_bianchi_defect(metric: MetricValue) -> float:
    r = np.asarray(metric.riemann.value)
    cyc = r + np.einsum("rsmn->rmns", r) + np.einsum("rsmn->rnsm", r)
    return float(np.max(np.abs(cyc))) / max(1.0, float(np.max(np.abs(r))))


def contracted_bianchi_defect(metric: MetricValue) -> float:
    """∇^j R_ij - ½ ∇_i R at the point."""
    nabla_ric = metric.covariant_derivative(metric.ricci, "dd")
    lhs = jet_einsum("mj,mij->i", metric.inverse, nabla_ric)
    rhs = 0.5 * metric.d(metric.scalar_curvature)
    diff = np.asarray((lhs - rhs).value)
    scale = max(1.0, float(np.max(np.abs(np.asarray(lhs.value)))))
    return float(np.max(np.abs(diff))) / scale
