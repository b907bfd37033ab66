"""
Harmonic Maps
=============

Maps into warped upper half spaces and the Bochner chain built on them.

:class:`MapDifferential` carries the differential of a map Φ from a
Riemannian domain (ĝ over the stationary chart) into a target geometry and
derives the second fundamental form, tension, energy density and the four
terms of the Bochner formula for maps that need not be harmonic.

The stationary map is Φ = (u², ψ, φ₃, φ₄) into
y₁⁻²(dy₁² + dy₂²) − 2κy₁⁻¹(dy₃² + dy₄²); the static map is Φ = (u², φ₃) into
y₁⁻²dy₁² − 4κ(n−2)/(n−1)y₁⁻¹dy₂². Both targets are Riemannian only for κ < 0.

Row functions take a :class:`~core.sample.Sample`; unconditional rows return
an :class:`~core.evaluation.Evaluation`, transport rows a
:class:`~core.fieldeq.Transport`.
"""

import logging
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from core.errors import DataClassError, GeometryError
from core.evaluation import Comparison, Evaluation
from core.fieldeq import (
    Transport,
    potential_gradient,
    scalar_differential,
    scalar_pullback,
    spatial_component,
)
from core.jets import Jet, jet_einsum, jet_stack, jet_variables, values
from core.target import TargetGeometry, WarpedTarget
from core.tensor import MetricValue, wedge

if TYPE_CHECKING:
    from core.sample import Sample

logger = logging.getLogger(__name__)


class MapDifferential:
    """
    A map Φ from a Riemannian domain chart into a target chart.

    Attributes:
        domain: Domain metric
        target: Target geometry
        components: Φ^a as scalar jets over the domain chart
        path: ``"closed"`` for closed-form target curvature, ``"jet"`` for
            the generic curvature code composed along Φ

    Raises:
        GeometryError: If the map leaves the target chart at the point
    """

    def __init__(
        self,
        domain: MetricValue,
        target: TargetGeometry,
        components: Sequence[Jet],
        path: str = "closed",
    ):
        if len(components) != target.dim:
            raise GeometryError(
                f"{len(components)} map components for a {target.dim}-d target"
            )
        self.domain = domain
        self.target = target
        self.components = list(components)
        self.path = path

    def __repr__(self) -> str:
        return f"<MapDifferential into {self.target!r} path={self.path}>"

    @cached_property
    def D(self) -> Jet:
        """∂_αΦ^a, shape (m, N)."""
        return jet_stack([self.domain.d(c) for c in self.components])

    @cached_property
    def h(self) -> Jet:
        return self.target.metric(self.components)

    @cached_property
    def gamma(self) -> Jet:
        return self.target.christoffel_along(self.components, self.path)

    @cached_property
    def riemann(self) -> Jet:
        return self.target.riemann_along(self.components, self.path)

    @cached_property
    def christoffel_contraction(self) -> Jet:
        """Γ^a_bc ∂_αΦ^b ∂_βΦ^c."""
        return jet_einsum("abc,bi,cj->aij", self.gamma, self.D, self.D)

    @cached_property
    def second_fundamental(self) -> Jet:
        """(∇dΦ)^a_αβ = ∇_αβΦ^a + Γ^a_bc ∂_αΦ^b ∂_βΦ^c."""
        hess = jet_stack([self.domain.hessian(c) for c in self.components])
        return hess + self.christoffel_contraction

    @cached_property
    def tension(self) -> Jet:
        return jet_einsum("ij,aij->a", self.domain.inverse, self.second_fundamental)

    @cached_property
    def pullback(self) -> Jet:
        return jet_einsum("ab,ai,bj->ij", self.h, self.D, self.D)

    @cached_property
    def energy(self) -> Jet:
        """e(Φ) = tr_ĝ Φ*h."""
        return jet_einsum("ij,ij->", self.domain.inverse, self.pullback)

    def covariant_derivative_of(self, W: Jet) -> Jet:
        """∇_αW^a = ∂_αW^a + Γ^a_bc W^b ∂_αΦ^c for a section W along Φ."""
        dW = jet_stack([self.domain.d(W[a]) for a in range(self.target.dim)])
        return dW + jet_einsum("abc,b,ci->ai", self.gamma, W, self.D)

    def inner(self, A: Jet, B: Jet) -> Jet:
        """⟨A, B⟩ = h_ab ĝ^αβ A^a_α B^b_β."""
        return jet_einsum("ab,ij,ai,bj->", self.h, self.domain.inverse, A, B)

    def component_norm_sq(self, a: int) -> Jet:
        """|(∇dΦ)^a|²_ĝ, without the target metric."""
        S, inv = self.second_fundamental[a], self.domain.inverse
        return jet_einsum("ik,jl,ij,kl->", inv, inv, S, S)

    @cached_property
    def hessian_norm_sq(self) -> Jet:
        S, inv = self.second_fundamental, self.domain.inverse
        return jet_einsum("ab,ik,jl,aij,bkl->", self.h, inv, inv, S, S)

    @cached_property
    def curvature_term(self) -> Jet:
        """R_abcd Φ^a_α Φ^b_β Φ^c_γ Φ^d_δ ĝ^αγ ĝ^βδ."""
        D, inv = self.D, self.domain.inverse
        return jet_einsum(
            "abcd,ai,bj,ck,dl,ik,jl->", self.riemann, D, D, D, D, inv, inv
        )

    @cached_property
    def ricci_term(self) -> Jet:
        return self.domain.inner(self.domain.ricci, self.pullback)

    def bochner_rhs(self) -> Jet:
        """2⟨dΦ, ∇τ⟩ + 2|∇dΦ|² + 2⟨Ric, Φ*h⟩ − 2R(dΦ, dΦ, dΦ, dΦ)."""
        grad_tension = self.covariant_derivative_of(self.tension)
        return (
            2.0 * self.inner(self.D, grad_tension)
            + 2.0 * self.hessian_norm_sq
            + 2.0 * self.ricci_term
            - 2.0 * self.curvature_term
        )


# -- maps of a sample ----------------------------------------------------------------


def _outer(a: Jet, b: Jet) -> Jet:
    return jet_einsum("i,j->ij", a, b)


def _sym(a: Jet, b: Jet) -> Jet:
    return _outer(a, b) + _outer(b, a)


def wedge_sq(s: "Sample", a: Jet, b: Jet) -> Jet:
    return s.pkg.spatial.form_norm_sq(wedge(a, b))


def _require_phantom(s: "Sample") -> None:
    if s.matter.kappa >= 0:
        raise DataClassError("The map target is Riemannian only for κ < 0")


def stationary_map(s: "Sample", path: str = "closed") -> MapDifferential:
    """
    Φ = (u², ψ, φ₃, φ₄) on (ĝ) into the stationary target.

    Raises:
        DataClassError: Without exact-twist potentials, E/B potentials or κ < 0
    """
    if s.n != 3:
        raise DataClassError("The stationary map is defined for n = 3")
    if s.psi is None:
        raise DataClassError("The stationary map needs a twist potential ψ")
    if s.electric_potential is None or s.magnetic_potential is None:
        raise DataClassError("The stationary map needs E = dφ₃ and B = dφ₄")
    _require_phantom(s)

    def build() -> MapDifferential:
        p = s.pkg
        comps = [p.u * p.u, s.psi, s.electric_potential, s.magnetic_potential]
        target = WarpedTarget.for_stationary(s.matter.kappa)
        return MapDifferential(p.ghat, target, comps, path)

    return s.memo(("stationary_map", path), build)


def static_map(s: "Sample", path: str = "closed") -> MapDifferential:
    """
    Φ = (u², φ₃) on (ĝ) into the static target.

    Raises:
        DataClassError: Without static electric potential data or κ < 0
    """
    p = s.pkg
    if not p.static or s.em.B is not None:
        raise DataClassError("The static map needs θ ≡ 0 and B = 0")
    if s.electric_potential is None:
        raise DataClassError("The static map needs E = dφ₃")
    _require_phantom(s)

    def build() -> MapDifferential:
        comps = [p.u * p.u, s.electric_potential]
        target = WarpedTarget.for_static(s.matter.kappa, p.n)
        return MapDifferential(p.ghat, target, comps, path)

    return s.memo(("static_map", path), build)


class ChainTerms:
    """Spatial building blocks shared by the chain rows."""

    def __init__(self, s: "Sample"):
        p = s.pkg
        self.s = s
        self.p = p
        self.sp = p.spatial
        self.kappa = s.matter.kappa
        self.u = p.u
        self.L = p.log_u
        self.dL = p.dlog_u
        self.omega = p.omega
        self.E = s.em.E
        self.B = s.em.magnetic
        self.E2 = self.sp.norm_sq(self.E)
        self.B2 = self.sp.norm_sq(self.B)
        self.dL2 = self.sp.norm_sq(self.dL)
        self.om2 = p.omega_norm_sq

    def lifted(self, *forms: Jet) -> list[Jet]:
        return [self.p.lift(f) for f in forms]

    def norm(self, t: Jet) -> Jet:
        return self.sp.norm_sq(t)

    def inner(self, a: Jet, b: Jet) -> Jet:
        return self.sp.inner(a, b)

    def shifted_derivative(self, form: Jet, weight: float) -> Jet:
        """∇_iX_j − w(X_i L_j + X_j L_i)."""
        nabla = self.sp.covariant_derivative(form, "d")
        return nabla - weight * _sym(form, self.dL)


# -- target rows -----------------------------------------------------------------------


def _target_point(s: "Sample", dim: int) -> list[float]:
    y = [float(v) for v in s.point[:dim]]
    return y + [0.0] * (dim - len(y))


def target_christoffel_row(s: "Sample") -> Evaluation:
    target = s.warped
    y0 = _target_point(s, target.dim)
    closed = target.christoffel(jet_variables(y0, 0))
    generic = target.metric_value(y0, 1).christoffel
    return Evaluation.single(Comparison.of("Γ closed = Γ(h)", closed, generic))


def target_riemann_row(s: "Sample") -> Evaluation:
    target = s.warped
    y0 = _target_point(s, target.dim)
    closed = target.riemann(jet_variables(y0, 0))
    generic = target.metric_value(y0, 2).riemann_lowered
    return Evaluation.single(Comparison.of("R closed = R(h)", closed, generic))


def stationary_christoffel_row(s: "Sample") -> Evaluation:
    kappa = s.matter.kappa
    target = WarpedTarget.for_stationary(kappa)
    y0 = _target_point(s, 4)
    y1 = y0[0]
    gamma = values(target.metric_value(y0, 1).christoffel)
    expected = {
        (0, 0, 0): -1.0 / y1,
        (0, 1, 1): 1.0 / y1,
        (0, 2, 2): -kappa,
        (0, 3, 3): -kappa,
        (1, 0, 1): -1.0 / y1,
        (2, 0, 2): -0.5 / y1,
        (3, 0, 3): -0.5 / y1,
    }
    keys = list(expected)
    return Evaluation.single(
        Comparison.of(
            "Γ specialization",
            np.array([gamma[k] for k in keys]),
            np.array([expected[k] for k in keys]),
        )
    )


def stationary_riemann_row(s: "Sample") -> Evaluation:
    """Curvature of the stationary target at y₁ = u²."""
    kappa = s.matter.kappa
    target = WarpedTarget.for_stationary(kappa)
    y0 = _target_point(s, 4)
    u2 = y0[0]
    rm = values(target.metric_value(y0, 2).riemann_lowered)
    expected = {
        (0, 1, 0, 1): -(u2**-4),
        (0, 2, 0, 2): 0.5 * kappa * u2**-3,
        (0, 3, 0, 3): 0.5 * kappa * u2**-3,
        (1, 2, 1, 2): kappa * u2**-3,
        (1, 3, 1, 3): kappa * u2**-3,
        (2, 3, 2, 3): -(kappa**2) * u2**-2,
    }
    keys = list(expected)
    return Evaluation.single(
        Comparison.of(
            "R specialization",
            np.array([rm[k] for k in keys]),
            np.array([expected[k] for k in keys]),
        )
    )


# -- general Bochner -------------------------------------------------------------------


def bochner_row(s: "Sample") -> Evaluation:
    """Δ̂e(Φ) from the jets of e against the four curvature terms."""
    if not s.map_components:
        raise DataClassError("The general Bochner row needs map data")
    p = s.pkg
    closed = MapDifferential(p.ghat, s.warped, s.map_components, "closed")
    generic = MapDifferential(p.ghat, s.warped, s.map_components, "jet")
    lhs = p.ghat.laplacian(closed.energy)
    return Evaluation.single(Comparison.of("Δ̂e(Φ)", lhs, generic.bochner_rhs()))


# -- stationary chain: unconditional ---------------------------------------------------


def christoffel_hessian_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    p, ghat = t.p, t.p.ghat
    kappa, u = t.kappa, t.u
    dL, om, E, B = t.lifted(t.dL, t.omega, t.E, t.B)
    du = p.lift(t.sp.d(u))
    G = m.christoffel_contraction
    S = m.second_fundamental
    maxwell = _outer(E, E) + _outer(B, B)
    gamma_lines = [
        -4.0 * _outer(du, du) + u**-2 * _outer(om, om) - kappa * maxwell,
        -2.0 * _sym(om, dL),
        -_sym(dL, E),
        -_sym(dL, B),
    ]
    hess_lines = [
        2.0 * u * u * ghat.hessian(t.L) + u**-2 * _outer(om, om) - kappa * maxwell,
        ghat.hessian(s.psi) - 2.0 * _sym(om, dL),
        ghat.hessian(s.electric_potential) - _sym(dL, E),
        ghat.hessian(s.magnetic_potential) - _sym(dL, B),
    ]
    comps = [Comparison.of(f"Γ^{a + 1}ΦΦ", G[a], gamma_lines[a]) for a in range(4)]
    comps += [Comparison.of(f"(∇̂²Φ)^{a + 1}", S[a], hess_lines[a]) for a in range(4)]
    return Evaluation.single(*comps)


def stationary_pullback(t: ChainTerms) -> Jet:
    """4dlog u⊗dlog u + u⁻⁴ω⊗ω − 2κu⁻²(E⊗E + B⊗B)."""
    return (
        4.0 * _outer(t.dL, t.dL)
        + t.u**-4 * _outer(t.omega, t.omega)
        - 2.0 * t.kappa * t.u**-2 * (_outer(t.E, t.E) + _outer(t.B, t.B))
    )


def stationary_energy(t: ChainTerms) -> Jet:
    return (
        4.0 * t.dL2
        + t.u**-4 * t.om2
        - 2.0 * t.kappa * t.u**-2 * (t.E2 + t.B2)
    )


def energy_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    return Evaluation.single(
        Comparison.of("e(Φ)", m.energy, stationary_energy(t)),
        Comparison.of("Φ*h", m.pullback, t.p.lift(stationary_pullback(t))),
    )


def orthonormal_frame(s: "Sample") -> np.ndarray:
    """
    F₀ = u⁻¹∂_t and F_i orthonormalized from e_i, row α holding F_α.

    The spatial block is Gram–Schmidt under g, done through the Cholesky
    factor of g at the point.
    """
    p = s.pkg
    g0 = np.asarray(values(p.g))
    inv_chol = np.linalg.inv(np.linalg.cholesky(g0))
    e = np.asarray(values(p.frame))
    F = np.zeros_like(e)
    F[0] = e[0] / float(p.u.value)
    F[1:] = inv_chol @ e[1:]
    return F


def frame_norm_row(s: "Sample") -> Evaluation:
    m = stationary_map(s) if s.n == 3 and s.psi is not None else static_map(s)
    F = orthonormal_frame(s)
    S = values(m.second_fundamental)
    comps = []
    for a in range(m.target.dim):
        framed = F @ S[a] @ F.T
        comps.append(
            Comparison.of(
                f"|(∇̂²Φ)^{a + 1}|²", m.component_norm_sq(a), np.sum(framed**2)
            )
        )
    return Evaluation.single(*comps)


def hessian_norm_lapse_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    u, kappa = t.u, t.kappa
    inner_block = (
        2.0 * t.sp.hessian(t.L)
        + u**-4 * _outer(t.omega, t.omega)
        - kappa * u**-2 * (_outer(t.E, t.E) + _outer(t.B, t.B))
    )
    line1 = (
        4.0 * t.dL2 * t.dL2
        + 2.0 * u**-4 * wedge_sq(s, t.omega, t.dL)
        + t.norm(inner_block)
    )
    line2 = u**-4 * t.inner(t.dL, t.omega) ** 2 + u**-4 * t.norm(
        t.shifted_derivative(t.omega, 2.0)
    )
    return Evaluation.single(
        Comparison.of("u⁻⁴|(∇̂²Φ)¹|²", u**-4 * m.component_norm_sq(0), line1),
        Comparison.of("u⁻⁴|(∇̂²Φ)²|²", u**-4 * m.component_norm_sq(1), line2),
    )


def hessian_norm_field_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    u = t.u
    comps = []
    for a, (name, X) in enumerate((("E", t.E), ("B", t.B)), start=2):
        expected = (
            u**-2 * t.inner(t.dL, X) ** 2
            + 2.0 * 0.25 * u**-6 * wedge_sq(s, t.omega, X)
            + u**-2 * t.norm(t.shifted_derivative(X, 1.0))
        )
        lhs = u**-2 * m.component_norm_sq(a)
        comps.append(Comparison.of(f"u⁻²|(∇̂²Φ)^{a + 1}|² ({name})", lhs, expected))
    return Evaluation.single(*comps)


def _pair_curvature(s: "Sample", m: MapDifferential, grads: Sequence[Jet]) -> Jet:
    """2Σ_{a<b} R_abab(|∇y_a|²|∇y_b|² − ⟨∇y_a, ∇y_b⟩²)."""
    sp = s.pkg.spatial
    rm = m.target.riemann(m.components)
    total = 0.0 * sp.norm_sq(grads[0])
    for a in range(len(grads)):
        for b in range(a + 1, len(grads)):
            gram = (
                sp.norm_sq(grads[a]) * sp.norm_sq(grads[b])
                - sp.inner(grads[a], grads[b]) ** 2
            )
            total = total + 2.0 * rm[a, b, a, b] * gram
    return total


def curvature_pairs_row(s: "Sample") -> Evaluation:
    generic = stationary_map(s, path="jet")
    t = ChainTerms(s)
    grads = [t.sp.d(t.u * t.u), t.omega, t.E, t.B]
    rhs = _pair_curvature(s, stationary_map(s), grads)
    return Evaluation.single(Comparison.of("R(dΦ⁴)", generic.curvature_term, rhs))


def curvature_wedges_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    u, kappa = t.u, t.kappa

    def w(a, b):
        return wedge_sq(s, a, b)

    uE, uB, uo = t.E / u, t.B / u, t.omega * u**-2
    rhs = (
        8.0 * w(t.dL, uo)
        - 4.0 * kappa * (w(t.dL, uE) + w(t.dL, uB))
        - 2.0 * kappa * (w(uo, uE) + w(uo, uB))
        + 2.0 * kappa**2 * w(uE, uB)
    )
    return Evaluation.single(Comparison.of("−R(dΦ⁴)", -m.curvature_term, rhs))


def hat_ricci_spatial(t: ChainTerms) -> Jet:
    """R̂ic(e_i, e_j) = R̄ic(e_i, e_j) − u⁻⁴(|ω|²g − ω⊗ω)."""
    p = t.p
    return p.ricci_bar[1:, 1:] - t.u**-4 * (
        t.om2 * p.g - _outer(t.omega, t.omega)
    )


def ricci_pullback_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    inv = t.sp.inverse
    rhs = jet_einsum(
        "ik,jl,ij,kl->", inv, inv, hat_ricci_spatial(t), stationary_pullback(t)
    )
    return Evaluation.single(Comparison.of("⟨R̂ic, Φ*h⟩", m.ricci_term, rhs))


def energy_laplacian_split_row(s: "Sample") -> Evaluation:
    """Δ̂ of ½e(Φ) + κ′V/2 and its closed form."""
    m = stationary_map(s)
    t = ChainTerms(s)
    kp = s.matter.kappa_prime
    f = 0.5 * m.energy + 0.5 * kp * s.V
    closed = (
        2.0 * t.dL2
        + 0.5 * t.u**-4 * t.om2
        - t.kappa * t.u**-2 * (t.E2 + t.B2)
        + 0.5 * kp * s.V
    )
    split = t.sp.laplacian(f) + t.inner(t.dL, t.sp.d(f))
    return Evaluation.single(
        Comparison.of("½e + κ′V/2", f, closed),
        Comparison.of("Δ̂(½e + κ′V/2)", t.p.ghat.laplacian(f), split),
    )


# -- static chain: unconditional -------------------------------------------------------


def static_factor(s: "Sample") -> float:
    n = s.n
    return (n - 2) / (n - 1)


def static_hessian_row(s: "Sample") -> Evaluation:
    m = static_map(s)
    t = ChainTerms(s)
    ghat = t.p.ghat
    c = static_factor(s)
    dL, E = t.lifted(t.dL, t.E)
    S = m.second_fundamental
    first = 2.0 * t.u * t.u * ghat.hessian(t.L) - 2.0 * t.kappa * c * _outer(E, E)
    second = ghat.hessian(s.electric_potential) - _sym(dL, E)
    return Evaluation.single(
        Comparison.of("(∇̂²Φ)¹", S[0], first),
        Comparison.of("(∇̂²Φ)²", S[1], second),
    )


def static_pullback(t: ChainTerms, c: float) -> Jet:
    return 4.0 * _outer(t.dL, t.dL) - 4.0 * t.kappa * c * t.u**-2 * _outer(t.E, t.E)


def static_ricci_pullback_row(s: "Sample") -> Evaluation:
    m = static_map(s)
    t = ChainTerms(s)
    inv = t.sp.inverse
    P = static_pullback(t, static_factor(s))
    rhs = jet_einsum("ik,jl,ij,kl->", inv, inv, t.p.ricci_bar[1:, 1:], P)
    return Evaluation.single(
        Comparison.of("⟨R̂ic, Φ*h⟩", m.ricci_term, rhs),
        Comparison.of("Φ*h", m.pullback, t.p.lift(P)),
    )


def static_hessian_norm_row(s: "Sample") -> Evaluation:
    m = static_map(s)
    t = ChainTerms(s)
    u, kappa, c = t.u, t.kappa, static_factor(s)
    block = t.sp.hessian(t.L) - kappa * c * u**-2 * _outer(t.E, t.E)
    rhs = (
        4.0 * t.dL2 * t.dL2
        + 4.0 * t.norm(block)
        - 4.0 * c * kappa * (
            u**-2 * t.inner(t.dL, t.E) ** 2
            + u**-2 * t.norm(t.shifted_derivative(t.E, 1.0))
        )
    )
    return Evaluation.single(Comparison.of("|∇̂²Φ|²", m.hessian_norm_sq, rhs))


def static_curvature_row(s: "Sample") -> Evaluation:
    m = static_map(s)
    t = ChainTerms(s)
    rhs = -8.0 * t.kappa * static_factor(s) * wedge_sq(s, t.dL, t.E / t.u)
    return Evaluation.single(Comparison.of("−R(dΦ⁴)", -m.curvature_term, rhs))


def static_tension_premise(s: "Sample", m: MapDifferential) -> Jet:
    """−(4Λ + 2κ′V)/(n−1) u² ∂_{y₁}."""
    mat = s.matter
    first = -(4.0 * mat.cosmological_constant + 2.0 * mat.kappa_prime * s.V)
    first = first * s.pkg.u**2 / (s.n - 1)
    return jet_stack([first] + [0.0 * first] * (m.target.dim - 1))


def static_tension_gradient_row(s: "Sample") -> Evaluation:
    """⟨∇̂Φ, ∇̂W⟩ with W the static tension on solutions."""
    m = static_map(s)
    t = ChainTerms(s)
    mat, n = s.matter, s.n
    W = static_tension_premise(s, m)
    lhs = m.inner(m.D, m.covariant_derivative_of(W))
    rhs = (
        -8.0 * (n - 2) / (n - 1) ** 2 * t.kappa
        * (mat.cosmological_constant + 0.5 * mat.kappa_prime * s.V)
        * t.u**-2 * t.E2
        - 4.0 * mat.kappa_prime / (n - 1) * t.inner(t.sp.d(s.V), t.dL)
    )
    return Evaluation.single(Comparison.of("⟨∇̂Φ, ∇̂Δ̂Φ⟩", lhs, rhs))


# -- transport rows --------------------------------------------------------------------


def tension_transport(s: "Sample") -> Transport:
    """The four lines of the tension of Φ, each against its field-equation residual."""
    m = stationary_map(s)
    t = ChainTerms(s)
    p, mat, u = t.p, s.matter, t.u
    ghat = p.ghat
    r = s.residuals
    dpsi = t.sp.d(s.psi)
    tension = m.tension
    first = 2.0 * u * u * ghat.laplacian(t.L) + u**-2 * t.om2 - t.kappa * (t.E2 + t.B2)
    second = ghat.laplacian(s.psi) - 4.0 * t.inner(dpsi, t.dL)
    third = ghat.laplacian(s.electric_potential) - 2.0 * t.inner(t.dL, t.E)
    fourth = ghat.laplacian(s.magnetic_potential) - 2.0 * t.inner(t.dL, t.B)
    om_b = u**-2 * t.inner(t.omega, t.B)
    om_e = u**-2 * t.inner(t.omega, t.E)
    trace = 2.0 * mat.cosmological_constant + mat.kappa_prime * s.V
    extra = [
        Comparison.of(f"(Δ̂Φ)^{a + 1}", tension[a], line)
        for a, line in enumerate((first, second, third, fourth))
    ]
    return Transport.concat(
        Transport.of(
            first + trace * u * u, {"einstein_xx": r.einstein_xx}, extra
        ),
        Transport.of(
            second,
            {"twist_divergence": t.sp.laplacian(s.psi) - 3.0 * t.inner(dpsi, t.dL)},
        ),
        Transport.of(
            {"corrected": third + om_b, "printed": third - om_b},
            {"dstarF_spatial": spatial_component(s, r.dstarF)},
        ),
        Transport.of(fourth - om_e, {"dF_spatial": spatial_component(s, r.dF)}),
    )


def bianchi_transport(s: "Sample") -> Transport:
    """Contracted Bianchi identity of g̃ after substituting the reduced equations."""
    m = stationary_map(s)
    mat = s.matter
    if s.phi and (mat.target.kind != "flat" or mat.target.potential != "quadratic"):
        raise DataClassError("The Bianchi substitution needs V = a|φ|² on ℝ^k")
    t = ChainTerms(s)
    p, u = t.p, t.u
    tilde = p.tilde
    spatial_map = MapDifferential(tilde, m.target, m.components)
    dPhi = spatial_map.D
    rho = (
        0.5 * jet_einsum("ab,a,bi->i", spatial_map.h, spatial_map.tension, dPhi)
        - t.sp.d((mat.cosmological_constant + 0.5 * mat.kappa_prime * s.V) * u**-2)
        + 0.5 * u**-2 * mat.kappa_prime * t.sp.d(s.V)
    )
    r = s.residuals
    adjusted = r.einstein_ee - u**-2 * r.einstein_xx * p.g
    nabla = tilde.covariant_derivative(adjusted, "dd")
    div = jet_einsum("lk,lik->i", tilde.inverse, nabla)
    trace = jet_einsum("kl,kl->", tilde.inverse, adjusted)
    basis = {"einstein_bianchi": div - 0.5 * t.sp.d(trace)}
    if s.phi:
        dphi = scalar_differential(s)
        kg = jet_einsum("a,ai->i", r.klein_gordon, dphi)
        basis["kg_scalar"] = mat.kappa_prime * u**-2 * kg
    ric = tilde.ricci
    nabla_ric = tilde.covariant_derivative(ric, "dd")
    bianchi = jet_einsum("lk,lik->i", tilde.inverse, nabla_ric)
    half_dR = 0.5 * t.sp.d(tilde.scalar_curvature)
    extra = [Comparison.of("∇̃^kR̃_ik = ½∂_iR̃", bianchi, half_dR)]
    return Transport.of(rho, basis, extra)


def stationary_tension_premise(s: "Sample") -> Jet:
    """−(2Λ + κ′V)u² ∂_{y₁}."""
    mat = s.matter
    first = -(2.0 * mat.cosmological_constant + mat.kappa_prime * s.V) * s.pkg.u**2
    return jet_stack([first, 0.0 * first, 0.0 * first, 0.0 * first])


def tension_gradient_transport(s: "Sample") -> Transport:
    """∇̂W and ⟨∇̂Φ, ∇̂W⟩ for the on-shell tension W; no residual enters."""
    m = stationary_map(s)
    t = ChainTerms(s)
    mat, u = s.matter, t.u
    trace = 2.0 * mat.cosmological_constant + mat.kappa_prime * s.V
    dV = t.sp.d(s.V)
    W = stationary_tension_premise(s)
    nabla_W = m.covariant_derivative_of(W)
    expected = jet_stack(
        t.lifted(
            -mat.kappa_prime * u * u * dV,
            trace * t.omega,
            0.5 * trace * t.E,
            0.5 * trace * t.B,
        )
    )
    lhs = m.inner(m.D, nabla_W)
    rhs = (
        trace * (u**-4 * t.om2 - t.kappa * u**-2 * (t.E2 + t.B2))
        - 2.0 * mat.kappa_prime * t.inner(dV, t.dL)
    )
    return Transport.of(
        lhs - rhs, {}, [Comparison.of("∇̂_αΔ̂Φ^a", nabla_W, expected)]
    )


def stress_pullback_transport(s: "Sample") -> Transport:
    """⟨R̂ic, Φ*h⟩ with the stress tensor substituted, stationary target."""
    m = stationary_map(s)
    t = ChainTerms(s)
    mat, u, kappa = s.matter, t.u, t.kappa

    def w(a, b):
        return wedge_sq(s, a, b)

    uE, uB, uo = t.E / u, t.B / u, t.omega * u**-2
    inv = t.sp.inverse
    P = stationary_pullback(t)
    scalar = jet_einsum("ik,jl,ij,kl->", inv, inv, scalar_pullback(s), P)
    rhs = (
        (
            mat.cosmological_constant
            + 0.5 * mat.kappa_prime * s.V
            - 0.5 * kappa * u**-2 * (t.E2 + t.B2)
        ) * stationary_energy(t)
        - 4.0 * w(uo, t.dL)
        + 3.0 * kappa * (w(uo, uE) + w(uo, uB))
        + 4.0 * kappa * (w(uE, t.dL) + w(uB, t.dL))
        - 4.0 * kappa**2 * w(uE, uB)
        + mat.kappa_prime * scalar
    )
    r = s.residuals
    tau = jet_einsum("ik,jl,ij,kl->", inv, inv, r.einstein_ee, P)
    return Transport.of(m.ricci_term - rhs, {"einstein_pullback": tau})


def static_stress_pullback_transport(s: "Sample") -> Transport:
    m = static_map(s)
    t = ChainTerms(s)
    mat, u, kappa, n = s.matter, t.u, t.kappa, s.n
    c = static_factor(s)
    inv = t.sp.inverse
    P = static_pullback(t, c)
    uE = t.E / u
    rhs = (
        ((2.0 * mat.cosmological_constant + mat.kappa_prime * s.V) / (n - 1)
         - kappa * c * u**-2 * t.E2) * m.energy
        + 4.0 * kappa * wedge_sq(s, uE, t.dL)
    )
    if s.phi:
        dphi = scalar_differential(s)
        h = mat.target.geometry.metric(s.phi)
        along_L = jet_einsum("ai,ij,j->a", dphi, inv, t.dL)
        along_E = jet_einsum("ai,ij,j->a", dphi, inv, uE)
        rhs = rhs + 4.0 * mat.kappa_prime * jet_einsum("ab,a,b->", h, along_L, along_L)
        rhs = rhs - 4.0 * c * mat.kappa_prime * kappa * jet_einsum(
            "ab,a,b->", h, along_E, along_E
        )
    tau = jet_einsum("ik,jl,ij,kl->", inv, inv, s.residuals.einstein_ee, P)
    return Transport.of(m.ricci_term - rhs, {"einstein_pullback": tau})


# -- conditional rows ------------------------------------------------------------------


def scalar_remainder(s: "Sample", t: ChainTerms, P: Jet) -> Jet:
    """The scalar-field remainder I of the stationary master identity."""
    mat = s.matter
    zero = 0.0 * t.dL2
    if not s.phi:
        return zero
    kp, a = mat.kappa_prime, mat.mass_term
    inv = t.sp.inverse
    dphi = scalar_differential(s)
    hess = mat.target.hessian(s.phi, a)
    grad = potential_gradient(s)
    h = mat.target.geometry.metric(s.phi)
    hess_term = jet_einsum("ab,ai,bj,ij->", hess, dphi, dphi, inv)
    grad_sq = jet_einsum("ab,a,b->", h, grad, grad)
    pull = jet_einsum("ik,jl,ij,kl->", inv, inv, scalar_pullback(s), P)
    return (
        0.5 * kp * (hess_term + 0.5 * grad_sq)
        + kp * pull
        - 2.0 * kp * t.inner(t.sp.d(s.V), t.dL)
    )


def master_identity_row(s: "Sample") -> Evaluation:
    """Δ̂(½e(Φ) + κ′V/2) on solutions with vanishing Poynting form.

    The ⟨dlog u, u⁻²ω⟩² term is read once (``single``) or twice (``double``).
    """
    m = stationary_map(s)
    t = ChainTerms(s)
    mat, u, kappa = s.matter, t.u, t.kappa
    lhs = t.p.ghat.laplacian(0.5 * m.energy + 0.5 * mat.kappa_prime * s.V)
    inner_block = (
        2.0 * t.sp.hessian(t.L)
        + u**-4 * _outer(t.omega, t.omega)
        - kappa * u**-2 * (_outer(t.E, t.E) + _outer(t.B, t.B))
    )
    trace = 2.0 * mat.cosmological_constant + mat.kappa_prime * s.V
    common = (
        4.0 * t.dL2 * t.dL2
        + t.norm(inner_block)
        + u**-4 * t.norm(t.shifted_derivative(t.omega, 2.0))
        - 2.0 * kappa * u**-2 * t.norm(t.shifted_derivative(t.E, 1.0))
        - 2.0 * kappa * u**-2 * t.norm(t.shifted_derivative(t.B, 1.0))
        - 2.0 * kappa * (t.inner(t.dL, t.E / u) ** 2 + t.inner(t.dL, t.B / u) ** 2)
        + 6.0 * wedge_sq(s, t.omega * u**-2, t.dL)
        + (0.5 * trace - 0.5 * kappa * u**-2 * (t.E2 + t.B2)) * m.energy
        + trace * (t.om2 * u**-4 - kappa * u**-2 * (t.E2 + t.B2))
        + scalar_remainder(s, t, stationary_pullback(t))
    )
    twist_lapse = t.inner(t.dL, t.omega * u**-2) ** 2
    return Evaluation.with_readings(
        {
            "single": [Comparison.of("Δ̂(½e + κ′V/2)", lhs, common + twist_lapse)],
            "double": [
                Comparison.of("Δ̂(½e + κ′V/2)", lhs, common + 2.0 * twist_lapse)
            ],
        }
    )


def lemma_lower_bound(s: "Sample", t: ChainTerms, energy: Jet) -> list[Jet]:
    """The three-term lower bound of the stationary master inequality."""
    mat, u, kappa = s.matter, t.u, t.kappa
    block = (
        2.0 * t.sp.hessian(t.L)
        + u**-4 * _outer(t.omega, t.omega)
        - kappa * u**-2 * (_outer(t.E, t.E) + _outer(t.B, t.B))
    )
    coefficient = (
        mat.cosmological_constant
        + 0.5 * mat.kappa_prime * s.V
        - 0.5 * kappa * u**-2 * (t.E2 + t.B2)
    )
    return [4.0 * t.dL2 * t.dL2, t.norm(block), coefficient * energy]


def master_inequality_row(s: "Sample") -> Evaluation:
    m = stationary_map(s)
    t = ChainTerms(s)
    f = 0.5 * m.energy + 0.5 * s.matter.kappa_prime * s.V
    lhs = t.p.ghat.laplacian(f)
    split = t.sp.laplacian(f) + t.inner(t.dL, t.sp.d(f))
    bound = sum(lemma_lower_bound(s, t, m.energy), 0.0 * lhs)
    return Evaluation.single(
        Comparison.of("Δ̂ = Δ + ⟨∇log u, ∇·⟩", lhs, split),
        Comparison.of("Δ̂(½e + κ′V/2) ≥ bound", lhs, bound, "ge"),
    )


def static_master_row(s: "Sample") -> Evaluation:
    m = static_map(s)
    t = ChainTerms(s)
    mat, u, kappa, n = s.matter, t.u, t.kappa, s.n
    c = static_factor(s)
    q = t.dL2 - kappa * c * u**-2 * t.E2
    lhs = t.p.ghat.laplacian(q)
    block = t.sp.hessian(t.L) - kappa * c * u**-2 * _outer(t.E, t.E)
    trace = 4.0 * mat.cosmological_constant + 2.0 * mat.kappa_prime * s.V
    rhs = (
        2.0 * t.dL2 * t.dL2
        + 2.0 * t.norm(block)
        - 2.0 * c * kappa * (
            t.inner(t.dL, t.E / u) ** 2
            + u**-2 * t.norm(t.shifted_derivative(t.E, 1.0))
        )
        - 2.0 * kappa * (n - 3) / (n - 1) * wedge_sq(s, t.dL, t.E / u)
        - kappa * trace * (n - 2) / (n - 1) ** 2 * u**-2 * t.E2
        + (trace / (n - 1) - 2.0 * kappa * c * u**-2 * t.E2) * q
    )
    if s.phi:
        kp = mat.kappa_prime
        inv = t.sp.inverse
        dphi = scalar_differential(s)
        h = mat.target.geometry.metric(s.phi)
        along_L = jet_einsum("ai,ij,j->a", dphi, inv, t.dL)
        along_E = jet_einsum("ai,ij,j->a", dphi, inv, t.E / u)
        rhs = rhs - 2.0 * c * kp * kappa * jet_einsum("ab,a,b->", h, along_E, along_E)
        rhs = rhs + 2.0 * kp * jet_einsum("ab,a,b->", h, along_L, along_L)
        rhs = rhs - 2.0 * kp / (n - 1) * t.inner(t.sp.d(s.V), t.dL)
    return Evaluation.single(
        Comparison.of("e(Φ)/4", 0.25 * m.energy, q),
        Comparison.of("Δ̂(|∇log u|² − κcu⁻²|E|²)", lhs, rhs),
    )


def static_tension_row(s: "Sample") -> Evaluation:
    """On static solutions the stationary tension reduces to its y₁ part."""
    t = ChainTerms(s)
    comps = [
        Comparison.of("⟨ω, E⟩", t.inner(t.omega, t.E), 0.0),
        Comparison.of("⟨ω, B⟩", t.inner(t.omega, t.B), 0.0),
    ]
    if not t.p.static:
        raise DataClassError("The static tension reduction needs θ ≡ 0")
    m = stationary_map(s)
    comps.append(Comparison.of("Δ̂Φ", m.tension, stationary_tension_premise(s)))
    return Evaluation.single(*comps)


MAP_ROWS: dict[str, Callable[["Sample"], Evaluation]] = {
    "ID-2.23": target_christoffel_row,
    "ID-2.24": target_riemann_row,
    "ID-2.25": stationary_christoffel_row,
    "ID-2.39": stationary_riemann_row,
    "ID-2.31": bochner_row,
    "ID-2.26/2.28": christoffel_hessian_row,
    "ID-2.32": energy_row,
    "ID-2.35": frame_norm_row,
    "ID-2.36": hessian_norm_lapse_row,
    "ID-2.37": hessian_norm_field_row,
    "ID-2.38": curvature_pairs_row,
    "ID-2.40": curvature_wedges_row,
    "ID-2.41": ricci_pullback_row,
    "ID-2.46": energy_laplacian_split_row,
    "ID-3.8": static_hessian_row,
    "ID-3.9": static_ricci_pullback_row,
    "ID-3.10": static_hessian_norm_row,
    "ID-3.11": static_curvature_row,
    "ID-3.12": static_tension_gradient_row,
    "ID-2.43": master_identity_row,
    "ID-2.45": master_inequality_row,
    "ID-3.13": static_master_row,
    "ID-L2.3": static_tension_row,
}

MAP_TRANSPORT_ROWS: dict[str, Callable[["Sample"], Transport]] = {
    "ID-2.29": tension_transport,
    "ID-2.30": bianchi_transport,
    "ID-2.33/2.34": tension_gradient_transport,
    "ID-2.41-stress": stress_pullback_transport,
    "ID-3.9-stress": static_stress_pullback_transport,
}
