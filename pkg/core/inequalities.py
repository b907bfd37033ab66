"""
Sign Rows
=========

Pointwise inequalities of the Bochner chain.

Every row returns an :class:`~core.evaluation.Evaluation` made of ``"ge"``
comparisons (lhs ≥ rhs); the runner accepts a row when the normalized
violation stays below the inequality tolerance. Rows that only hold on
solutions are evaluated on catalog samples. The algebraic steps are evaluated
on random data, with the Ricci tensor replaced by the stress tensor where
the step substitutes the Einstein equation.

The sign hypotheses are Λ ≥ 0, κ ≤ 0, κ′ ≥ 0 and a convex potential; a sample
outside them raises :class:`~core.errors.HypothesisError`.
"""

import logging
from typing import TYPE_CHECKING, Callable

import numpy as np
import scipy.linalg

from core.errors import DataClassError, HypothesisError
from core.evaluation import Comparison, Evaluation
from core.fieldeq import (
    potential_gradient,
    scalar_differential,
    scalar_energy,
    scalar_pullback,
    stress_frame,
    tension,
)
from core.harmonic_map import (
    ChainTerms,
    MapDifferential,
    lemma_lower_bound,
    scalar_remainder,
    stationary_energy,
    stationary_pullback,
    static_factor,
    wedge_sq,
)
from core.jets import Jet, jet_einsum, values
from core.target import WarpedTarget
from core.tensor import wedge

if TYPE_CHECKING:
    from core.sample import Sample

logger = logging.getLogger(__name__)

PLANES_PER_SAMPLE = 16
COEFFICIENT_DIMENSIONS = range(3, 65)


def require_signs(s: "Sample") -> None:
    """
    Raises:
        HypothesisError: Unless Λ ≥ 0, κ ≤ 0, κ′ ≥ 0 and V is convex
    """
    mat = s.matter
    if mat.cosmological_constant < 0 or mat.kappa > 0 or mat.kappa_prime < 0:
        raise HypothesisError(
            f"Sign hypotheses fail: Λ={mat.cosmological_constant}, "
            f"κ={mat.kappa}, κ′={mat.kappa_prime}"
        )
    if not mat.target.is_convex():
        raise HypothesisError("The scalar potential is not convex")


def _require_quadratic(s: "Sample") -> None:
    if not s.phi:
        raise DataClassError("This inequality needs a scalar field")
    target = s.matter.target
    if target.kind != "flat" or target.potential != "quadratic":
        raise DataClassError("This inequality is stated for V = a|φ|² on ℝ^k")


def _nonnegative(label: str, value) -> Comparison:
    return Comparison.of(label, value, 0.0, "ge")


def _along(s: "Sample", vector: Jet) -> Jet:
    """dφ(X#)^a for a spatial 1-form X."""
    dphi = scalar_differential(s)
    return jet_einsum("ai,ij,j->a", dphi, s.pkg.spatial.inverse, vector)


def _target_sq(s: "Sample", vec: Jet) -> Jet:
    h = s.matter.target.geometry.metric(s.phi)
    return jet_einsum("ab,a,b->", h, vec, vec)


# -- stationary chain ----------------------------------------------------------------


def scalar_remainder_row(s: "Sample") -> Evaluation:
    """I ≥ κ′|½∇V − 2dφ(∇log u)|² ≥ 0."""
    _require_quadratic(s)
    require_signs(s)
    t = ChainTerms(s)
    remainder = scalar_remainder(s, t, stationary_pullback(t))
    vec = 0.5 * potential_gradient(s) - 2.0 * _along(s, t.dL)
    bound = s.matter.kappa_prime * _target_sq(s, vec)
    return Evaluation.single(
        Comparison.of("I ≥ κ′|½∇V − 2dφ(∇log u)|²", remainder, bound, "ge"),
        _nonnegative("κ′|½∇V − 2dφ(∇log u)|² ≥ 0", bound),
    )


def lower_bound_terms_row(s: "Sample") -> Evaluation:
    """Each term of the three-term lower bound is nonnegative."""
    require_signs(s)
    if s.n != 3:
        raise DataClassError("The stationary lower bound is written for n = 3")
    t = ChainTerms(s)
    names = ("4|∇log u|⁴", "|2∇²log u + …|²", "[Λ + κ′V/2 − κ/2u⁻²(|E|²+|B|²)]e")
    terms = lemma_lower_bound(s, t, stationary_energy(t))
    return Evaluation.single(
        *(_nonnegative(f"{name} ≥ 0", term) for name, term in zip(names, terms))
    )


def potential_gradient_row(s: "Sample") -> Evaluation:
    """κ′|∇(V∘φ)| ≤ 2κ′a|dφ||φ| ≤ κ′aV + κ′|dφ|²."""
    _require_quadratic(s)
    require_signs(s)
    mat = s.matter
    kp, a = mat.kappa_prime, mat.mass_term
    sp = s.pkg.spatial
    grad_v = float(np.sqrt(max(float(values(sp.norm_sq(sp.d(s.V)))), 0.0)))
    dphi = float(np.sqrt(max(float(values(scalar_energy(s))), 0.0)))
    phi = float(np.sqrt(sum(float(values(p)) ** 2 for p in s.phi)))
    middle = 2.0 * kp * a * dphi * phi
    upper = kp * a * float(values(s.V)) + kp * dphi**2
    return Evaluation.single(
        Comparison.of("2κ′a|dφ||φ| ≥ κ′|∇(V∘φ)|", middle, kp * grad_v, "ge"),
        Comparison.of("κ′aV + κ′|dφ|² ≥ 2κ′a|dφ||φ|", upper, middle, "ge"),
    )


def hat_ricci_bounds_row(s: "Sample") -> Evaluation:
    """Lower bounds of R̂ic in the frame, on solutions."""
    require_signs(s)
    if s.n != 3:
        raise DataClassError("The hat Ricci bounds are written for n = 3")
    t = ChainTerms(s)
    p, u, kappa = t.p, t.u, t.kappa
    fields = t.E2 + t.B2
    ric = p.ricci_hat
    cross = p.spatial.hodge(wedge(t.E, t.B))
    shift = 0.5 * kappa * u**-2 * fields - u**-4 * t.om2
    matrix = np.asarray(values(ric[1:, 1:] - shift * p.g), dtype=float)
    matrix = 0.5 * (matrix + matrix.T)
    lowest = scipy.linalg.eigh(
        matrix, np.asarray(values(p.g), dtype=float), eigvals_only=True
    )[0]
    return Evaluation.single(
        Comparison.of(
            "u⁻²R̂ic(X,X) ≥ κ/2u⁻²(|E|²+|B|²)",
            u**-2 * ric[0, 0],
            0.5 * kappa * u**-2 * fields,
            "ge",
        ),
        Comparison.of(
            "u⁻¹R̂ic(X,e_j) = κu⁻²∗(E∧B)_j", ric[0, 1:] / u, kappa * u**-2 * cross
        ),
        _nonnegative("R̂ic(e,e) − [κ/2u⁻²(|E|²+|B|²) − u⁻⁴|ω|²]g ≥ 0", lowest),
    )


def scalar_energy_bound_row(s: "Sample") -> Evaluation:
    """Lower bound of Δ̂κ′|dφ|², with R̄ic(e,e) replaced by the stress tensor."""
    _require_quadratic(s)
    require_signs(s)
    if s.n != 3:
        raise DataClassError("The scalar energy bound is written for n = 3")
    t = ChainTerms(s)
    mat, p, u = s.matter, t.p, t.u
    kp, a = mat.kappa_prime, mat.mass_term
    ghat = p.ghat
    ric = stress_frame(s)[1:, 1:] - u**-4 * (
        t.om2 * p.g - jet_einsum("i,j->ij", t.omega, t.omega)
    )
    inv = t.sp.inverse
    energy = scalar_energy(s)
    ric_term = jet_einsum("ik,jl,ij,kl->", inv, inv, ric, scalar_pullback(s))
    hess_sq = sum((ghat.norm_sq(ghat.hessian(f)) for f in s.phi), 0.0 * energy)
    lhs = 2.0 * kp * ric_term + 2.0 * kp * hess_sq + 2.0 * kp * a * energy
    twist = sum(
        (wedge_sq(s, t.sp.d(f), t.omega * u**-2) for f in s.phi), 0.0 * energy
    )
    rhs = (
        -2.0 * kp * twist
        + t.kappa * kp * u**-2 * (t.B2 + t.E2) * energy
        + (2.0 / 3.0) * kp**2 * energy * energy
    )
    return Evaluation.single(Comparison.of("Δ̂κ′|dφ|² ≥ bound", lhs, rhs, "ge"))


# -- static chain ----------------------------------------------------------------------


def _require_static_scalar(s: "Sample") -> None:
    if not s.pkg.static or s.em.B is not None:
        raise DataClassError("The static scalar bounds need θ ≡ 0 and B = 0")
    if not s.phi:
        raise DataClassError("The static scalar bounds need a scalar field")


def _static_ricci_pullback(s: "Sample") -> Jet:
    """⟨R̂ic, φ*g_W⟩ with R̂ic(e,e) = T(e,e)."""
    inv = s.pkg.spatial.inverse
    return jet_einsum(
        "ik,jl,ij,kl->", inv, inv, stress_frame(s)[1:, 1:], scalar_pullback(s)
    )


def scalar_bochner_row(s: "Sample") -> Evaluation:
    """Bochner formula of φ and the signs of its curvature and convexity terms."""
    _require_static_scalar(s)
    require_signs(s)
    p, mat = s.pkg, s.matter
    kp = mat.kappa_prime
    m = MapDifferential(p.ghat, mat.target.geometry, s.phi)
    dphi = scalar_differential(s)
    hess_v = mat.target.hessian(s.phi, mat.mass_term)
    convexity = jet_einsum("ab,ai,bj,ij->", hess_v, dphi, dphi, p.spatial.inverse)
    return Evaluation.single(
        Comparison.of("Δ̂|dφ|² (Bochner)", p.ghat.laplacian(m.energy), m.bochner_rhs()),
        _nonnegative("−2κ′R(dφ⁴) ≥ 0", -2.0 * kp * m.curvature_term),
        _nonnegative("κ′⟨φ*Hess V, ĝ⟩ ≥ 0", kp * convexity),
    )


def scalar_hessian_trace_row(s: "Sample") -> Evaluation:
    _require_static_scalar(s)
    p, mat, n = s.pkg, s.matter, s.n
    kappa, kp = mat.kappa, mat.kappa_prime
    m = MapDifferential(p.ghat, mat.target.geometry, s.phi)
    tension_sq = jet_einsum("ab,a,b->", m.h, m.tension, m.tension)
    inv = p.spatial.inverse
    pull = scalar_pullback(s)
    energy = scalar_energy(s)
    u, E = p.u, s.em.E
    along_E = _along(s, E)
    trace = 2.0 * mat.cosmological_constant + kp * s.V
    closed = (
        kp * jet_einsum("ik,jl,ij,kl->", inv, inv, pull, pull)
        + trace / (n - 1) * energy
        + kappa * (
            -(u**-2) * _target_sq(s, along_E)
            + u**-2 * p.spatial.norm_sq(E) * energy / (n - 1)
        )
    )
    return Evaluation.single(
        Comparison.of(
            "|∇̂dφ|² ≥ |Δ̂φ|²/(n+1)", m.hessian_norm_sq, tension_sq / (n + 1), "ge"
        ),
        Comparison.of("Δ_ĝφ = Δ_ḡφ", m.tension, tension(s)),
        Comparison.of("⟨R̂ic, φ*g_W⟩", _static_ricci_pullback(s), closed),
    )


def scalar_energy_steps_row(s: "Sample") -> Evaluation:
    """The two algebraic steps from the stress form to the quartic lower bound."""
    _require_static_scalar(s)
    require_signs(s)
    p, mat, n = s.pkg, s.matter, s.n
    kappa, kp = mat.kappa, mat.kappa_prime
    energy = scalar_energy(s)
    grad = potential_gradient(s)
    grad_sq = _target_sq(s, grad)
    field = kappa * p.u**-2 * p.spatial.norm_sq(s.em.E)
    start = 2.0 * kp * _static_ricci_pullback(s) + kp / (2.0 * (n + 1)) * grad_sq
    first = (
        (2.0 / n) * kp**2 * energy * energy
        + (4.0 * mat.cosmological_constant + 2.0 * kp * s.V) / (n - 1) * kp * energy
        + kp / (2.0 * (n + 1)) * grad_sq
        + 2.0 / (n - 1) * kp * field * energy
    )
    second = (
        kp**2 * energy * energy / (8.0 * n)
        - 8.0 * n / (15.0 * (n - 1) ** 2) * field * field
        + kp / (2.0 * (n + 1)) * grad_sq
    )
    return Evaluation.single(
        Comparison.of("stress form ≥ first bound", start, first, "ge"),
        Comparison.of("first bound ≥ quartic bound", first, second, "ge"),
    )


def harnack_quantity(s: "Sample") -> Jet:
    """h = |∇log u|² − κ(n−2)/(n−1)u⁻²|E|² + κ′(n+1)/(n−1)²|dφ|²."""
    p, mat, n = s.pkg, s.matter, s.n
    c = static_factor(s)
    e2 = p.spatial.norm_sq(s.em.E)
    h = p.spatial.norm_sq(p.dlog_u) - mat.kappa * c * p.u**-2 * e2
    if s.phi:
        h = h + mat.kappa_prime * (n + 1) / (n - 1) ** 2 * scalar_energy(s)
    return h


def static_harnack_row(s: "Sample") -> Evaluation:
    """Δ̂h ≥ middle line ≥ h²/72 on static solutions."""
    if not s.pkg.static or s.em.B is not None:
        raise DataClassError("The static Harnack bound needs θ ≡ 0 and B = 0")
    require_signs(s)
    p, mat, n = s.pkg, s.matter, s.n
    c = static_factor(s)
    h = harnack_quantity(s)
    dl2 = p.spatial.norm_sq(p.dlog_u)
    field = p.u**-2 * p.spatial.norm_sq(s.em.E)
    middle = 2.0 * dl2 * dl2 + 0.4 * c**2 * mat.kappa**2 * field * field
    if s.phi:
        energy = scalar_energy(s)
        scale = mat.kappa_prime**2 * (n + 1) / (8.0 * n * (n - 1) ** 2)
        middle = middle + scale * energy * energy
    return Evaluation.single(
        Comparison.of("Δ̂h ≥ middle", p.ghat.laplacian(h), middle, "ge"),
        Comparison.of("middle ≥ h²/72", middle, h * h / 72.0, "ge"),
    )


# -- targets and arithmetic ------------------------------------------------------------


def sectional_curvature_row(s: "Sample") -> Evaluation:
    """Sectional curvatures of warped targets on random 2-planes are ≤ 0."""
    rng = s.rng
    targets = [s.warped]
    if s.matter.kappa < 0:
        targets.append(WarpedTarget.for_stationary(s.matter.kappa))
        n = 3 + int(rng.integers(3))
        targets.append(WarpedTarget.for_static(s.matter.kappa, n))
    comps = []
    for target in targets:
        y0 = [float(s.point[0])] + [0.0] * (target.dim - 1)
        curvatures = []
        for _ in range(PLANES_PER_SAMPLE):
            x, v = rng.standard_normal((2, target.dim))
            curvatures.append(target.sectional_curvature(y0, x, v))
        label = f"K ≤ 0 on {target.dim}-d target"
        comps.append(Comparison.of(label, 0.0, np.array(curvatures), "ge"))
    return Evaluation.single(*comps)


def coefficient_row(s: "Sample") -> Evaluation:
    """The two arithmetic facts behind the static Harnack constants."""
    n = np.array(COEFFICIENT_DIMENSIONS, dtype=float)
    c = (n - 2) / (n - 1)
    return Evaluation.single(
        Comparison.of(
            "2c² − (8n/15)(n+1)/(n−1)⁴ ≥ (2/5)c²",
            2.0 * c**2 - (8.0 * n / 15.0) * (n + 1) / (n - 1) ** 4,
            0.4 * c**2,
            "ge",
        ),
        Comparison.of(
            "1/(8n) ≥ (n+1)/(24(n−1)²)",
            1.0 / (8.0 * n),
            (n + 1) / (24.0 * (n - 1) ** 2),
            "ge",
        ),
    )


INEQUALITY_ROWS: dict[str, Callable[["Sample"], Evaluation]] = {
    "INEQ-2.44": scalar_remainder_row,
    "INEQ-2.45": lower_bound_terms_row,
    "INEQ-2.47": potential_gradient_row,
    "INEQ-2.51": hat_ricci_bounds_row,
    "INEQ-2.53": scalar_energy_bound_row,
    "INEQ-3.14": scalar_bochner_row,
    "INEQ-3.15": scalar_hessian_trace_row,
    "INEQ-3.16": scalar_energy_steps_row,
    "INEQ-3.17": static_harnack_row,
    "INEQ-Lemma2.1": sectional_curvature_row,
    "INEQ-coeff-3.17": coefficient_row,
}
