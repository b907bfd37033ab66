"""
Tensor Properties Handler
=========================

Self-checks of the jet and tensor layers, run by ``identity-verify
selftest`` before any identity row is trusted:

- PROP-jet-algebra: exp(log u) = u, (√u)² = u, (uv)/v = u
- PROP-compat: ∇g = 0 for g, ḡ and ĝ
- PROP-killing: ∂_t ḡ = ∂_t ĝ = 0
- PROP-bianchi-first: R^r_[smn] = 0
- PROP-bianchi-contracted: ∇^j R_ij = ½∂_i R
- PROP-riemann-symmetry: pair and slot symmetries of the lowered Riemann
- PROP-sphere: round sphere in stereographic chart, R = 2, K = 1
- PROP-hodge: ∗∗ = (−1)^{k(n−k)}, a∧∗b = ⟨a, b⟩ vol
- PROP-dd: d∘d = 0
"""

from typing import TYPE_CHECKING

import numpy as np

from core.check_loader import RowTableHandler
from core.evaluation import Comparison, Evaluation
from core.jets import jet_exp, jet_log, jet_sqrt, jet_stack, jet_variables, values
from core.tensor import (
    MetricValue,
    contracted_bianchi_defect,
    exterior_derivative,
    first_bianchi_defect,
    metric_compatibility_defect,
    wedge,
)

if TYPE_CHECKING:
    from core.sample import Sample


def jet_algebra_row(s: "Sample") -> Evaluation:
    """exp∘log, √·², and division round trips on the lapse."""
    u = s.pkg.u
    v = 1.0 + 0.5 * u * u
    return Evaluation.single(
        Comparison.of("exp(log u) = u", jet_exp(jet_log(u)), u),
        Comparison.of("(√u)² = u", jet_sqrt(u) * jet_sqrt(u), u),
        Comparison.of("(uv)/v = u", (u * v) / v, u),
    )


def compatibility_row(s: "Sample") -> Evaluation:
    """Levi-Civita connections are metric."""
    p = s.pkg
    return Evaluation.single(
        *(
            Comparison.of(f"∇{name} = 0", metric_compatibility_defect(m), 0.0)
            for name, m in (("g", p.spatial), ("ḡ", p.gbar), ("ĝ", p.ghat))
        )
    )


def killing_row(s: "Sample") -> Evaluation:
    return Evaluation.single(Comparison.of("∂_t ḡ = 0", s.pkg.killing_defect(), 0.0))


def first_bianchi_row(s: "Sample") -> Evaluation:
    p = s.pkg
    return Evaluation.single(
        Comparison.of("R̄^r_[smn] = 0", first_bianchi_defect(p.gbar), 0.0),
        Comparison.of("R̂^r_[smn] = 0", first_bianchi_defect(p.ghat), 0.0),
    )


def contracted_bianchi_row(s: "Sample") -> Evaluation:
    """Needs jet order ≥ 3."""
    p = s.pkg
    return Evaluation.single(
        Comparison.of("∇^jR_ij = ½∂_iR (g)", contracted_bianchi_defect(p.spatial), 0.0),
        Comparison.of("∇^jR_ij = ½∂_iR (ḡ)", contracted_bianchi_defect(p.gbar), 0.0),
    )


def riemann_symmetry_row(s: "Sample") -> Evaluation:
    rm = np.asarray(values(s.pkg.gbar.riemann_lowered))
    return Evaluation.single(
        Comparison.of("R_abcd = −R_bacd", rm, -np.einsum("abcd->bacd", rm)),
        Comparison.of("R_abcd = −R_abdc", rm, -np.einsum("abcd->abdc", rm)),
        Comparison.of("R_abcd = R_cdab", rm, np.einsum("abcd->cdab", rm)),
    )


def sphere_row(s: "Sample") -> Evaluation:
    """Unit sphere g = 4(1 + |x|²)⁻²δ: scalar curvature +2, sectional +1."""
    x, y = jet_variables(s.point[:2], s.order)
    conformal = 4.0 * (1.0 + x * x + y * y) ** -2
    zero = 0.0 * conformal
    g = jet_stack([jet_stack([conformal, zero]), jet_stack([zero, conformal])])
    sphere = MetricValue(g, signature=(2, 0))
    e1, e2 = np.eye(2)
    return Evaluation.single(
        Comparison.of("R = 2", sphere.scalar_curvature, 2.0),
        Comparison.of("K = 1", sphere.sectional_curvature(e1, e2), 1.0),
    )


def hodge_row(s: "Sample") -> Evaluation:
    p = s.pkg
    g, n = p.spatial, p.n
    a = g.d(p.u)
    b = g.d(p.g[0, 0])
    two = wedge(a, b)
    top = tuple(range(n))
    return Evaluation.single(
        Comparison.of("∗∗a = ±a", g.hodge(g.hodge(a)), (-1.0) ** (n - 1) * a),
        Comparison.of(
            "∗∗(a∧b) = ±a∧b", g.hodge(g.hodge(two)), (-1.0) ** (2 * (n - 2)) * two
        ),
        Comparison.of(
            "a∧∗b = ⟨a,b⟩ vol",
            wedge(a, g.hodge(b))[top],
            g.form_inner(a, b) * g.volume_element,
        ),
    )


def dd_row(s: "Sample") -> Evaluation:
    """d∘d on a function and on θ."""
    p = s.pkg
    f = s.electric_potential if s.electric_potential is not None else p.u
    ddf = exterior_derivative(exterior_derivative(f, p.axes), p.axes)
    ddt = exterior_derivative(exterior_derivative(p.theta, p.axes), p.axes)
    return Evaluation.single(
        Comparison.of("ddf = 0", ddf, 0.0),
        Comparison.of("ddθ = 0", ddt, 0.0),
    )


PROPERTY_ROWS = {
    "PROP-jet-algebra": jet_algebra_row,
    "PROP-compat": compatibility_row,
    "PROP-killing": killing_row,
    "PROP-bianchi-first": first_bianchi_row,
    "PROP-bianchi-contracted": contracted_bianchi_row,
    "PROP-riemann-symmetry": riemann_symmetry_row,
    "PROP-sphere": sphere_row,
    "PROP-hodge": hodge_row,
    "PROP-dd": dd_row,
}


class TensorPropertiesHandler(RowTableHandler):
    """Handler for jet and tensor self-checks."""

    rows = PROPERTY_ROWS
