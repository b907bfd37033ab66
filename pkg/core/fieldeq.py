"""
Field Equations
===============

Stress-tensor algebra and field-equation residuals of the stationary
Einstein–Maxwell–Klein–Gordon system, plus the residual-transport rows.

The stress side of the Einstein equation in n+1 dimensions is

    T = κ F·F + κ′ φ*g_W + (2Λ + κ′V − ½κ|F|²) ḡ / (n − 1)

with (F·F)_αβ = F_αγ F_βδ ḡ^γδ. The residuals are

    - 𝔈 = R̄ic − T
    - 𝔐 = (dF, d∗F)
    - 𝔎 = τ_ḡ(φ) − ½(∇V)∘φ   (tension field of φ minus half the potential gradient)

A *derived* identity holds only on solutions. Its transport row computes the
residual ρ = LHS − RHS on arbitrary data together with a small basis of
residual contractions; the row closes when ρ = Σ c_k b_k with the frozen
coefficients of ``config/transport.yaml``. :func:`fit_transport` recovers the
coefficients by least squares.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Mapping, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import yaml

from core.errors import ConfigError, DataClassError
from core.evaluation import DEFAULT_READING, Comparison, Evaluation
from core.jets import Jet, jet_einsum, jet_stack, values
from core.target import ScalarTarget
from core.tensor import exterior_derivative, wedge

if TYPE_CHECKING:
    from core.sample import Sample

logger = logging.getLogger(__name__)

FIT_DECIMALS = 9


@dataclass(frozen=True)
class MatterData:
    """
    Coupling constants and scalar target of the matter model.

    Attributes:
        cosmological_constant: Λ
        kappa: Maxwell coupling κ (κ < 0 is the phantom sign)
        kappa_prime: Scalar coupling κ′
        mass: Scalar mass m
        hbar: Reduced Planck constant ħ
        target: Scalar target and potential family
    """

    cosmological_constant: float = 0.0
    kappa: float = 0.0
    kappa_prime: float = 0.0
    mass: float = 0.0
    hbar: float = 1.0
    target: ScalarTarget = field(default_factory=ScalarTarget)

    def __post_init__(self):
        if self.hbar <= 0:
            raise ConfigError(f"ħ must be positive, got {self.hbar}")
        if self.mass < 0:
            raise ConfigError(f"Mass must be nonnegative, got {self.mass}")

    @property
    def mass_term(self) -> float:
        """m²/ħ²."""
        return (self.mass / self.hbar) ** 2

    @classmethod
    def from_dict(cls, data: Mapping) -> "MatterData":
        target = data.get("target", {})
        return cls(
            cosmological_constant=float(data.get("cosmological_constant", 0.0)),
            kappa=float(data.get("kappa", 0.0)),
            kappa_prime=float(data.get("kappa_prime", 0.0)),
            mass=float(data.get("mass", 0.0)),
            hbar=float(data.get("hbar", 1.0)),
            target=ScalarTarget(**target),
        )

    def rescaled(self, factor: float) -> "MatterData":
        """Constants after ḡ → λḡ: Λ → Λ/λ and m → m/√λ."""
        return MatterData(
            cosmological_constant=self.cosmological_constant / factor,
            kappa=self.kappa,
            kappa_prime=self.kappa_prime,
            mass=self.mass / np.sqrt(factor),
            hbar=self.hbar,
            target=self.target,
        )


# -- scalar field --------------------------------------------------------------------


def scalar_differential(s: "Sample") -> Optional[Jet]:
    """dφ as a (k, n) jet, row a holding dφ^a; None without a scalar field."""
    if not s.phi:
        return None
    return jet_stack([s.pkg.spatial.d(p) for p in s.phi])


def scalar_pullback(s: "Sample") -> Jet:
    """φ*g_W on the spatial chart."""
    p = s.pkg
    dphi = scalar_differential(s)
    if dphi is None:
        return Jet.zeros((p.n, p.n), p.env.dim, p.env.order - 1)
    h = s.matter.target.geometry.metric(s.phi)
    return jet_einsum("ai,bj,ab->ij", dphi, dphi, h)


def scalar_energy(s: "Sample") -> Jet:
    """|dφ|² = tr_g φ*g_W."""
    return jet_einsum("ij,ij->", s.pkg.spatial.inverse, scalar_pullback(s))


def tension(s: "Sample") -> Jet:
    """τ_ḡ(φ)^a = Δ_ḡ φ^a + Γ^a_bc(φ)⟨dφ^b, dφ^c⟩."""
    p = s.pkg
    lap = jet_stack([p.gbar.laplacian(f) for f in s.phi])
    dphi = scalar_differential(s)
    gamma = s.matter.target.geometry.christoffel(s.phi)
    return lap + jet_einsum("abc,bi,cj,ij->a", gamma, dphi, dphi, p.spatial.inverse)


def potential_gradient(s: "Sample") -> Jet:
    return s.matter.target.gradient(s.phi, s.matter.mass_term)


# -- stress tensor -------------------------------------------------------------------


def field_square(s: "Sample") -> Jet:
    """(F·F)_αβ = F_αγ F_βδ ḡ^γδ."""
    F = s.em.F
    return jet_einsum("ag,bd,gd->ab", F, F, s.pkg.gbar.inverse)


def stress_tensor(s: "Sample") -> Jet:
    """T_αβ in spacetime coordinates."""
    p, mat = s.pkg, s.matter
    trace_part = (
        2.0 * mat.cosmological_constant
        + mat.kappa_prime * s.V
        - 0.5 * mat.kappa * s.em.norm_sq()
    ) / (p.n - 1)
    return (
        mat.kappa * field_square(s)
        + mat.kappa_prime * p.lift(scalar_pullback(s))
        + trace_part * p.gbar.g
    )


def stress_frame(s: "Sample") -> Jet:
    """T in the frame (e₀, e₁, …, eₙ)."""
    return s.pkg.gbar.frame_components(stress_tensor(s), s.pkg.frame)


@dataclass
class ResidualBundle:
    """
    Field-equation residuals at one sample.

    Attributes:
        einstein: 𝔈 in the frame (e₀, e₁, …, eₙ)
        dF: dF as a spacetime 3-form
        dstarF: d∗F as a spacetime form
        klein_gordon: 𝔎^a, or None without a scalar field
    """

    einstein: Jet
    dF: Jet
    dstarF: Jet
    klein_gordon: Optional[Jet] = None

    @property
    def einstein_xx(self) -> Jet:
        return self.einstein[0, 0]

    @property
    def einstein_ee(self) -> Jet:
        return self.einstein[1:, 1:]

    def largest(self) -> dict[str, float]:
        """max |·| of every residual, for catalog oracles."""
        parts = {"einstein": self.einstein, "dF": self.dF, "dstarF": self.dstarF}
        if self.klein_gordon is not None:
            parts["klein_gordon"] = self.klein_gordon
        return {
            name: float(np.max(np.abs(values(jet)), initial=0.0))
            for name, jet in parts.items()
        }


def residual_bundle(s: "Sample") -> ResidualBundle:
    """
    Einstein, Maxwell and Klein–Gordon residuals.

    Raises:
        JetOrderError: If the sample order is below 3
    """
    p = s.pkg
    einstein = p.ricci_bar - stress_frame(s)
    kg = None
    if s.phi:
        kg = tension(s) - 0.5 * potential_gradient(s)
    return ResidualBundle(
        einstein=einstein,
        dF=exterior_derivative(s.em.F, p.spacetime_axes),
        dstarF=exterior_derivative(s.em.dual, p.spacetime_axes),
        klein_gordon=kg,
    )


def spatial_component(s: "Sample", form: Jet) -> Jet:
    """u·ω_{1..n}/√g for a spacetime n-form ω."""
    p = s.pkg
    return p.u * form[tuple(range(1, p.n + 1))] / p.spatial.volume_element


# -- stress component rows ------------------------------------------------------------


def _require_three(s: "Sample", what: str) -> None:
    if s.n != 3:
        raise DataClassError(f"{what} is written for n = 3")


def _outer(a: Jet, b: Jet) -> Jet:
    return jet_einsum("i,j->ij", a, b)


def _field_norms(s: "Sample") -> tuple[Jet, Jet]:
    sp = s.pkg.spatial
    return sp.norm_sq(s.em.E), sp.norm_sq(s.em.magnetic)


def electric_xx(s: "Sample") -> Jet:
    """κ/2(|E|² + |B|²) − (Λ + κ′V/2)u²."""
    mat, u = s.matter, s.pkg.u
    e2, b2 = _field_norms(s)
    half_trace = mat.cosmological_constant + 0.5 * mat.kappa_prime * s.V
    return 0.5 * mat.kappa * (e2 + b2) - half_trace * u * u


def stress_xx_row(s: "Sample") -> Evaluation:
    _require_three(s, "T(X,X)")
    return Evaluation.single(
        Comparison.of("T(X,X)", stress_frame(s)[0, 0], electric_xx(s))
    )


def stress_ee_closed(s: "Sample") -> Jet:
    p, mat = s.pkg, s.matter
    E, B = s.em.E, s.em.magnetic
    e2, b2 = _field_norms(s)
    u2inv = p.u**-2
    maxwell = -u2inv * (_outer(E, E) + _outer(B, B)) + 0.5 * u2inv * (b2 + e2) * p.g
    half_trace = mat.cosmological_constant + 0.5 * mat.kappa_prime * s.V
    return (
        mat.kappa * maxwell
        + mat.kappa_prime * scalar_pullback(s)
        + half_trace * p.g
    )


def stress_ee_row(s: "Sample") -> Evaluation:
    _require_three(s, "T(e_i,e_j)")
    return Evaluation.single(
        Comparison.of("T(e_i,e_j)", stress_frame(s)[1:, 1:], stress_ee_closed(s))
    )


def trace_adjusted_row(s: "Sample") -> Evaluation:
    """T(e_k,e_l) − u⁻²T(X,X)g_kl, with the field indices read two ways."""
    _require_three(s, "The trace-adjusted stress")
    p, mat = s.pkg, s.matter
    E, B = s.em.E, s.em.magnetic
    e2, b2 = _field_norms(s)
    t = stress_frame(s)
    lhs = t[1:, 1:] - p.u**-2 * t[0, 0] * p.g
    rest = (
        mat.kappa_prime * scalar_pullback(s)
        + (2.0 * mat.cosmological_constant + mat.kappa_prime * s.V) * p.g
    )
    uniform = -mat.kappa * p.u**-2 * (_outer(E, E) + _outer(B, B)) + rest
    contracted = -mat.kappa * p.u**-2 * (e2 + b2) * p.g + rest
    return Evaluation.with_readings(
        {
            "uniform": [Comparison.of("T̃_kl", lhs, uniform)],
            "contracted": [Comparison.of("T̃_kl", lhs, contracted)],
        }
    )


def stress_xe_row(s: "Sample") -> Evaluation:
    _require_three(s, "T(X,e_j)")
    p = s.pkg
    rhs = -s.matter.kappa * p.spatial.hodge(wedge(s.em.E, s.em.magnetic)) / p.u
    return Evaluation.single(Comparison.of("T(X,e_j)", stress_frame(s)[0, 1:], rhs))


def static_stress_row(s: "Sample") -> Evaluation:
    """Static electric stress in any dimension."""
    p, mat = s.pkg, s.matter
    if not p.static or s.em.B is not None:
        raise DataClassError("The static stress formula needs θ ≡ 0 and B = 0")
    n = p.n
    E = s.em.E
    e2 = p.spatial.norm_sq(E)
    trace = 2.0 * mat.cosmological_constant + mat.kappa_prime * s.V
    xx = mat.kappa * (n - 2) / (n - 1) * e2 - trace * p.u * p.u / (n - 1)
    ee = (
        mat.kappa * p.u**-2 * (e2 * p.g / (n - 1) - _outer(E, E))
        + trace * p.g / (n - 1)
        + mat.kappa_prime * scalar_pullback(s)
    )
    t = stress_frame(s)
    return Evaluation.single(
        Comparison.of("T(X,X)", t[0, 0], xx),
        Comparison.of("T(e_i,e_j)", t[1:, 1:], ee),
        Comparison.of("|F|²", s.em.norm_sq(), -2.0 * p.u**-2 * e2),
    )


STRESS_ROWS: dict[str, Callable[["Sample"], Evaluation]] = {
    "ID-2.10": stress_xx_row,
    "ID-2.11": stress_ee_row,
    "ID-2.12": trace_adjusted_row,
    "ID-2.14": stress_xe_row,
    "ID-3.5": static_stress_row,
}


# -- residual transport ----------------------------------------------------------------


ArrayLike = Union[Jet, float, np.ndarray]


def _flat(a: ArrayLike) -> np.ndarray:
    return np.atleast_1d(values(a)).astype(float).ravel()


@dataclass(frozen=True)
class Transport:
    """
    Residual of a derived identity and the residual contractions it should equal.

    Attributes:
        rho: ρ = LHS − RHS per reading
        basis: Candidate contractions b_k of field-equation residuals
        extra: Unconditional side comparisons evaluated with the row
    """

    rho: Mapping[str, np.ndarray]
    basis: Mapping[str, np.ndarray]
    extra: tuple[Comparison, ...] = ()

    @classmethod
    def of(
        cls,
        rho: Union[ArrayLike, Mapping[str, ArrayLike]],
        basis: Mapping[str, ArrayLike],
        extra: Sequence[Comparison] = (),
    ) -> "Transport":
        if not isinstance(rho, Mapping):
            rho = {DEFAULT_READING: rho}
        flat_rho = {name: _flat(v) for name, v in rho.items()}
        size = len(next(iter(flat_rho.values())))
        flat_basis = {}
        for name, v in basis.items():
            arr = _flat(v)
            if arr.size == 1:
                arr = np.full(size, arr[0])
            flat_basis[name] = arr
        return cls(flat_rho, flat_basis, tuple(extra))

    @property
    def size(self) -> int:
        return len(next(iter(self.rho.values())))

    def reading_rho(self, reading: str) -> np.ndarray:
        if reading in self.rho:
            return self.rho[reading]
        if len(self.rho) == 1:
            return next(iter(self.rho.values()))
        return self.rho[DEFAULT_READING]

    @classmethod
    def concat(cls, *parts: "Transport") -> "Transport":
        """Stack several lines of one row; missing basis entries are zero."""
        readings = list(dict.fromkeys(r for p in parts for r in p.rho))
        names = list(dict.fromkeys(b for p in parts for b in p.basis))
        rho = {r: np.concatenate([p.reading_rho(r) for p in parts]) for r in readings}
        basis = {
            b: np.concatenate([p.basis.get(b, np.zeros(p.size)) for p in parts])
            for b in names
        }
        extra = tuple(c for p in parts for c in p.extra)
        return cls(rho, basis, extra)

    def tau(self, coefficients: Mapping[str, float]) -> np.ndarray:
        unknown = set(coefficients) - set(self.basis)
        if unknown:
            raise ConfigError(
                f"Transport coefficients for unknown terms {sorted(unknown)}"
            )
        total = np.zeros(self.size)
        for name, vec in self.basis.items():
            total = total + float(coefficients.get(name, 0.0)) * vec
        return total

    def evaluate(self, coefficients: Mapping[str, float]) -> Evaluation:
        tau = self.tau(coefficients)
        return Evaluation.with_readings(
            {
                reading: [Comparison.of("ρ = τ", rho, tau), *self.extra]
                for reading, rho in self.rho.items()
            }
        )


class TransportTable:
    """
    Frozen transport coefficients.

    A coefficient is either a number or a mapping from spatial dimension to
    number (for rows whose sign depends on n).

    Example:
        >>> table = TransportTable.from_yaml("config/transport.yaml")
        >>> table.coefficients("ID-2.16", n=3)
        {'einstein_ee': 1.0, 'einstein_xx_g': -1.0}
    """

    def __init__(self, rows: Mapping[str, Mapping], version: int = 1):
        self.rows = {
            key: dict(value.get("coefficients", {})) for key, value in rows.items()
        }
        self.version = version

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "TransportTable":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Transport table not found: {path}")
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        logger.info(f"Loaded transport table with {len(data.get('rows', {}))} rows")
        return cls(data.get("rows", {}), int(data.get("version", 1)))

    def __contains__(self, identity_id: str) -> bool:
        return identity_id in self.rows

    def coefficients(self, identity_id: str, n: int) -> dict[str, float]:
        """
        Coefficients of one row at spatial dimension n.

        Raises:
            ConfigError: If the row or a per-dimension entry is missing
        """
        if identity_id not in self.rows:
            raise ConfigError(f"No transport coefficients for {identity_id}")
        out = {}
        for name, value in self.rows[identity_id].items():
            if isinstance(value, Mapping):
                by_n = {int(k): float(v) for k, v in value.items()}
                if n not in by_n:
                    raise ConfigError(f"{identity_id}.{name} has no entry for n = {n}")
                out[name] = by_n[n]
            else:
                out[name] = float(value)
        return out


@dataclass(frozen=True)
class TransportFit:
    """Least-squares transport coefficients and the fit quality."""

    coefficients: dict[str, float]
    residual: float
    samples: int
    rank: int


def fit_transport(
    transports: Sequence[Transport], reading: str = DEFAULT_READING
) -> TransportFit:
    """
    Solve ρ ≈ Σ c_k b_k over many samples.

    Coefficients are rounded to ``FIT_DECIMALS`` places so that refitting on
    a different seed set reproduces the same table.

    Raises:
        ValueError: If no transports are given
    """
    if not transports:
        raise ValueError("Cannot fit transport coefficients without samples")
    merged = Transport.concat(*transports)
    names = list(merged.basis)
    rho = merged.reading_rho(reading)
    scale = max(1.0, float(np.max(np.abs(rho), initial=0.0)))
    if not names:
        misfit = float(np.max(np.abs(rho), initial=0.0))
        return TransportFit({}, misfit / scale, len(transports), 0)
    A = np.column_stack([merged.basis[b] for b in names])
    coeffs, _, rank, _ = scipy.linalg.lstsq(A, rho)
    rounded = {b: round(float(c), FIT_DECIMALS) + 0.0 for b, c in zip(names, coeffs)}
    fitted = A @ np.array(list(rounded.values()))
    misfit = float(np.max(np.abs(fitted - rho), initial=0.0))
    logger.debug(f"Transport fit rank {rank}, misfit {misfit / scale:.2e}")
    return TransportFit(rounded, misfit / scale, len(transports), int(rank))


# -- transport rows -----------------------------------------------------------------


def _require_potentials(s: "Sample") -> None:
    if s.data.electric_potential is None:
        raise DataClassError("This identity needs potential-first data (E = dφ₃)")


def _require_magnetic_potential(s: "Sample") -> None:
    _require_potentials(s)
    if s.data.magnetic_potential is None:
        raise DataClassError("This identity needs B = dφ₄")


def ricci_transport(s: "Sample") -> Transport:
    _require_three(s, "The spatial Ricci formula")
    p = s.pkg
    om, u = p.omega, p.u
    rhs = (
        p.spatial.hessian(u) / u
        + 0.5 * u**-4 * (_outer(om, om) - p.omega_norm_sq * p.g)
        + stress_ee_closed(s)
    )
    return Transport.of(
        p.spatial.ricci - rhs, {"einstein_ee": s.residuals.einstein_ee}
    )


def conformal_ricci_transport(s: "Sample") -> Transport:
    _require_three(s, "The conformal Ricci formula")
    p, mat = s.pkg, s.matter
    om, u = p.omega, p.u
    du = p.spatial.d(u)
    E, B = s.em.E, s.em.magnetic
    rhs = (
        2.0 * _outer(du, du) / (u * u)
        + 0.5 * u**-4 * _outer(om, om)
        - mat.kappa * u**-2 * (_outer(E, E) + _outer(B, B))
        + mat.kappa_prime * scalar_pullback(s)
        + (2.0 * mat.cosmological_constant + mat.kappa_prime * s.V) * p.g
    )
    r = s.residuals
    return Transport.of(
        p.tilde.ricci - rhs,
        {"einstein_ee": r.einstein_ee, "einstein_xx_g": u**-2 * r.einstein_xx * p.g},
    )


def lapse_transport(s: "Sample") -> Transport:
    _require_three(s, "The lapse equation")
    p = s.pkg
    u = p.u
    rhs = -0.5 * u**-3 * p.omega_norm_sq + electric_xx(s) / u
    return Transport.of(
        p.spatial.laplacian(u) - rhs,
        {"einstein_xx_over_u": s.residuals.einstein_xx / u},
    )


def _omega_term(s: "Sample", field_form: Jet) -> Jet:
    p = s.pkg
    return p.u**-2 * p.spatial.inner(p.omega, field_form)


def electric_potential_transport(s: "Sample") -> Transport:
    _require_three(s, "The electric potential equation")
    _require_potentials(s)
    p = s.pkg
    phi3 = s.electric_potential
    base = p.spatial.laplacian(phi3) - p.spatial.inner(p.dlog_u, s.em.E)
    om_b = _omega_term(s, s.em.magnetic)
    return Transport.of(
        {"corrected": base + om_b, "printed": base - om_b},
        {"dstarF_spatial": spatial_component(s, s.residuals.dstarF)},
    )


def magnetic_potential_transport(s: "Sample") -> Transport:
    _require_three(s, "The magnetic potential equation")
    _require_magnetic_potential(s)
    p = s.pkg
    rho = (
        p.spatial.laplacian(s.magnetic_potential)
        - p.spatial.inner(p.dlog_u, s.em.B)
        - _omega_term(s, s.em.E)
    )
    return Transport.of(rho, {"dF_spatial": spatial_component(s, s.residuals.dF)})


def _hat_tilde(s: "Sample", f: Jet, label: str) -> Comparison:
    p = s.pkg
    tilde = p.u * p.u * p.tilde.laplacian(f)
    return Comparison.of(f"Δ̂{label} = u²Δ̃{label}", p.ghat.laplacian(f), tilde)


def hat_log_lapse_transport(s: "Sample") -> Transport:
    _require_three(s, "The hat Laplacian of log u")
    p, mat = s.pkg, s.matter
    e2, b2 = _field_norms(s)
    rhs = (
        -0.5 * p.u**-4 * p.omega_norm_sq
        + 0.5 * mat.kappa * p.u**-2 * (e2 + b2)
        - (mat.cosmological_constant + 0.5 * mat.kappa_prime * s.V)
    )
    return Transport.of(
        p.ghat.laplacian(p.log_u) - rhs,
        {"einstein_xx_over_u2": p.u**-2 * s.residuals.einstein_xx},
        [_hat_tilde(s, p.log_u, "log u")],
    )


def hat_electric_potential_transport(s: "Sample") -> Transport:
    _require_three(s, "The hat Laplacian of φ₃")
    _require_potentials(s)
    p = s.pkg
    phi3 = s.electric_potential
    base = p.ghat.laplacian(phi3) - 2.0 * p.spatial.inner(p.dlog_u, s.em.E)
    om_b = _omega_term(s, s.em.magnetic)
    return Transport.of(
        {"corrected": base + om_b, "printed": base - om_b},
        {"dstarF_spatial": spatial_component(s, s.residuals.dstarF)},
        [_hat_tilde(s, phi3, "φ₃")],
    )


def hat_magnetic_potential_transport(s: "Sample") -> Transport:
    _require_three(s, "The hat Laplacian of φ₄")
    _require_magnetic_potential(s)
    p = s.pkg
    phi4 = s.magnetic_potential
    rho = (
        p.ghat.laplacian(phi4)
        - 2.0 * p.spatial.inner(p.dlog_u, s.em.B)
        - _omega_term(s, s.em.E)
    )
    return Transport.of(
        rho,
        {"dF_spatial": spatial_component(s, s.residuals.dF)},
        [_hat_tilde(s, phi4, "φ₄")],
    )


def twist_potential_transport(s: "Sample") -> Transport:
    """Δ̂ψ − 4⟨dψ, dlog u⟩ against the twist-divergence residual with ω = dψ."""
    if s.psi is None:
        raise DataClassError("The twist potential identity needs exact-twist data")
    p = s.pkg
    sp = p.spatial
    dpsi = sp.d(s.psi)
    rho = p.ghat.laplacian(s.psi) - 4.0 * sp.inner(dpsi, p.dlog_u)
    twist_div = sp.laplacian(s.psi) - 3.0 * sp.inner(dpsi, p.dlog_u)
    return Transport.of(
        rho,
        {"twist_divergence": twist_div},
        [
            _hat_tilde(s, s.psi, "ψ"),
            Comparison.of("ω = dψ", p.omega, dpsi),
        ],
    )


def static_log_lapse_transport(s: "Sample") -> Transport:
    p, mat = s.pkg, s.matter
    if not p.static or s.em.B is not None:
        raise DataClassError("The static lapse equation needs θ ≡ 0 and B = 0")
    n = p.n
    e2 = p.spatial.norm_sq(s.em.E)
    trace = 2.0 * mat.cosmological_constant + mat.kappa_prime * s.V
    rhs = mat.kappa * (n - 2) / (n - 1) * e2 * p.u**-2 - trace / (n - 1)
    lhs = p.ghat.laplacian(p.log_u)
    return Transport.of(
        lhs - rhs,
        {"einstein_xx_over_u2": p.u**-2 * s.residuals.einstein_xx},
        [Comparison.of("Δ̂log u = u⁻²R̄ic(X,X)", lhs, p.u**-2 * p.ricci_bar[0, 0])],
    )


def static_electric_potential_transport(s: "Sample") -> Transport:
    p = s.pkg
    if not p.static or s.em.B is not None:
        raise DataClassError("The static potential equation needs θ ≡ 0 and B = 0")
    _require_potentials(s)
    phi3 = s.electric_potential
    rho = p.ghat.laplacian(phi3) - 2.0 * p.spatial.inner(p.dlog_u, s.em.E)
    return Transport.of(
        rho, {"dstarF_spatial": spatial_component(s, s.residuals.dstarF)}
    )


def _require_scalar(s: "Sample") -> None:
    if not s.phi:
        raise DataClassError("This identity needs a scalar field")


def potential_laplacian_transport(s: "Sample") -> Transport:
    """Δ̂(κ′V∘φ/2) against ½κ′⟨∇V, 𝔎⟩."""
    _require_scalar(s)
    p, mat = s.pkg, s.matter
    kp, a = mat.kappa_prime, mat.mass_term
    h = mat.target.geometry.metric(s.phi)
    grad = potential_gradient(s)
    hess = mat.target.hessian(s.phi, a)
    dphi = scalar_differential(s)
    hess_term = jet_einsum("ab,ai,bj,ij->", hess, dphi, dphi, p.spatial.inverse)
    grad_sq = jet_einsum("ab,a,b->", h, grad, grad)
    rhs = 0.5 * kp * hess_term + 0.25 * kp * grad_sq
    kg = jet_einsum("ab,a,b->", h, grad, s.residuals.klein_gordon)
    return Transport.of(
        p.ghat.laplacian(0.5 * kp * s.V) - rhs, {"kg_gradient": kp * kg}
    )


def scalar_energy_transport(s: "Sample") -> Transport:
    """Bochner equality for κ′|dφ|² with a quadratic potential on a flat target."""
    _require_scalar(s)
    p, mat = s.pkg, s.matter
    if mat.target.kind != "flat" or mat.target.potential != "quadratic":
        raise DataClassError("The scalar energy equality needs V = a|φ|² on ℝ^k")
    kp, a = mat.kappa_prime, mat.mass_term
    energy = scalar_energy(s)
    ghat = p.ghat
    hess = [ghat.hessian(f) for f in s.phi]
    dphi_hat = [ghat.d(f) for f in s.phi]
    ric_term = sum(
        (ghat.inner(ghat.ricci, jet_einsum("a,b->ab", d, d)) for d in dphi_hat),
        0.0 * energy,
    )
    hess_sq = sum((ghat.norm_sq(H) for H in hess), 0.0 * energy)
    rhs = 2.0 * kp * ric_term + 2.0 * kp * hess_sq + 2.0 * kp * a * energy
    kg = s.residuals.klein_gordon
    cross = sum(
        (ghat.inner(d, ghat.d(kg[i])) for i, d in enumerate(dphi_hat)),
        0.0 * energy,
    )
    return Transport.of(
        ghat.laplacian(kp * energy) - rhs, {"kg_differential": kp * cross}
    )


TRANSPORT_ROWS: dict[str, Callable[["Sample"], Transport]] = {
    "ID-2.15": ricci_transport,
    "ID-2.16": conformal_ricci_transport,
    "ID-2.18a": lapse_transport,
    "ID-2.18b": electric_potential_transport,
    "ID-2.18c": magnetic_potential_transport,
    "ID-2.19a": hat_log_lapse_transport,
    "ID-2.19b": hat_electric_potential_transport,
    "ID-2.19c": hat_magnetic_potential_transport,
    "ID-2.21": twist_potential_transport,
    "ID-3.6": static_log_lapse_transport,
    "ID-3.7": static_electric_potential_transport,
    "ID-2.42": potential_laplacian_transport,
    "ID-2.53-eq": scalar_energy_transport,
}
