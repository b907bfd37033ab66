"""
Estimate Probe
==============

Numeric estimate-side quantities on catalog solutions.

For a probe-eligible entry and a family of ĝ-balls B(x₀, a) the probe
samples the half ball B(x₀, a/2) and records

    - sup |Rm(ḡ)|_ĝ · a²                  (curvature constant)
    - sup h · d², d = a − dist(x₀, x)     (the blow-up quantity f)
    - sup (|∇log u|² + |κ|u⁻²|E|² + κ′|dφ|²/n) · a²/n
    - sup |κ|u⁻²|E∧B|_ĝ · a²               (Poynting hypothesis, ≤ 1 required)
    - min Δ̂h − h²/72 on static entries

Constants are recorded, not asserted: the estimates only claim existence.

Distances are measured along the radial direction, where they are exact by
symmetry (ĝ is a product on static entries, so no t-excursion shortens
them). A sample at signed radial offset s·cos α and tangential offset
s·sin α is placed at ĝ-distance s from the center; off the radial line this
is first-order accurate.
"""

import asyncio
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.optimize

from core.errors import CatalogError, HypothesisError
from core.fieldeq import scalar_energy
from core.inequalities import harnack_quantity
from core.jets import DEFAULT_ORDER, values
from core.sample import FieldData, Sample
from core.stationary import StationaryData
from core.tensor import wedge

logger = logging.getLogger(__name__)

RADIAL_SAMPLES = 64
ANGULAR_SAMPLES = 8
DEFAULT_CENTER = 1.0
DEFAULT_RADII = (0.1, 0.2, 0.4)
QUAD_EPSREL = 1e-10
HARNACK_SLACK = 1e-10
DRIFT_LIMIT = 0.01
SCALE_OFFSET = 0.1


# -- distances -------------------------------------------------------------------------


def _axis_point(data: FieldData, r: float) -> tuple[float, ...]:
    return (r,) + (0.0,) * (data.n - 1)


def _require_shell(data: FieldData) -> None:
    if data.domain.kind != "shell" or data.stationary is None:
        raise CatalogError(f"{data.label} is not spherically symmetric")


def radial_metric(data: FieldData, r: float) -> float:
    """ĝ_rr on the positive x¹ axis."""
    sd = data.stationary
    p = _axis_point(data, r)
    g_rr = sd.g[0][0].value(p)
    if sd.theta:
        g_rr += sd.u.value(p) ** 2 * sd.theta[0].value(p) ** 2
    return g_rr


def areal_radius(data: FieldData, r: float) -> float:
    """R(r) with g = g_rr dr² + R² dΩ²."""
    return r * math.sqrt(data.stationary.g[1][1].value(_axis_point(data, r)))


def radial_distance(data: FieldData, r1: float, r2: float) -> float:
    """
    ĝ-length of the radial segment between coordinate radii r1 and r2.

    Radial curves are taken as minimizing among same-t curves by symmetry.

    Raises:
        CatalogError: If the data are not spherically symmetric or the
            interval leaves the validity domain
    """
    _require_shell(data)
    lo, hi = sorted((float(r1), float(r2)))
    domain = data.domain
    if lo < domain.r_min or hi > domain.r_max:
        raise CatalogError(
            f"[{lo}, {hi}] leaves the domain [{domain.r_min}, {domain.r_max}] "
            f"of {data.label}"
        )
    if lo == hi:
        return 0.0
    value, _ = scipy.integrate.quad(
        lambda r: math.sqrt(radial_metric(data, r)),
        lo,
        hi,
        epsabs=0.0,
        epsrel=QUAD_EPSREL,
        limit=200,
    )
    return value


def radius_at_offset(data: FieldData, center: float, offset: float) -> float:
    """
    Coordinate radius at signed radial ĝ-distance ``offset`` from ``center``.

    Raises:
        CatalogError: If the offset runs out of the validity domain
    """
    if offset == 0.0:
        return center
    domain = data.domain

    def signed(r: float) -> float:
        d = radial_distance(data, center, r)
        return (d if r >= center else -d) - offset

    end = domain.r_max if offset > 0 else domain.r_min
    if signed(end) * (1.0 if offset > 0 else -1.0) < 0.0:
        raise CatalogError(
            f"Ball of {data.label} around r = {center} exits the validity domain"
        )
    lo, hi = sorted((center, end))
    return scipy.optimize.brentq(signed, lo, hi, xtol=1e-14, rtol=1e-14)


# -- pointwise quantities ------------------------------------------------------------


@dataclass(frozen=True)
class EstimateQuantities:
    """
    Estimate-side quantities at one point.

    Attributes:
        h4: 2|∇log u|² + ½u⁻⁴|ω|² − κu⁻²(|E|² + |B|²) + κ′V/2 + Λ (n = 3)
        hn: |∇log u|² − κ(n−2)/(n−1)u⁻²|E|² + κ′(n+1)/(n−1)²|dφ|² (static)
        h_thm3: |∇log u|² + |κ|u⁻²|E|² + κ′|dφ|²/n
        rm_norm: |Rm(ḡ)|_ĝ
        poynting: |κ|u⁻²|E∧B|_ĝ
        harnack_gap: Δ̂hₙ − hₙ²/72 (static only)
        harnack_scale: max(1, |Δ̂hₙ|, hₙ²/72)
    """

    h4: Optional[float]
    hn: Optional[float]
    h_thm3: float
    rm_norm: float
    poynting: float
    harnack_gap: Optional[float] = None
    harnack_scale: float = 1.0

    @property
    def h(self) -> float:
        """The quantity f is built from: h₄ for n = 3, hₙ otherwise."""
        return self.h4 if self.h4 is not None else self.hn


def _float(jet) -> float:
    return float(np.asarray(values(jet)))


def estimate_quantities(s: Sample) -> EstimateQuantities:
    p, mat, n = s.pkg, s.matter, s.n
    sp = p.spatial
    E, B = s.em.E, s.em.magnetic
    dl2 = sp.norm_sq(p.dlog_u)
    e2 = p.u**-2 * sp.norm_sq(E)
    energy = scalar_energy(s) if s.phi else 0.0 * dl2
    h_thm3 = dl2 + abs(mat.kappa) * e2 + mat.kappa_prime / n * energy

    h4 = None
    poynting = 0.0
    if n == 3:
        b2 = p.u**-2 * sp.norm_sq(B)
        h4 = (
            2.0 * dl2
            + 0.5 * p.u**-4 * p.omega_norm_sq
            - mat.kappa * (e2 + b2)
            + 0.5 * mat.kappa_prime * s.V
            + mat.cosmological_constant
        )
        eb = max(_float(sp.form_norm_sq(wedge(E, B))), 0.0)
        poynting = abs(mat.kappa) * _float(p.u) ** -2 * math.sqrt(eb)

    rm = np.asarray(values(p.gbar.riemann_lowered))
    gi = np.asarray(values(p.ghat.inverse))
    rm_sq = np.einsum("abcd,efgh,ae,bf,cg,dh->", rm, rm, gi, gi, gi, gi)

    hn = gap = None
    scale = 1.0
    if p.static and s.em.B is None:
        h = harnack_quantity(s)
        lap = _float(p.ghat.laplacian(h))
        hv = _float(h)
        hn = hv
        gap = lap - hv * hv / 72.0
        scale = max(1.0, abs(lap), hv * hv / 72.0)
    return EstimateQuantities(
        h4=None if h4 is None else _float(h4),
        hn=hn,
        h_thm3=_float(h_thm3),
        rm_norm=math.sqrt(max(float(rm_sq), 0.0)),
        poynting=poynting,
        harnack_gap=gap,
        harnack_scale=scale,
    )


def require_probe_hypotheses(data: FieldData) -> None:
    """
    Raises:
        HypothesisError: Unless Λ ≥ 0, κ ≤ 0 and κ′ ≥ 0
    """
    mat = data.matter
    if mat.kappa > 0:
        raise HypothesisError(f"{data.label}: κ = {mat.kappa} > 0 is not probed")
    if mat.cosmological_constant < 0 or mat.kappa_prime < 0:
        raise HypothesisError(f"{data.label}: needs Λ ≥ 0 and κ′ ≥ 0")
    if not mat.target.is_convex():
        raise HypothesisError(f"{data.label}: potential is not convex")


# -- balls -----------------------------------------------------------------------------


@dataclass
class BallResult:
    """Recorded constants of one ball."""

    center: float
    radius: float
    samples: int
    sup_rm_a2: float = 0.0
    sup_f: float = 0.0
    sup_h: float = 0.0
    sup_thm3: float = 0.0
    sup_poynting_a2: float = 0.0
    min_h: Optional[float] = None
    min_harnack_gap: Optional[float] = None
    harnack_ok: bool = True


def ball_points(
    data: FieldData,
    center: float,
    radius: float,
    radial: int = RADIAL_SAMPLES,
    angular: int = ANGULAR_SAMPLES,
) -> list[tuple[tuple[float, ...], float]]:
    """
    Sample points of B(x₀, a/2) with their ĝ-distance from x₀ = (center, 0, …).

    The center comes first, then ``radial`` shells up to a/2, each with
    ``angular`` directions running from outward (α = 0) to inward (α = π),
    so both ends of the radial diameter are always sampled.

    Raises:
        CatalogError: If the ball exits the validity domain
    """
    _require_shell(data)
    out = [(_axis_point(data, center), 0.0)]
    radii: dict[float, float] = {}
    for i in range(radial):
        s = (i + 1) / radial * radius / 2.0
        for j in range(angular):
            alpha = math.pi * j / (angular - 1) if angular > 1 else 0.0
            offset = s * math.cos(alpha)
            if offset not in radii:
                radii[offset] = radius_at_offset(data, center, offset)
            r = radii[offset]
            beta = s * math.sin(alpha) / areal_radius(data, r)
            point = (r * math.cos(beta), r * math.sin(beta)) + (0.0,) * (data.n - 2)
            out.append((point, s))
    return out


def probe_ball(
    data: FieldData,
    center: float,
    radius: float,
    radial: int = RADIAL_SAMPLES,
    angular: int = ANGULAR_SAMPLES,
    order: int = DEFAULT_ORDER,
) -> BallResult:
    points = ball_points(data, center, radius, radial, angular)
    result = BallResult(center, radius, len(points))
    a2 = radius * radius
    for index, (point, dist) in enumerate(points):
        q = estimate_quantities(data.sample(point, order, index))
        result.sup_rm_a2 = max(result.sup_rm_a2, q.rm_norm * a2)
        result.sup_h = max(result.sup_h, q.h)
        result.min_h = q.h if result.min_h is None else min(result.min_h, q.h)
        result.sup_f = max(result.sup_f, q.h * (radius - dist) ** 2)
        result.sup_thm3 = max(result.sup_thm3, q.h_thm3 * a2 / data.n)
        result.sup_poynting_a2 = max(result.sup_poynting_a2, q.poynting * a2)
        if q.harnack_gap is not None:
            gap = q.harnack_gap
            if result.min_harnack_gap is None or gap < result.min_harnack_gap:
                result.min_harnack_gap = gap
            if gap < -HARNACK_SLACK * q.harnack_scale:
                result.harnack_ok = False
    logger.debug(f"{data.label} ball r₀={center} a={radius}: sup f {result.sup_f:.4g}")
    return result


@dataclass
class ProbeResult:
    """Per-ball rows and the family maxima of one entry."""

    name: str
    n: int
    balls: list[BallResult] = field(default_factory=list)

    @property
    def constants(self) -> dict[str, float]:
        keys = ("sup_rm_a2", "sup_f", "sup_thm3", "sup_poynting_a2")
        return {k: max((getattr(b, k) for b in self.balls), default=0.0) for k in keys}

    @property
    def min_h(self) -> Optional[float]:
        found = [b.min_h for b in self.balls if b.min_h is not None]
        return min(found, default=None)

    @property
    def harnack_ok(self) -> bool:
        return all(b.harnack_ok for b in self.balls)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "constants": self.constants,
            "min_h": self.min_h,
            "harnack_ok": self.harnack_ok,
            "balls": [asdict(b) for b in self.balls],
        }

    def csv_rows(self) -> list[dict]:
        return [{"entry": self.name, "n": self.n, **asdict(b)} for b in self.balls]


def estimate_probe(
    data: FieldData,
    center: float = DEFAULT_CENTER,
    radii: Sequence[float] = DEFAULT_RADII,
    radial: int = RADIAL_SAMPLES,
    angular: int = ANGULAR_SAMPLES,
    order: int = DEFAULT_ORDER,
) -> ProbeResult:
    """
    Probe a family of balls around one center.

    Raises:
        HypothesisError: If the data violate the sign hypotheses
        CatalogError: If a ball exits the validity domain
    """
    require_probe_hypotheses(data)
    result = ProbeResult(data.label, data.n)
    for a in radii:
        result.balls.append(probe_ball(data, center, a, radial, angular, order))
    logger.info(f"Probed {data.label}: {result.constants}")
    return result


async def probe_many(
    datasets: Sequence[FieldData],
    center: float = DEFAULT_CENTER,
    radii: Sequence[float] = DEFAULT_RADII,
    radial: int = RADIAL_SAMPLES,
    angular: int = ANGULAR_SAMPLES,
    max_workers: int = 4,
) -> list[ProbeResult]:
    """Probe several entries concurrently, one worker per ball."""
    semaphore = asyncio.Semaphore(max_workers)

    async def one(data: FieldData, a: float) -> BallResult:
        async with semaphore:
            return await asyncio.to_thread(probe_ball, data, center, a, radial, angular)

    results = []
    for data in datasets:
        require_probe_hypotheses(data)
        balls = await asyncio.gather(*(one(data, a) for a in radii))
        results.append(ProbeResult(data.label, data.n, list(balls)))
    return results


async def probe_drift(
    datasets: Sequence[FieldData],
    coarse: Sequence[ProbeResult],
    radial: int = RADIAL_SAMPLES,
    angular: int = ANGULAR_SAMPLES,
    max_workers: int = 4,
) -> dict[str, float]:
    """
    Relative change of sup f per entry when both sampling densities double.

    ``coarse`` must come from ``probe_many`` on the same datasets at
    (radial, angular).
    """
    dense = await probe_many(
        datasets, radial=2 * radial, angular=2 * angular, max_workers=max_workers
    )
    drift = {}
    for c, fine in zip(coarse, dense):
        base = c.constants["sup_f"]
        drift[c.name] = abs(fine.constants["sup_f"] - base) / max(abs(base), 1e-300)
    return drift


# -- rescaling ------------------------------------------------------------------------


def rescale(data: FieldData, factor: float, time_scale: float = 1.0) -> FieldData:
    """
    ḡ → λḡ combined with t → t/c.

    u → c√λu, g → λg, θ → θ/c, (E, B, φ₃, φ₄) → c√λ(·), ψ → c²λψ,
    Λ → Λ/λ, m → m/√λ; φ is unchanged.
    """
    if factor <= 0 or time_scale <= 0:
        raise ValueError("Rescaling factors must be positive")
    sd = data.stationary
    field_factor = time_scale * math.sqrt(factor)

    def scaled(expr, k):
        return None if expr is None else expr.scaled(k)

    stationary = StationaryData(
        n=sd.n,
        u=sd.u.scaled(field_factor),
        g=tuple(tuple(e.scaled(factor) for e in row) for row in sd.g),
        theta=tuple(t.scaled(1.0 / time_scale) for t in sd.theta),
        static=sd.static,
    )
    return replace(
        data,
        label=f"{data.label}@λ={factor:.6g}",
        stationary=stationary,
        matter=data.matter.rescaled(factor),
        electric=tuple(e.scaled(field_factor) for e in data.electric),
        magnetic=tuple(b.scaled(field_factor) for b in data.magnetic),
        electric_potential=scaled(data.electric_potential, field_factor),
        magnetic_potential=scaled(data.magnetic_potential, field_factor),
        twist_potential=scaled(data.twist_potential, time_scale**2 * factor),
    )


@dataclass(frozen=True)
class ScaleCheck:
    """f at a base point before and after the blow-up rescaling."""

    f: float
    f_rescaled: float
    factor: float

    @property
    def relative_change(self) -> float:
        return abs(self.f_rescaled - self.f) / max(abs(self.f), 1e-300)


def scale_check(
    data: FieldData,
    base_radius: float,
    center: float = DEFAULT_CENTER,
    radius: float = DEFAULT_RADII[-1],
    order: int = DEFAULT_ORDER,
) -> ScaleCheck:
    """
    Rescale by u → u/u(x̄) and ḡ → h(x̄)ḡ and recompute f = h·d² at x̄.

    Raises:
        CatalogError: If x̄ is not inside the ball
    """
    point = _axis_point(data, base_radius)

    def f_at(d: FieldData, a: float) -> tuple[float, float, float]:
        q = estimate_quantities(d.sample(point, order))
        dist = radial_distance(d, center, base_radius)
        if dist >= a:
            raise CatalogError(f"r = {base_radius} is outside the ball")
        u = d.stationary.u.value(point)
        return q.h * (a - dist) ** 2, q.h, u

    f, h, u = f_at(data, radius)
    if h < 0:
        raise HypothesisError(f"{data.label}: h(x̄) = {h} cannot set the scale")
    # h(x̄) = 0 only on flat data, where f vanishes for every ḡ-scale
    factor = h if h > 0 else 1.0
    rescaled = rescale(data, factor, 1.0 / u)
    f2, _, _ = f_at(rescaled, math.sqrt(factor) * radius)
    return ScaleCheck(f, f2, factor)
