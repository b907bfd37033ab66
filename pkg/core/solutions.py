"""
Solution Catalog
================

Exact solutions, manufactured test families and seeded random field data.

The catalog lives in ``config/solutions.json``. Each entry stores its fields
as :class:`FieldExpr` templates with ``{name}`` placeholders filled from the
entry parameters, so one entry covers a whole parameter range. Spherically
symmetric entries give g_rr and the areal radius R²; the chart metric is

    g_ij = g_rr n_i n_j + (R²/r²)(δ_ij − n_i n_j),    n = x/r

Normalization constants that were found by residual search are frozen in the
file next to the other parameters; :func:`normalize_entry` re-runs the search.

The random generators draw bounded expressions: every generated term carries
a coefficient scaled so that the sum of term bounds on [−½, ½]ⁿ stays below
the amplitude. Output is a pure function of the seed.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np
import scipy.optimize

from core.errors import CatalogError, GeometryError
from core.field_expr import FieldExpr, parse_field_expr
from core.fieldeq import MatterData
from core.jets import DEFAULT_ORDER, values
from core.sample import Domain, FieldData
from core.stationary import StationaryData
from core.target import ScalarTarget, WarpedTarget

logger = logging.getLogger(__name__)

DEFAULT_CATALOG = Path(__file__).parent.parent / "config" / "solutions.json"

AMPLITUDE = 0.3
MAX_RETRIES = 6
SPD_FLOOR = 0.5
SPD_SWEEP = 100
ORACLE_TOLERANCE = 1e-8
ORACLES = ("einstein", "maxwell", "klein_gordon", "twist")
RANDOM_CLASSES = (
    "random",
    "random-forms",
    "random-static",
    "exact-twist",
    "coulomb",
    "target",
    "bochner",
    "none",
)


def _fmt(value: float) -> str:
    text = repr(float(value))
    return f"({text})" if value < 0 else text


# -- catalog --------------------------------------------------------------------------


def spherical_metric(n: int, g_rr: str, areal_sq: str) -> list[list[str]]:
    """Chart components of g_rr dr² + R² dΩ² as expression text."""
    rows = [[""] * n for _ in range(n)]
    for i in range(n):
        xi = f"x{i + 1}"
        rows[i][i] = (
            f"({g_rr})*{xi}^2*r^-2 + ({areal_sq})*r^-2*(1 - {xi}^2*r^-2)"
        )
        for j in range(i + 1, n):
            text = f"(({g_rr}) - ({areal_sq})*r^-2)*{xi}*x{j + 1}*r^-2"
            rows[i][j] = rows[j][i] = text
    return rows


@dataclass(frozen=True)
class SolutionEntry:
    """
    One catalog entry.

    Attributes:
        name: Entry name (``"phantom-RN"``)
        mode: ``"stationary"`` (n = 3) or ``"static"`` (any n)
        n: Spatial dimension
        params: Default parameter values, frozen normalizations included
        ranges: Allowed interval per parameter
        normalize: Parameters fitted by :func:`normalize_entry`
        fields: Field templates (lapse, metric, theta, electric, ...)
        matter: Matter constants, numbers or templates
        domain: Validity domain
        oracles: Residuals that vanish on the entry
        probe: Whether the estimate probe accepts the entry
        data_class: Data class of the generated samples
        description: One-line summary
    """

    name: str
    mode: str
    n: int
    params: Mapping[str, float] = field(default_factory=dict)
    ranges: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    normalize: tuple[str, ...] = ()
    fields: Mapping[str, Any] = field(default_factory=dict)
    matter: Mapping[str, Any] = field(default_factory=dict)
    domain: Domain = field(default_factory=Domain)
    oracles: tuple[str, ...] = ()
    probe: bool = False
    data_class: str = "catalog"
    description: str = ""

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SolutionEntry":
        try:
            mode = data.get("mode", "static")
            if mode not in ("stationary", "static"):
                raise CatalogError(f"Unknown mode '{mode}'")
            oracles = tuple(data.get("oracles", ()))
            unknown = set(oracles) - set(ORACLES)
            if unknown:
                raise CatalogError(f"Unknown oracles {sorted(unknown)}")
            n = int(data.get("n", 3))
            domain = Domain.from_dict({"dim": n, **data.get("domain", {})})
            return cls(
                name=data["name"],
                mode=mode,
                n=n,
                params={k: float(v) for k, v in data.get("params", {}).items()},
                ranges={
                    k: (float(lo), float(hi))
                    for k, (lo, hi) in data.get("ranges", {}).items()
                },
                normalize=tuple(data.get("normalize", ())),
                fields=dict(data.get("fields", {})),
                matter=dict(data.get("matter", {})),
                domain=domain,
                oracles=oracles,
                probe=bool(data.get("probe", False)),
                data_class=data.get("data_class", "catalog"),
                description=data.get("description", ""),
            )
        except KeyError as e:
            raise CatalogError(f"Catalog entry is missing {e}") from e

    def resolve(self, overrides: Optional[Mapping[str, float]] = None) -> dict:
        """
        Parameters with overrides applied.

        Raises:
            CatalogError: On an unknown parameter or a value outside its range
        """
        params = dict(self.params)
        for key, value in (overrides or {}).items():
            if key not in params:
                raise CatalogError(f"{self.name} has no parameter '{key}'")
            params[key] = float(value)
        for key, (lo, hi) in self.ranges.items():
            if key in params and not lo <= params[key] <= hi:
                raise CatalogError(
                    f"{self.name}: {key} = {params[key]} outside [{lo}, {hi}]"
                )
        return params

    def _expr(self, template: str, params: Mapping[str, float]) -> FieldExpr:
        text = template.format(**{k: _fmt(v) for k, v in params.items()})
        return parse_field_expr(text)

    def _optional(self, key: str, params: Mapping[str, float]) -> Optional[FieldExpr]:
        template = self.fields.get(key)
        return None if template is None else self._expr(template, params)

    def _many(self, key: str, params: Mapping[str, float]) -> tuple[FieldExpr, ...]:
        return tuple(self._expr(t, params) for t in self.fields.get(key, ()))

    def _metric(self, params: Mapping[str, float]) -> tuple[tuple[FieldExpr, ...], ...]:
        spec = self.fields.get("metric", {"kind": "flat"})
        kind = spec.get("kind", "flat")
        if kind == "flat":
            n = self.n
            rows = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
        elif kind == "spherical":
            rows = spherical_metric(self.n, spec["g_rr"], spec.get("areal_sq", "r^2"))
        else:
            raise CatalogError(f"{self.name}: unknown metric kind '{kind}'")
        parsed: dict[str, FieldExpr] = {}
        out = []
        for row in rows:
            out.append(tuple(parsed.setdefault(t, self._expr(t, params)) for t in row))
        return tuple(out)

    def field_data(self, overrides: Optional[Mapping[str, float]] = None) -> FieldData:
        """
        Build the entry's field data.

        Raises:
            CatalogError: On bad parameters or templates
        """
        params = self.resolve(overrides)
        try:
            theta = self._many("theta", params)
            stationary = StationaryData(
                n=self.n,
                u=self._expr(self.fields.get("lapse", "1"), params),
                g=self._metric(params),
                theta=theta,
                static=self.mode == "static",
            )
            matter = {
                k: float(v.format(**params)) if isinstance(v, str) else v
                for k, v in self.matter.items()
                if k != "target"
            }
            if "target" in self.matter:
                matter["target"] = self.matter["target"]
            return FieldData(
                label=self.name,
                data_class=self.data_class,
                stationary=stationary,
                matter=MatterData.from_dict(matter),
                electric=self._many("electric", params),
                magnetic=self._many("magnetic", params),
                electric_potential=self._optional("electric_potential", params),
                magnetic_potential=self._optional("magnetic_potential", params),
                scalar=self._many("scalar", params),
                twist_potential=self._optional("twist_potential", params),
                test_scalar=self._optional("test_scalar", params),
                domain=self.domain,
            )
        except (KeyError, ValueError) as e:
            raise CatalogError(f"{self.name}: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "mode": self.mode, "n": self.n}
        if self.description:
            out["description"] = self.description
        if self.data_class != "catalog":
            out["data_class"] = self.data_class
        out["params"] = dict(self.params)
        if self.ranges:
            out["ranges"] = {k: list(v) for k, v in self.ranges.items()}
        if self.normalize:
            out["normalize"] = list(self.normalize)
        out["fields"] = dict(self.fields)
        if self.matter:
            out["matter"] = dict(self.matter)
        out["domain"] = {k: v for k, v in self.domain.to_dict().items() if k != "dim"}
        out["oracles"] = list(self.oracles)
        out["probe"] = self.probe
        return out


class SolutionCatalog:
    """
    Catalog loaded from JSON.

    Example:
        >>> catalog = SolutionCatalog()
        >>> catalog.get("phantom-RN").field_data({"q": 0.05})
    """

    def __init__(self, path: Union[str, Path] = DEFAULT_CATALOG):
        self.path = Path(path)
        self.version = 1
        self.entries: dict[str, SolutionEntry] = {}
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            raise FileNotFoundError(f"Catalog not found: {self.path}")
        try:
            with open(self.path) as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise CatalogError(
                f"{self.path}: line {e.lineno}, column {e.colno}: {e.msg}"
            ) from e
        self.version = int(data.get("version", 1))
        for raw in data.get("entries", []):
            entry = SolutionEntry.from_dict(raw)
            if entry.name in self.entries:
                raise CatalogError(f"Duplicate catalog entry '{entry.name}'")
            self.entries[entry.name] = entry
        logger.info(f"Loaded {len(self.entries)} catalog entries from {self.path}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries.values())

    @property
    def names(self) -> list[str]:
        return list(self.entries)

    def get(self, name: str) -> SolutionEntry:
        if name not in self.entries:
            raise CatalogError(f"Unknown catalog entry '{name}' (have {self.names})")
        return self.entries[name]

    def probe_entries(self) -> list[SolutionEntry]:
        return [e for e in self if e.probe]

    def save(self, path: Optional[Union[str, Path]] = None) -> Path:
        """Write the catalog back, e.g. after regenerating normalizations."""
        target = Path(path) if path else self.path
        doc = {"version": self.version, "entries": [e.to_dict() for e in self]}
        target.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        return target

    def with_params(self, name: str, params: Mapping[str, float]) -> None:
        entry = self.get(name)
        merged = dict(entry.params) | {k: float(v) for k, v in params.items()}
        self.entries[name] = replace(entry, params=merged)


# -- oracles -----------------------------------------------------------------------


def _largest(jet) -> float:
    return float(np.max(np.abs(values(jet)), initial=0.0))


def oracle_residuals(data: FieldData, oracles: Sequence[str], s) -> dict[str, float]:
    """Largest absolute residual per oracle at one sample."""
    out = {}
    needs_bundle = set(oracles) & {"einstein", "maxwell", "klein_gordon"}
    bundle = s.residuals if needs_bundle else None
    if "einstein" in oracles:
        out["einstein"] = _largest(bundle.einstein)
    if "maxwell" in oracles:
        out["maxwell"] = max(_largest(bundle.dF), _largest(bundle.dstarF))
    if "klein_gordon" in oracles and bundle.klein_gordon is not None:
        out["klein_gordon"] = _largest(bundle.klein_gordon)
    if "twist" in oracles:
        if s.psi is None:
            raise CatalogError(f"{data.label}: twist oracle without a twist potential")
        out["twist"] = _largest(s.pkg.omega - s.pkg.spatial.d(s.psi))
    return out


@dataclass
class OracleResult:
    """Worst oracle residuals of one entry."""

    name: str
    residuals: dict[str, float]
    points: int
    tolerance: float = ORACLE_TOLERANCE

    @property
    def passed(self) -> bool:
        return all(r < self.tolerance for r in self.residuals.values())


def check_entry(
    entry: SolutionEntry,
    points: int = 20,
    seed: int = 0,
    order: int = DEFAULT_ORDER,
    overrides: Optional[Mapping[str, float]] = None,
) -> OracleResult:
    """
    Evaluate an entry's oracles on seeded points of its validity domain.

    Raises:
        CatalogError: If the entry cannot be built
    """
    data = entry.field_data(overrides)
    pts = entry.domain.points(np.random.default_rng(seed), points)
    data.validate(pts)
    worst = {name: 0.0 for name in entry.oracles}
    for i, p in enumerate(pts):
        s = data.sample(p, order, i)
        for name, value in oracle_residuals(data, entry.oracles, s).items():
            worst[name] = max(worst[name], value)
    result = OracleResult(entry.name, worst, len(pts))
    if not result.passed:
        logger.warning(f"Catalog oracle failed for {entry.name}: {worst}")
    return result


def normalize_entry(
    entry: SolutionEntry, points: int = 8, seed: int = 0, order: int = 3
) -> dict[str, float]:
    """
    Fit the entry's normalization parameters by residual search.

    Only ratios the field equations see are identifiable, so entries pin the
    other constants (c_E = 1) and fit the rest.

    Raises:
        CatalogError: If the entry has nothing to normalize or the fit fails
    """
    if not entry.normalize:
        raise CatalogError(f"{entry.name} has no normalization parameters")
    pts = entry.domain.points(np.random.default_rng(seed), points)

    def residual(x: np.ndarray) -> np.ndarray:
        overrides = dict(zip(entry.normalize, x))
        data = entry.field_data(overrides)
        out = []
        for i, p in enumerate(pts):
            bundle = data.sample(p, order, i).residuals
            out.append(np.ravel(values(bundle.einstein)))
        return np.concatenate(out)

    x0 = np.full(len(entry.normalize), 0.5)
    fit = scipy.optimize.least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if not fit.success:
        raise CatalogError(
            f"Normalization search failed for {entry.name}: {fit.message}"
        )
    found = {k: float(v) for k, v in zip(entry.normalize, fit.x)}
    logger.info(f"Normalized {entry.name}: {found} (cost {fit.cost:.2e})")
    return found


# -- random data ---------------------------------------------------------------------


def _linear(rng: np.random.Generator, n: int) -> str:
    k = rng.uniform(-2.0, 2.0, n)
    parts = [f"{_fmt(round(float(c), 6))}*x{i + 1}" for i, c in enumerate(k)]
    return " + ".join(parts) + f" + {_fmt(round(float(rng.uniform(-1, 1)), 6))}"


def bounded_expr(
    rng: np.random.Generator, n: int, amplitude: float, constant: float = 0.0
) -> FieldExpr:
    """
    ``constant`` plus terms whose sup on [−½, ½]ⁿ sums to at most ``amplitude``.

    At amplitude 0 the result is the constant alone.
    """
    i, j = rng.integers(n), rng.integers(n)
    terms = [
        (f"x{rng.integers(n) + 1}", 0.5),
        (f"x{i + 1}*x{j + 1}", 0.25),
        (f"sin({_linear(rng, n)})", 1.0),
        (f"cos({_linear(rng, n)})", 1.0),
    ]
    weights = rng.uniform(-1.0, 1.0, len(terms))
    bound = float(sum(abs(w) * b for w, (_, b) in zip(weights, terms)))
    text = _fmt(constant)
    if amplitude > 0.0 and bound > 0.0:
        scale = amplitude / bound
        for w, (term, _) in zip(weights, terms):
            text += f" + {_fmt(round(float(w * scale), 9))}*{term}"
    return parse_field_expr(text)


def random_metric(
    rng: np.random.Generator, n: int, amplitude: float
) -> tuple[tuple[FieldExpr, ...], ...]:
    """I + bounded symmetric perturbation; λ_min ≥ 1 − amplitude on the cube."""
    off = amplitude / (2.0 * max(n - 1, 1))
    rows: list[list[Optional[FieldExpr]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = bounded_expr(rng, n, amplitude / 2.0, 1.0)
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = bounded_expr(rng, n, off)
    return tuple(tuple(row) for row in rows)


def min_eigenvalue(g: Sequence[Sequence[FieldExpr]], points: np.ndarray) -> float:
    worst = np.inf
    for p in points:
        m = np.array([[e.value(p) for e in row] for row in g])
        worst = min(worst, float(np.linalg.eigvalsh(m)[0]))
    return worst


def _random_matter(
    rng: np.random.Generator, target: Optional[ScalarTarget] = None
) -> MatterData:
    return MatterData(
        cosmological_constant=round(float(rng.uniform(0.0, 0.5)), 6),
        kappa=-round(float(rng.uniform(0.2, 2.0)), 6),
        kappa_prime=round(float(rng.uniform(0.1, 1.0)), 6),
        mass=round(float(rng.uniform(0.1, 1.0)), 6),
        target=target or ScalarTarget("flat", 2, "quadratic"),
    )


def _scalar_field(
    rng: np.random.Generator, n: int, target: ScalarTarget, amplitude: float
) -> tuple[FieldExpr, ...]:
    if target.kind == "hyperbolic":
        first = bounded_expr(rng, n, amplitude, 1.0)
        return (first,) + tuple(
            bounded_expr(rng, n, amplitude) for _ in range(target.dim - 1)
        )
    return tuple(bounded_expr(rng, n, amplitude) for _ in range(target.dim))


def _spd_metric(
    rng: np.random.Generator, n: int, amplitude: float, label: str
) -> tuple[tuple[tuple[FieldExpr, ...], ...], float]:
    """
    Raises:
        GeometryError: If no SPD metric is found within ``MAX_RETRIES``
    """
    sweep = Domain("cube", n).points(rng, SPD_SWEEP)
    for _ in range(MAX_RETRIES):
        g = random_metric(rng, n, amplitude)
        if min_eigenvalue(g, sweep) > SPD_FLOOR:
            return g, amplitude
        logger.debug(f"{label}: metric below the SPD floor, shrinking amplitude")
        amplitude *= 0.5
    raise GeometryError(
        f"{label}: no positive definite metric after {MAX_RETRIES} tries"
    )


def random_stationary(
    seed: int, dim: int = 3, amplitude: float = AMPLITUDE, potentials: bool = True
) -> FieldData:
    """
    Seeded stationary data with Maxwell and scalar fields.

    With ``potentials`` E = dφ₃ and B = dφ₄; otherwise E and B are arbitrary
    1-forms (the random-forms class).

    Raises:
        CatalogError: If amplitude exceeds the default bound
        GeometryError: If no SPD metric is found
    """
    if amplitude > AMPLITUDE:
        raise CatalogError(f"Amplitude {amplitude} above {AMPLITUDE}")
    rng = np.random.default_rng(seed)
    label = f"random#{seed}" if potentials else f"random-forms#{seed}"
    g, amplitude = _spd_metric(rng, dim, amplitude, label)
    u = bounded_expr(rng, dim, amplitude, 1.0)
    theta = tuple(bounded_expr(rng, dim, amplitude) for _ in range(dim))
    matter = _random_matter(rng)
    fields: dict[str, Any] = {}
    if potentials:
        fields["electric_potential"] = bounded_expr(rng, dim, amplitude)
        fields["magnetic_potential"] = bounded_expr(rng, dim, amplitude)
    else:
        for key in ("electric", "magnetic"):
            fields[key] = tuple(bounded_expr(rng, dim, amplitude) for _ in range(dim))
    return FieldData(
        label=label,
        data_class="random" if potentials else "random-forms",
        stationary=StationaryData(n=dim, u=u, g=g, theta=theta),
        matter=matter,
        scalar=_scalar_field(rng, dim, matter.target, amplitude),
        test_scalar=bounded_expr(rng, dim, 1.0, float(rng.uniform(-1, 1))),
        domain=Domain("cube", dim),
        seed=seed,
        **fields,
    )


STATIC_TARGETS = (
    ScalarTarget("flat", 2, "quadratic"),
    ScalarTarget("flat", 2, "quartic", 0.5),
    ScalarTarget("hyperbolic", 2, "distance"),
)


def random_static(
    seed: int, dim: Optional[int] = None, amplitude: float = AMPLITUDE
) -> FieldData:
    """Seeded static data with E = dφ₃ and a scalar field; n = 3 + seed mod 3."""
    n = dim if dim is not None else 3 + seed % 3
    rng = np.random.default_rng(seed)
    label = f"random-static#{seed}"
    g, amplitude = _spd_metric(rng, n, amplitude, label)
    target = STATIC_TARGETS[int(rng.integers(len(STATIC_TARGETS)))]
    matter = _random_matter(rng, target)
    return FieldData(
        label=label,
        data_class="random-static",
        stationary=StationaryData(
            n=n, u=bounded_expr(rng, n, amplitude, 1.0), g=g, static=True
        ),
        matter=matter,
        electric_potential=bounded_expr(rng, n, amplitude),
        scalar=_scalar_field(rng, n, target, amplitude),
        test_scalar=bounded_expr(rng, n, 1.0),
        domain=Domain("cube", n),
        seed=seed,
    )


def exact_twist(seed: int, amplitude: float = AMPLITUDE) -> FieldData:
    """
    Flat g, u = (1 + c x¹)^½ and θ = A(x¹)(a dx³ − b dx²) with A′ = −u⁻³.

    Then ω = u³∗dθ = d(a x² + b x³) exactly.
    """
    rng = np.random.default_rng(seed)
    c = round(float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.2)), 6)
    a, b = (round(float(v), 6) for v in rng.uniform(-1.0, 1.0, 2))
    amp = f"{_fmt(2.0 / c)}*(1 + {_fmt(c)}*x1)^-0.5"
    theta = (
        parse_field_expr("0"),
        parse_field_expr(f"-{_fmt(b)}*{amp}"),
        parse_field_expr(f"{_fmt(a)}*{amp}"),
    )
    base = StationaryData.flat(3)
    matter = _random_matter(rng)
    return FieldData(
        label=f"exact-twist#{seed}",
        data_class="exact-twist",
        stationary=StationaryData(
            n=3, u=parse_field_expr(f"(1 + {_fmt(c)}*x1)^0.5"), g=base.g, theta=theta
        ),
        matter=matter,
        electric_potential=bounded_expr(rng, 3, amplitude),
        magnetic_potential=bounded_expr(rng, 3, amplitude),
        scalar=_scalar_field(rng, 3, matter.target, amplitude),
        twist_potential=parse_field_expr(f"{_fmt(a)}*x2 + {_fmt(b)}*x3"),
        test_scalar=bounded_expr(rng, 3, 1.0),
        domain=Domain("cube", 3),
        seed=seed,
    )


def random_coulomb(seed: int) -> FieldData:
    """Flat static g, radial u(r) and E = q u r⁻² dr on a shell."""
    rng = np.random.default_rng(seed)
    a, b = (round(float(v), 6) for v in rng.uniform(-0.15, 0.15, 2))
    k = round(float(rng.uniform(0.5, 3.0)), 6)
    q = round(float(rng.uniform(-1.0, 1.0)), 6)
    u = f"1 + {_fmt(a)}*r^2 + {_fmt(b)}*cos({_fmt(k)}*r)"
    electric = tuple(
        parse_field_expr(f"{_fmt(q)}*({u})*x{i + 1}*r^-3") for i in range(3)
    )
    return FieldData(
        label=f"coulomb#{seed}",
        data_class="coulomb",
        stationary=StationaryData.flat(3, parse_field_expr(u)),
        electric=electric,
        domain=Domain("shell", 3, r_min=0.3, r_max=1.0),
        seed=seed,
    )


def random_warped(rng: np.random.Generator, dim: Optional[int] = None) -> WarpedTarget:
    m = dim if dim is not None else 2 + int(rng.integers(3))
    c = tuple(round(float(v), 6) for v in rng.uniform(0.2, 2.0, m - 1))
    l = tuple(round(float(v), 6) for v in rng.uniform(0.5, 3.0, m - 1))
    return WarpedTarget(c=c, l=l)


def random_target(seed: int) -> FieldData:
    """A point of a random warped target and a phantom κ."""
    rng = np.random.default_rng(seed)
    warped = random_warped(rng)
    kappa = -round(float(rng.uniform(0.2, 2.0)), 6)
    return FieldData(
        label=f"target#{seed}",
        data_class="target",
        matter=MatterData(kappa=kappa),
        warped=warped,
        domain=Domain("upper", 4),
        seed=seed,
    )


def random_bochner(seed: int, amplitude: float = AMPLITUDE) -> FieldData:
    """Random stationary domain, random warped target and a map between them."""
    domain = random_stationary(seed, 3, amplitude)
    rng = np.random.default_rng([seed, 1])
    warped = random_warped(rng)
    comps = (bounded_expr(rng, 3, amplitude, 1.0),) + tuple(
        bounded_expr(rng, 3, 1.0) for _ in range(warped.dim - 1)
    )
    return FieldData(
        label=f"bochner#{seed}",
        data_class="bochner",
        stationary=domain.stationary,
        matter=domain.matter,
        electric_potential=domain.electric_potential,
        magnetic_potential=domain.magnetic_potential,
        scalar=domain.scalar,
        test_scalar=domain.test_scalar,
        warped=warped,
        map_components=comps,
        domain=domain.domain,
        seed=seed,
    )


def random_data(data_class: str, seed: int, dim: Optional[int] = None) -> FieldData:
    """
    Seeded data of one of the generated classes.

    Raises:
        CatalogError: For the catalog class or an unknown class
    """
    if data_class == "random":
        return random_stationary(seed, dim or 3)
    elif data_class == "random-forms":
        return random_stationary(seed, dim or 3, potentials=False)
    elif data_class == "random-static":
        return random_static(seed, dim)
    elif data_class == "exact-twist":
        return exact_twist(seed)
    elif data_class == "coulomb":
        return random_coulomb(seed)
    elif data_class == "target":
        return random_target(seed)
    elif data_class == "bochner":
        return random_bochner(seed)
    elif data_class == "none":
        return FieldData(label="none", data_class="none", seed=seed)
    raise CatalogError(f"No generator for data class '{data_class}'")


def validate_random(data: FieldData, points: int = SPD_SWEEP) -> None:
    """
    Check guards and the SPD floor of generated data.

    Raises:
        FieldExprGuardError: If a guard fails
        GeometryError: If g drops below the SPD floor
    """
    pts = data.domain.points(np.random.default_rng([data.seed, 7]), points)
    data.validate(pts)
    if data.stationary is not None:
        worst = min_eigenvalue(data.stationary.g, pts)
        if worst <= SPD_FLOOR:
            raise GeometryError(f"{data.label}: λ_min(g) = {worst:.3f}")
