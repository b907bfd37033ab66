"""
Reports
=======

Machine-readable (JSON) and human-readable (text) run reports.

The JSON document is deterministic for a given configuration and seed set:
rows are ordered by registry position, floats are written with ``repr``
precision, and the only wall-clock value sits in the ``meta`` stanza so
comparisons can drop it.
"""

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from core import __version__
from core.probe import ProbeResult, ScaleCheck

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CONVENTIONS = {
    "riemann": "R^r_smn = ∂_mΓ^r_ns − ∂_nΓ^r_ms + Γ^r_mlΓ^l_ns − Γ^r_nlΓ^l_ms; "
    "Ric_sn = R^r_srn",
    "anchors": "unit sphere scalar curvature +2; warped target "
    "R_1a1a = −¼ c_a l_a² y₁^(−l_a−2)",
    "laplacian": "Δf = g^ij ∇_i∇_j f (negative spectrum)",
    "forms": "ω = (1/k!) ω_I dx^I; |ω|² = (1/k!) ω_I ω^I",
    "hodge": "(∗ω)_J = (1/k!) √|g| ε_IJ ω^I, ε = +1 on the orientation",
    "orientation": "spatial (x¹..xⁿ); spacetime (x¹..xⁿ, t)",
    "twist_curl_sign": "(∗dω)_j = −2u R̄ic(X, e_j)",
    "maxwell": "F = (dt + θ)∧E − u⁻¹∗B",
    "dual_field": "∗F = u⁻¹∗E − B∧(dt + θ), B = i_X∗F",
    "stress": "T = κF·F + κ′φ*g_W + (2Λ + κ′V − ½κ|F|²)ḡ/(n − 1)",
    "rm_norm": "lowered Riemann of ḡ contracted four times with ĝ⁻¹",
}


def create_error_response(error: Exception) -> dict:
    """
    Uniform error payload.

    Example:
        >>> create_error_response(ConfigError("seeds must be ≥ 1"))
        {'success': False, 'error': 'ConfigError', 'message': 'seeds must be ≥ 1'}
    """
    return {
        "success": False,
        "error": error.__class__.__name__,
        "message": str(error),
    }


def create_success_response(data: Any) -> dict:
    """Uniform success payload."""
    return {
        "success": True,
        "data": data,
    }


@dataclass
class ResidualRecord:
    """
    Aggregated outcome of one identity row.

    Attributes:
        id: Registry id
        suite: Suite the row belongs to
        classification: unconditional, transport, conditional, inequality
            or property
        anchor: Short statement of the identity
        tolerance: Pass threshold on the normalized residual
        seeds_run: Seeds that produced at least one evaluated sample
        samples: Evaluated samples
        skipped: Samples whose data class does not fit the row
        max_residual: Worst normalized residual of the reading that decides
        min_slack: Smallest lhs − rhs over inequality comparisons
        readings: Worst residual per reading
        closing_reading: Reading that closes, or None
        worst_seed: Seed of the worst sample
        worst_point: Chart point of the worst sample
        worst_label: Comparison label of the worst sample
        errors: Error messages of samples that raised
    """

    id: str
    suite: str
    classification: str
    anchor: str
    tolerance: float
    seeds_run: int = 0
    samples: int = 0
    skipped: int = 0
    max_residual: float = 0.0
    min_slack: Optional[float] = None
    readings: dict[str, float] = field(default_factory=dict)
    closing_reading: Optional[str] = None
    worst_seed: Optional[int] = None
    worst_point: Optional[list[float]] = None
    worst_label: str = ""
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.errors or self.samples == 0:
            return False
        return self.max_residual < self.tolerance

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass(frozen=True)
class SignRecord:
    """A sign or reading the run decided from the data."""

    item: str
    reading: str
    residuals: dict[str, float]


@dataclass
class VerificationReport:
    """
    Rows, environment and verdict of one verification run.

    The overall verdict passes iff every row passes. A partial report holds
    the samples finished before a run aborted and never passes.
    ``conventions`` overrides entries of the pinned conventions table with
    what the run decided.
    """

    command: str
    rows: list[ResidualRecord] = field(default_factory=list)
    environment: dict[str, Any] = field(default_factory=dict)
    signs: list[SignRecord] = field(default_factory=list)
    conventions: dict[str, str] = field(default_factory=dict)
    partial: bool = False
    generated_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    @property
    def passed(self) -> bool:
        return not self.partial and all(r.passed for r in self.rows)

    @property
    def failures(self) -> list[ResidualRecord]:
        return [r for r in self.rows if not r.passed]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "environment": {"version": __version__, **self.environment},
            "conventions": {**CONVENTIONS, **self.conventions},
            "verdict": "pass" if self.passed else "fail",
            "partial": self.partial,
            "rows": [r.to_dict() for r in self.rows],
            "signs": [asdict(s) for s in self.signs],
            "meta": {"generated_at": self.generated_at},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def render_text(self) -> str:
        lines = [
            f"{'id':<16} {'class':<13} {'samples':>7} {'skipped':>7} "
            f"{'max residual':>12} {'tol':>8}  result",
            "-" * 78,
        ]
        for r in self.rows:
            result = "PASS" if r.passed else "FAIL"
            lines.append(
                f"{r.id:<16} {r.classification:<13} {r.samples:>7} {r.skipped:>7} "
                f"{r.max_residual:>12.3e} {r.tolerance:>8.0e}  {result}"
            )
            if r.closing_reading and len(r.readings) > 1:
                lines.append(f"    reading that closes: {r.closing_reading}")
            if not r.passed:
                lines.extend(_diagnostics(r))
        for s in self.signs:
            lines.append(f"{s.item}: {s.reading}")
        verdict = "PASS" if self.passed else "FAIL"
        if self.partial:
            verdict = "FAIL (partial: run aborted)"
        lines.append("-" * 78)
        lines.append(
            f"{len(self.rows)} identities, {len(self.failures)} failed: {verdict}"
        )
        return "\n".join(lines) + "\n"

    def write(
        self,
        json_path: Optional[Union[str, Path]] = None,
        text_path: Optional[Union[str, Path]] = None,
    ) -> None:
        if json_path is not None:
            Path(json_path).write_text(self.to_json())
            logger.info(f"Report written to {json_path}")
        if text_path is not None:
            Path(text_path).write_text(self.render_text())


def _diagnostics(r: ResidualRecord) -> list[str]:
    out = []
    if r.samples == 0:
        out.append("    no sample of a fitting data class was evaluated")
    if r.worst_seed is not None:
        point = ", ".join(f"{x:.6g}" for x in r.worst_point or [])
        out.append(f"    worst: seed {r.worst_seed} at ({point}) [{r.worst_label}]")
    for name, value in sorted(r.readings.items()):
        out.append(f"    reading {name}: {value:.3e}")
    out.extend(f"    error: {e}" for e in r.errors[:3])
    return out


@dataclass
class ProbeReport:
    """Probe results, scale checks and sampling-density drift."""

    results: list[ProbeResult] = field(default_factory=list)
    scale_checks: dict[str, ScaleCheck] = field(default_factory=dict)
    drift: dict[str, float] = field(default_factory=dict)
    generated_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "probe",
            "environment": {"version": __version__},
            "conventions": CONVENTIONS,
            "entries": [r.to_dict() for r in self.results],
            "scale_checks": {
                name: {**asdict(c), "relative_change": c.relative_change}
                for name, c in sorted(self.scale_checks.items())
            },
            "drift": dict(sorted(self.drift.items())),
            "meta": {"generated_at": self.generated_at},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def csv_rows(self) -> list[dict]:
        return [row for r in self.results for row in r.csv_rows()]

    def write_csv(self, path: Union[str, Path]) -> None:
        rows = self.csv_rows()
        if not rows:
            return
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)

    def render_text(self) -> str:
        lines = [
            f"{'entry':<24} {'n':>2} {'sup|Rm|a²':>11} {'sup f':>11} "
            f"{'sup thm':>11} {'Harnack':>8}",
            "-" * 72,
        ]
        for r in self.results:
            c = r.constants
            lines.append(
                f"{r.name:<24} {r.n:>2} {c['sup_rm_a2']:>11.4e} {c['sup_f']:>11.4e} "
                f"{c['sup_thm3']:>11.4e} {'ok' if r.harnack_ok else 'VIOLATED':>8}"
            )
        for name, check in sorted(self.scale_checks.items()):
            lines.append(f"scale {name}: relative change {check.relative_change:.2e}")
        for name, value in sorted(self.drift.items()):
            lines.append(f"drift {name}: {value:.2%}")
        return "\n".join(lines) + "\n"


def summarize(records: Sequence[ResidualRecord]) -> dict[str, int]:
    """Pass/fail counts per classification."""
    out: dict[str, int] = {}
    for r in records:
        key = f"{r.classification}.{'pass' if r.passed else 'fail'}"
        out[key] = out.get(key, 0) + 1
    return out
