"""
Identity Runner
===============

Plans samples for the selected identity rows, evaluates them on a worker
pool and aggregates the outcome into a :class:`VerificationReport`.

Plan:
    Every row is run on ``seeds`` seeds. Seed k picks the data class
    ``data[k mod len(data)]`` (and, for dimension-general rows, a spatial
    dimension), generates the field data once, and draws ``points`` chart
    points from its domain. Rows that share data and point share one
    :class:`Sample`, so jets are built once per point.

A sample whose data do not fit a row (``DataClassError``) is counted as
skipped; any other exception becomes a failed sample with the error text.
Results are aggregated in plan order, so reports do not depend on thread
scheduling.
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from core.check_loader import CheckHandler, RowTableHandler
from core.errors import (
    ConfigError,
    DataClassError,
    GeometryError,
    VerificationError,
)
from core.evaluation import DEFAULT_READING
from core.fieldeq import Transport, TransportFit, fit_transport
from core.identity_registry import IdentityEntry, IdentityRegistry
from core.report import ResidualRecord, SignRecord, VerificationReport
from core.sample import FieldData, Sample
from core.settings import RunConfig
from core.solutions import SolutionCatalog, random_data

logger = logging.getLogger(__name__)

DIMENSIONAL_CLASSES = ("random", "random-forms", "random-static")

TWIST_CURL_ID = "ID-2.2d"
SIGN_SEEDS = (0, 1, 2)


@dataclass
class SampleTask:
    """One chart point of one data set, and the rows evaluated there."""

    key: tuple
    seed: int
    index: int
    data: Optional[FieldData]
    point: tuple[float, ...]
    entries: list[IdentityEntry] = field(default_factory=list)
    error: Optional[str] = None


@dataclass
class Outcome:
    """Result of one row at one sample."""

    status: str  # "ok", "skipped" or "error"
    residuals: dict[str, float] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)
    slack: dict[str, float] = field(default_factory=dict)
    message: str = ""


class SamplePlanner:
    """Deterministic (data, point) plan for a set of rows."""

    def __init__(self, config: RunConfig, catalog: Optional[SolutionCatalog] = None):
        self.config = config
        self._catalog = catalog
        self._data: dict[tuple, FieldData | Exception] = {}
        self._points: dict[tuple, np.ndarray] = {}

    @property
    def catalog(self) -> SolutionCatalog:
        if self._catalog is None:
            self._catalog = SolutionCatalog(self.config.catalog)
        return self._catalog

    def _dims(self, entry: IdentityEntry, data_class: str) -> tuple[Optional[int], ...]:
        if data_class not in DIMENSIONAL_CLASSES:
            return (None,)
        if entry.dims is None:
            return (None,)
        chosen = tuple(d for d in entry.dims if d in self.config.dims)
        return chosen or entry.dims[:1]

    def data_key(self, entry: IdentityEntry, seed: int) -> tuple:
        data_class = entry.data[seed % len(entry.data)]
        if data_class == "catalog":
            names = entry.catalog or tuple(self.catalog.names)
            return ("catalog", names[seed % len(names)], seed)
        dims = self._dims(entry, data_class)
        dim = dims[(seed // len(entry.data)) % len(dims)]
        return (data_class, dim, seed)

    def data(self, key: tuple) -> FieldData | Exception:
        if key not in self._data:
            try:
                if key[0] == "catalog":
                    cached = ("catalog", key[1])
                    if cached not in self._data:
                        self._data[cached] = self.catalog.get(key[1]).field_data()
                    self._data[key] = self._data[cached]
                else:
                    data_class, dim, seed = key
                    self._data[key] = random_data(data_class, seed, dim)
            except VerificationError as e:
                logger.error(f"Data generation failed for {key}: {e}")
                self._data[key] = e
        return self._data[key]

    def points(self, key: tuple, data: FieldData) -> np.ndarray:
        if key not in self._points:
            rng = np.random.default_rng([abs(key[-1]), 3])
            self._points[key] = data.domain.points(rng, self.config.points)
        return self._points[key]

    def plan(self, entries: Sequence[IdentityEntry]) -> list[SampleTask]:
        tasks: dict[tuple, SampleTask] = {}
        first = self.config.seed_offset
        for entry in entries:
            for seed in range(first, first + self.config.seeds):
                key = self.data_key(entry, seed)
                data = self.data(key)
                if isinstance(data, Exception):
                    task = tasks.setdefault(
                        (key, -1), SampleTask(key, seed, -1, None, (), error=str(data))
                    )
                    task.entries.append(entry)
                    continue
                for i, point in enumerate(self.points(key, data)):
                    index = seed * self.config.points + i
                    task = tasks.setdefault(
                        (key, i),
                        SampleTask(key, seed, index, data, tuple(map(float, point))),
                    )
                    task.entries.append(entry)
        logger.info(
            f"Planned {len(tasks)} samples for {len(entries)} identities "
            f"({self.config.seeds} seeds × {self.config.points} points)"
        )
        return list(tasks.values())


def evaluate_task(
    task: SampleTask,
    handlers: dict[str, CheckHandler],
    order: int,
    pinned: Optional[dict[str, str]] = None,
) -> list[Outcome]:
    """
    Evaluate every row of a task at its sample.

    Rows listed in ``pinned`` are scored on their pinned reading only.
    """
    pinned = pinned or {}
    if task.data is None:
        return [Outcome("error", message=task.error or "") for _ in task.entries]
    s = task.data.sample(task.point, order, task.index)
    out = []
    for entry in task.entries:
        try:
            ev = handlers[entry.suite].evaluate(entry.id, s)
        except DataClassError as e:
            out.append(Outcome("skipped", message=str(e)))
            continue
        except Exception as e:
            logger.debug(f"{entry.id} raised at {s}: {e}")
            out.append(Outcome("error", message=f"{type(e).__name__}: {e}"))
            continue
        names = [pinned[entry.id]] if entry.id in pinned else list(ev.readings)
        residuals = {}
        for name in names:
            r = ev.residual(name)
            residuals[name] = r if math.isfinite(r) else math.inf
        out.append(
            Outcome(
                "ok",
                residuals=residuals,
                labels={name: ev.worst(name) for name in names},
                slack={name: ev.slack(name) for name in names},
            )
        )
    return out


def sign_samples(order: int, points: int = 2) -> list[Sample]:
    """Fixed random stationary samples the twist-curl sign is decided on."""
    samples = []
    for seed in SIGN_SEEDS:
        data = random_data("random", seed, 3)
        rng = np.random.default_rng([seed, 5])
        for i, p in enumerate(data.domain.points(rng, points)):
            samples.append(data.sample(tuple(map(float, p)), order, i))
    return samples


class _Accumulator:
    def __init__(self, entry: IdentityEntry, tolerance: float):
        self.record = ResidualRecord(
            id=entry.id,
            suite=entry.suite,
            classification=entry.classification,
            anchor=entry.anchor,
            tolerance=tolerance,
        )
        self.seeds: set[int] = set()
        self.worst: dict[str, tuple[float, int, tuple, str]] = {}
        self.slack: dict[str, float] = {}

    def add(self, task: SampleTask, outcome: Outcome) -> None:
        r = self.record
        if outcome.status == "skipped":
            r.skipped += 1
            return
        if outcome.status == "error":
            r.errors.append(outcome.message)
            return
        r.samples += 1
        self.seeds.add(task.seed)
        for name, value in outcome.residuals.items():
            if name not in self.worst or value > self.worst[name][0]:
                label = outcome.labels.get(name, "")
                self.worst[name] = (value, task.seed, task.point, label)
            self.slack[name] = min(self.slack.get(name, math.inf), outcome.slack[name])

    def finish(self) -> ResidualRecord:
        r = self.record
        r.seeds_run = len(self.seeds)
        if not self.worst:
            return r
        r.readings = {name: w[0] for name, w in sorted(self.worst.items())}
        if len(self.worst) == 1:
            decided = next(iter(self.worst))
        else:
            decided = min(self.worst, key=lambda name: (self.worst[name][0], name))
        value, seed, point, label = self.worst[decided]
        if value < r.tolerance:
            r.closing_reading = decided
        r.max_residual = value
        r.worst_seed, r.worst_point, r.worst_label = seed, list(point), label
        if r.classification == "inequality":
            r.min_slack = self.slack.get(decided)
        return r


class IdentityRunner:
    """
    Runs registry rows and builds the report.

    Example:
        >>> runner = IdentityRunner(registry, RunConfig(ids=("ID-2.6",)))
        >>> report = await runner.run()
        >>> report.passed
        True
    """

    def __init__(
        self,
        registry: IdentityRegistry,
        config: RunConfig,
        catalog: Optional[SolutionCatalog] = None,
    ):
        self.registry = registry
        self.config = config
        self.planner = SamplePlanner(config, catalog)
        self.pinned: dict[str, str] = {}
        self.signs: list[SignRecord] = []
        self.conventions: dict[str, str] = {}
        self.partial: Optional[VerificationReport] = None

    async def _handlers(self, entries: Sequence[IdentityEntry]) -> dict:
        handlers = {}
        for entry in entries:
            if entry.suite not in handlers:
                handlers[entry.suite] = await self.registry.handler_for(entry.id)
        return handlers

    async def pin_signs(self, entries: Sequence[IdentityEntry]) -> dict[str, str]:
        """
        Decide the twist-curl sign once, before any row runs.

        The sign is resolved on fixed seeded data, independent of the run's
        seeds, and every sample of the row is then scored on that reading
        alone.

        Raises:
            RuntimeError: If the sign cannot be decided
        """
        if TWIST_CURL_ID in self.pinned or TWIST_CURL_ID not in {e.id for e in entries}:
            return self.pinned
        handler = await self.registry.handler_for(TWIST_CURL_ID)
        samples = await asyncio.to_thread(sign_samples, self.config.order)
        try:
            resolution = await asyncio.to_thread(handler.resolve_twist_sign, samples)
        except GeometryError as e:
            raise RuntimeError(f"Twist-curl sign could not be pinned: {e}") from e
        self.pinned[TWIST_CURL_ID] = resolution.reading
        self.signs.append(
            SignRecord(
                item=TWIST_CURL_ID,
                reading=resolution.reading,
                residuals=dict(resolution.residuals),
            )
        )
        glyph = "−" if resolution.sign < 0 else "+"
        self.conventions["twist_curl_sign"] = (
            f"(∗dω)_j = {glyph}2u R̄ic(X, e_j), pinned as {resolution.reading}"
        )
        return self.pinned

    async def run(
        self, entries: Optional[Sequence[IdentityEntry]] = None
    ) -> VerificationReport:
        """
        Evaluate the rows and aggregate them.

        If a task raises, the samples finished so far are kept in
        ``self.partial`` before the error propagates.

        Raises:
            RuntimeError: If a suite handler fails to load
        """
        if entries is None:
            entries = self.registry.select(self.config.ids, self.config.suites)
        tasks = self.planner.plan(entries)
        results: list[Optional[list[Outcome]]] = [None] * len(tasks)
        semaphore = asyncio.Semaphore(self.config.max_workers)
        cancelled = asyncio.Event()
        order = self.config.order

        async def one(i: int, task: SampleTask) -> None:
            async with semaphore:
                if cancelled.is_set():
                    return
                outcomes = await asyncio.to_thread(
                    evaluate_task, task, handlers, order, self.pinned
                )
                results[i] = outcomes
                if self.config.fail_fast and self._any_failed(task, outcomes):
                    logger.warning(f"Fail-fast: stopping after a failure at {task.key}")
                    cancelled.set()

        try:
            handlers = await self._handlers(entries)
            await asyncio.gather(*(one(i, t) for i, t in enumerate(tasks)))
        except Exception as e:
            cancelled.set()
            done = sum(r is not None for r in results)
            logger.error(f"Run aborted after {done} of {len(tasks)} samples: {e}")
            self.partial = self._aggregate(entries, tasks, results, partial=True)
            raise
        return self._aggregate(entries, tasks, results)

    def _aggregate(
        self,
        entries: Sequence[IdentityEntry],
        tasks: Sequence[SampleTask],
        results: Sequence[Optional[list[Outcome]]],
        partial: bool = False,
    ) -> VerificationReport:
        accumulators = {
            e.id: _Accumulator(e, self.config.tolerance_for(e.id, e.default_tolerance))
            for e in entries
        }
        for task, outcomes in zip(tasks, results):
            if outcomes is None:
                continue
            for entry, outcome in zip(task.entries, outcomes):
                accumulators[entry.id].add(task, outcome)

        report = VerificationReport(
            command=self.config.command,
            environment=self.config.environment(),
            signs=list(self.signs),
            conventions=dict(self.conventions),
            partial=partial,
        )
        for entry in entries:
            record = accumulators[entry.id].finish()
            report.rows.append(record)
            if len(record.readings) > 1:
                report.signs.append(
                    SignRecord(
                        item=record.id,
                        reading=record.closing_reading or "undecided",
                        residuals=dict(record.readings),
                    )
                )
            if not record.passed and not partial:
                logger.warning(
                    f"{record.id} failed: residual {record.max_residual:.3e} "
                    f"over {record.samples} samples"
                )
        logger.info(
            f"Verdict: {'pass' if report.passed else 'fail'} "
            f"({len(report.failures)} of {len(report.rows)} identities failed)"
        )
        return report
    def _any_failed(self, task: SampleTask, outcomes: list[Outcome]) -> bool:
        for entry, outcome in zip(task.entries, outcomes):
            if outcome.status == "error":
                return True
            if outcome.status == "ok":
                tol = self.config.tolerance_for(entry.id, entry.default_tolerance)
                if min(outcome.residuals.values(), default=0.0) >= tol:
                    return True
        return False


# -- transport fitting -----------------------------------------------------------------


@dataclass
class FitOutcome:
    """Refitted coefficients of one transport row at one dimension."""

    identity_id: str
    n: int
    reading: str
    fit: TransportFit
    frozen: dict[str, float]

    @property
    def matches(self) -> bool:
        names = set(self.fit.coefficients) | set(self.frozen)
        return all(
            abs(self.fit.coefficients.get(k, 0.0) - self.frozen.get(k, 0.0)) < 1e-8
            for k in names
        )


async def fit_transports(
    registry: IdentityRegistry,
    config: RunConfig,
    catalog: Optional[SolutionCatalog] = None,
) -> list[FitOutcome]:
    """
    Refit the coefficients of every selected transport row.

    Each reading is fitted separately; the reading with the smallest misfit
    is reported.
    """
    entries = [
        e
        for e in registry.select(config.ids, config.suites)
        if e.classification == "transport"
    ]
    planner = SamplePlanner(config, catalog)
    tasks = planner.plan(entries)
    out = []
    for entry in entries:
        handler = await registry.handler_for(entry.id)
        if not isinstance(handler, RowTableHandler):
            continue
        by_n: dict[int, list[Transport]] = {}
        for task in tasks:
            if task.data is None or entry not in task.entries:
                continue
            s = Sample(task.data, task.point, config.order, task.index)
            try:
                t = await asyncio.to_thread(handler.transport, entry.id, s)
            except DataClassError:
                continue
            by_n.setdefault(s.n, []).append(t)
        for n, transports in sorted(by_n.items()):
            readings = list(dict.fromkeys(r for t in transports for r in t.rho))
            fits = {r: fit_transport(transports, r) for r in readings}
            best = min(fits, key=lambda r: (fits[r].residual, r != DEFAULT_READING, r))
            try:
                frozen = handler.table.coefficients(entry.id, n)
            except ConfigError:
                frozen = {}
            out.append(FitOutcome(entry.id, n, best, fits[best], frozen))
            fitted = fits[best].coefficients
            logger.info(f"Fitted {entry.id} (n = {n}, {best}): {fitted}")
    return out
