#!/usr/bin/env python3
"""
Identity Verify
===============

Command-line entry point for the identity verification engine.

Runs registry suites on seeded random and exact data, validates the solution
catalog, probes the curvature estimates on catalog families, and writes JSON
plus text reports.

Usage:
    identity-verify verify --ids ID-2.2a,ID-2.6 --seeds 10
    identity-verify selftest
    identity-verify catalog --validate
    identity-verify probe --csv probe.csv
    identity-verify list twist
    identity-verify fit-transport --suites field_equations

Exit codes:
    0 when every row passes, 1 on any failure, 2 on a config or usage error.

Configuration:
    Edit config/identities.yaml to enable or disable suites.
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from core.discovery import (
    describe_identities,
    format_description_for_display,
    format_preview_for_display,
    search_identities,
)
from core.errors import VerificationError
from core.identity_registry import IdentityRegistry
from core.probe import (
    DEFAULT_CENTER,
    DRIFT_LIMIT,
    SCALE_OFFSET,
    probe_drift,
    probe_many,
    scale_check,
)
from core.report import ProbeReport, create_error_response, create_success_response
from core.runner import IdentityRunner, fit_transports
from core.settings import RunConfig, build_run_config, load_environment
from core.solutions import SolutionCatalog, check_entry, normalize_entry

logger = logging.getLogger("identity_verify")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# ============================================================================
# Argument parsing
# ============================================================================


def _tolerance_pair(raw: str) -> tuple[str, float]:
    identity_id, sep, value = raw.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected ID=TOL, got '{raw}'")
    try:
        return identity_id, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance in '{raw}'") from None


def _run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ids", help="Comma-separated identity ids")
    parser.add_argument("--suites", help="Comma-separated suite names")
    parser.add_argument("--seeds", type=int, help="Seeds per identity")
    parser.add_argument("--points", type=int, help="Sample points per seed")
    parser.add_argument("--seed-offset", type=int, help="First seed")
    parser.add_argument("--order", type=int, help="Jet order (3-6)")
    parser.add_argument("--tolerance", type=float, help="Global tolerance override")
    parser.add_argument(
        "--tol",
        type=_tolerance_pair,
        action="append",
        default=[],
        metavar="ID=TOL",
        help="Per-identity tolerance (repeatable)",
    )
    parser.add_argument("--dims", help="Comma-separated spatial dimensions")
    parser.add_argument("--registry", help="Identity registry YAML")
    parser.add_argument("--transport", help="Transport coefficient YAML")
    parser.add_argument("--fail-fast", action="store_true", default=None)


def _common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run configuration file")
    parser.add_argument("--catalog", help="Solution catalog JSON")
    parser.add_argument("--report", help="JSON report path")
    parser.add_argument("--summary", help="Text summary path")
    parser.add_argument("--workers", type=int, help="Worker pool size")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("-q", "--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="identity-verify",
        description="Pointwise verification of stationary field-equation identities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Run registry identities")
    _run_options(verify)
    _common_options(verify)

    selftest = sub.add_parser("selftest", help="Run the jet and tensor self-checks")
    _run_options(selftest)
    _common_options(selftest)

    catalog = sub.add_parser("catalog", help="Check the solution catalog")
    catalog.add_argument("--validate", action="store_true", help="Run oracles")
    catalog.add_argument(
        "--regenerate", action="store_true", help="Refit normalizations and save"
    )
    catalog.add_argument("--points", type=int, help="Oracle points per entry")
    catalog.add_argument("--order", type=int, help="Jet order (3-6)")
    _common_options(catalog)

    probe = sub.add_parser("probe", help="Probe curvature estimates on the catalog")
    probe.add_argument("--entries", help="Comma-separated catalog entries")
    probe.add_argument("--csv", help="CSV output for per-ball rows")
    probe.add_argument(
        "--no-drift", action="store_true", help="Skip the density-doubling rerun"
    )
    _common_options(probe)

    listing = sub.add_parser("list", help="Search and describe registry rows")
    listing.add_argument("query", nargs="?", default="", help="Search text")
    listing.add_argument(
        "--describe", action="store_true", help="Full descriptions of the matches"
    )
    listing.add_argument("--max-results", type=int, default=10)
    listing.add_argument("--registry", help="Identity registry YAML")
    listing.add_argument("--transport", help="Transport coefficient YAML")
    listing.add_argument("-v", "--verbose", action="store_true")
    listing.add_argument("-q", "--quiet", action="store_true")

    fit = sub.add_parser("fit-transport", help="Refit transport coefficients")
    _run_options(fit)
    _common_options(fit)
    return parser


def _split(raw: Optional[str]) -> Optional[list[str]]:
    return [v.strip() for v in raw.split(",") if v.strip()] if raw else None


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Layer the parsed flags over the config file and environment.

    Raises:
        ConfigError: On an invalid value
        FileNotFoundError: If the config file is missing
    """

    def get(name: str) -> Any:
        return getattr(args, name, None)

    flags: dict[str, Any] = {
        "command": args.command,
        "ids": _split(get("ids")),
        "suites": _split(get("suites")),
        "seeds": get("seeds"),
        "points": get("points"),
        "seed_offset": get("seed_offset"),
        "order": get("order"),
        "tolerance": get("tolerance"),
        "tolerance_overrides": dict(get("tol") or []) or None,
        "dims": _split(get("dims")),
        "registry": get("registry"),
        "transport": get("transport"),
        "catalog": get("catalog"),
        "report": get("report"),
        "summary": get("summary"),
        "csv": get("csv"),
        "fail_fast": get("fail_fast"),
        "max_workers": get("workers"),
    }
    return build_run_config(flags, get("config"))


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


# ============================================================================
# Commands
# ============================================================================


def _registry(config: RunConfig) -> IdentityRegistry:
    return IdentityRegistry(config.registry, config.transport)


async def cmd_verify(config: RunConfig, selftest: bool = False) -> int:
    registry = _registry(config)
    runner = IdentityRunner(registry, config)
    try:
        entries = registry.select(config.ids, config.suites, selftest=selftest)
        await runner.pin_signs(entries)
        logger.info(
            f"Running {len(entries)} identities: {config.seeds} seeds × "
            f"{config.points} points, jet order {config.order}"
        )
        report = await runner.run(entries)
    except Exception:
        if runner.partial is not None:
            runner.partial.write(config.report, config.summary)
            logger.warning("Run aborted; partial report flushed")
        raise
    finally:
        await registry.cleanup()
    report.write(config.report, config.summary)
    sys.stdout.write(report.render_text())
    return EXIT_PASS if report.passed else EXIT_FAIL


async def cmd_catalog(
    config: RunConfig, validate: bool, regenerate: bool, points: int
) -> int:
    catalog = SolutionCatalog(config.catalog)
    if regenerate:
        for entry in catalog:
            if not entry.normalize:
                continue
            found = await asyncio.to_thread(normalize_entry, entry)
            catalog.with_params(entry.name, found)
        path = catalog.save()
        logger.info(f"Catalog saved to {path}")

    if not validate:
        if not regenerate:
            listing = [
                {"name": e.name, "n": e.n, "mode": e.mode, "probe": e.probe}
                for e in catalog
            ]
            print(json.dumps(create_success_response(listing), indent=2))
        return EXIT_PASS
    semaphore = asyncio.Semaphore(config.max_workers)

    async def one(entry):
        async with semaphore:
            return await asyncio.to_thread(
                check_entry, entry, points, 0, config.order
            )

    results = await asyncio.gather(*(one(e) for e in catalog))
    payload = {
        r.name: {"passed": r.passed, "points": r.points, "residuals": r.residuals}
        for r in results
    }
    text = json.dumps(create_success_response(payload), indent=2, ensure_ascii=False)
    if config.report is not None:
        Path(config.report).write_text(text + "\n")
    print(text)
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning(f"Catalog oracles failed for {failed}")
    return EXIT_FAIL if failed else EXIT_PASS


async def cmd_probe(
    config: RunConfig, names: Optional[Sequence[str]], drift: bool
) -> int:
    catalog = SolutionCatalog(config.catalog)
    entries = [catalog.get(n) for n in names] if names else catalog.probe_entries()
    datasets = [e.field_data() for e in entries]
    results = await probe_many(datasets, max_workers=config.max_workers)
    report = ProbeReport(results)

    base_radius = DEFAULT_CENTER + SCALE_OFFSET
    for data in datasets:
        try:
            report.scale_checks[data.label] = await asyncio.to_thread(
                scale_check, data, base_radius
            )
        except VerificationError as e:
            logger.warning(f"Scale check skipped for {data.label}: {e}")

    if drift:
        report.drift = await probe_drift(
            datasets, results, max_workers=config.max_workers
        )

    if config.report is not None:
        Path(config.report).write_text(report.to_json())
    if config.summary is not None:
        Path(config.summary).write_text(report.render_text())
    if config.csv is not None:
        report.write_csv(config.csv)
    sys.stdout.write(report.render_text())
    ok = all(r.harnack_ok for r in results)
    drifted = sorted(n for n, v in report.drift.items() if v >= DRIFT_LIMIT)
    if drifted:
        logger.warning(f"Probe constants drift by ≥ {DRIFT_LIMIT:.0%}: {drifted}")
    return EXIT_PASS if ok and not drifted else EXIT_FAIL


async def cmd_list(config: RunConfig, query: str, describe: bool, limit: int) -> int:
    registry = _registry(config)
    try:
        if not query:
            for suite in registry.get_all_suites():
                state = "enabled" if suite["enabled"] else "disabled"
                print(f"{suite['name']} ({state}): {suite['description']}")
                for identity_id in suite["identities"]:
                    print(f"  {identity_id}")
            return EXIT_PASS
        previews = await search_identities(registry, query, limit)
        if describe:
            described = await describe_identities(registry, [p.id for p in previews])
            for d in described:
                print(format_description_for_display(d))
        else:
            for p in previews:
                print(format_preview_for_display(p))
        if not previews:
            print(f"No identities match '{query}'")
    finally:
        await registry.cleanup()
    return EXIT_PASS


async def cmd_fit_transport(config: RunConfig) -> int:
    registry = _registry(config)
    try:
        outcomes = await fit_transports(registry, config)
    finally:
        await registry.cleanup()
    payload = [
        {
            "id": o.identity_id,
            "n": o.n,
            "reading": o.reading,
            "coefficients": o.fit.coefficients,
            "frozen": o.frozen,
            "misfit": o.fit.residual,
            "rank": o.fit.rank,
            "samples": o.fit.samples,
            "matches": o.matches,
        }
        for o in outcomes
    ]
    text = json.dumps(create_success_response(payload), indent=2, ensure_ascii=False)
    if config.report is not None:
        Path(config.report).write_text(text + "\n")
    print(text)
    drifted = [f"{o.identity_id} (n = {o.n})" for o in outcomes if not o.matches]
    if drifted:
        logger.warning(f"Refitted coefficients differ from the table: {drifted}")
    return EXIT_FAIL if drifted else EXIT_PASS


async def dispatch(args: argparse.Namespace, config: RunConfig) -> int:
    if args.command == "verify":
        return await cmd_verify(config)
    elif args.command == "selftest":
        return await cmd_verify(config, selftest=True)
    elif args.command == "catalog":
        return await cmd_catalog(
            config, args.validate, args.regenerate, config.points
        )
    elif args.command == "probe":
        return await cmd_probe(config, _split(args.entries), not args.no_drift)
    elif args.command == "list":
        return await cmd_list(config, args.query, args.describe, args.max_results)
    elif args.command == "fit-transport":
        return await cmd_fit_transport(config)
    raise ValueError(f"Unknown command: {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args)
    load_environment()

    try:
        config = config_from_args(args)
    except (VerificationError, FileNotFoundError) as e:
        logger.error(f"Configuration error: {e}")
        print(json.dumps(create_error_response(e)), file=sys.stderr)
        return EXIT_USAGE

    try:
        return asyncio.run(dispatch(args, config))
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_FAIL
    except (VerificationError, FileNotFoundError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(json.dumps(create_error_response(e)), file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as e:
        logger.error(f"Run failed: {e}", exc_info=True)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
