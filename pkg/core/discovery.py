"""
Identity Discovery
==================

Two-step lookup over the registry, used by ``identity-verify list``.

Pattern:
1. search_identities(query) → one-line previews, no handler loaded
2. describe_identities(ids) → full descriptions, loading only the suites
   the ids belong to
"""

import logging
from dataclasses import dataclass
from typing import List

from core.identity_registry import IdentityRegistry

logger = logging.getLogger(__name__)


@dataclass
class IdentityPreview:
    """Minimal row preview."""

    id: str
    suite: str
    classification: str
    anchor: str


@dataclass
class IdentityDescription:
    """Full row description."""

    id: str
    suite: str
    classification: str
    anchor: str
    data: List[str]
    transport: bool
    implementation: str
    summary: str


async def search_identities(
    registry: IdentityRegistry, query: str, max_results: int = 10
) -> List[IdentityPreview]:
    """
    Step 1: previews of rows of enabled suites whose id, suite, class or
    anchor mention the query. No handler is loaded.

    Example:
        >>> previews = await search_identities(registry, "twist")
        >>> [p.id for p in previews]
        ['ID-2.2c', 'ID-2.2d', 'ID-2.21']
    """
    logger.debug(f"Searching identities with query: '{query}'")
    q = query.lower()
    previews = [
        IdentityPreview(
            id=entry.id,
            suite=entry.suite,
            classification=entry.classification,
            anchor=entry.anchor,
        )
        for entry in registry.entries.values()
        if registry.suites[entry.suite].enabled
        and (
            q in entry.id.lower()
            or q in entry.suite.lower()
            or q in entry.anchor.lower()
            or q in entry.classification
        )
    ][:max_results]
    logger.info(f"Step 1 complete: {len(previews)} identities found")
    return previews


async def describe_identities(
    registry: IdentityRegistry, identity_ids: List[str]
) -> List[IdentityDescription]:
    """Step 2: full descriptions; rows whose suite fails to load are dropped."""
    raw = await registry.describe_identities(identity_ids)
    described = []
    for d in raw:
        if "error" in d:
            logger.warning(f"Identity description error: {d['error']}")
            continue
        described.append(
            IdentityDescription(
                id=d["id"],
                suite=d["suite"],
                classification=d["class"],
                anchor=d["anchor"],
                data=d["data"],
                transport=d["transport"],
                implementation=d["implementation"],
                summary=d["summary"],
            )
        )
    logger.info(f"Step 2 complete: {len(described)} identities described")
    return described


def format_preview_for_display(preview: IdentityPreview) -> str:
    """
    Example:
        >>> print(format_preview_for_display(preview))
        ID-2.6 (reduction, unconditional) - Δ̂f = u²Δ̃f = Δf + ⟨dlog u, df⟩
    """
    return (
        f"{preview.id} ({preview.suite}, {preview.classification}) - {preview.anchor}"
    )


def format_description_for_display(desc: IdentityDescription) -> str:
    kind = "transport" if desc.transport else "direct"
    lines = [
        f"{desc.id} [{desc.suite}, {desc.classification}, {kind}]",
        f"  {desc.anchor}",
        f"  data: {', '.join(desc.data)}",
        f"  implemented by {desc.implementation}",
    ]
    if desc.summary:
        lines.append(f"  {desc.summary}")
    return "\n".join(lines)
