"""Deterministic tiered cleaning of raw model output into label sets.

Tier 1: the whole output (modulo surrounding whitespace) is one integer.
Tier 2: the whole output is a semicolon-separated integer list.
Tier 3: integers embedded in prose, taken as maximal digit runs.

A tier wins only if it yields at least one in-range integer; otherwise the
next tier is tried. Out-of-range integers are skipped without disqualifying
in-range ones found in the same tier. If no tier yields anything usable, the
scheme's fallback label is assigned and the row is flagged.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import SINGLE_LABEL, TaskScheme

logger = logging.getLogger(__name__)

_T1_RE = re.compile(r"\d+")
_T2_RE = re.compile(r"\d+(?:\s*;\s*\d+)+")
_DIGIT_RUN_RE = re.compile(r"\d+")


@dataclass(frozen=True)
class CleaningResult:
    labels: frozenset[int]
    fallback: bool
    tier: str  # "T1" | "T2" | "T3" | "none"
    ambiguous: bool  # single-label output offered more than one distinct in-range integer


def _tier_candidates(raw: str) -> list[tuple[str, list[int]]]:
    stripped = raw.strip()
    tiers: list[tuple[str, list[int]]] = []
    if _T1_RE.fullmatch(stripped):
        tiers.append(("T1", [int(stripped)]))
    if _T2_RE.fullmatch(stripped):
        tiers.append(("T2", [int(tok) for tok in re.split(r"\s*;\s*", stripped)]))
    tiers.append(("T3", [int(run) for run in _DIGIT_RUN_RE.findall(raw)]))
    return tiers


def clean(raw: str, scheme: TaskScheme) -> CleaningResult:
    """Map one raw model output to a label set under the given scheme."""
    for tier, values in _tier_candidates(raw):
        in_range = [v for v in values if scheme.is_valid_label(v)]
        if not in_range:
            continue
        distinct = sorted(set(in_range))
        if scheme.kind == SINGLE_LABEL:
            # first in-range occurrence wins; extra distinct values get flagged
            return CleaningResult(
                labels=frozenset({in_range[0]}),
                fallback=False,
                tier=tier,
                ambiguous=len(distinct) > 1,
            )
        return CleaningResult(
            labels=frozenset(distinct), fallback=False, tier=tier, ambiguous=False
        )
    return CleaningResult(
        labels=frozenset({scheme.fallback_label}), fallback=True, tier="none", ambiguous=False
    )


def cleaned_row(custom_id: str, result: CleaningResult) -> dict:
    return {
        "custom_id": custom_id,
        "labels": sorted(result.labels),
        "fallback": result.fallback,
        "tier": result.tier,
    }


def clean_rows(raw_rows: Iterable[Mapping], scheme: TaskScheme) -> list[dict]:
    """Clean raw result rows ({"custom_id", "message"}) into persisted form."""
    out = []
    for row in raw_rows:
        result = clean(row["message"], scheme)
        if result.ambiguous:
            logger.warning(
                "multi-integer output for %s; kept first in-range value", row["custom_id"]
            )
        out.append(cleaned_row(row["custom_id"], result))
    return out


def write_cleaned(rows: Iterable[Mapping], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_cleaned(path: str | Path) -> list[dict]:
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def predictions_from_cleaned(rows: Iterable[Mapping]) -> dict[str, frozenset[int]]:
    """Index cleaned rows by custom_id."""
    return {row["custom_id"]: frozenset(row["labels"]) for row in rows}
