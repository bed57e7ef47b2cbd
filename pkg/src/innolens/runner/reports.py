"""Cross-cell report tables, recomputed from persisted cleaned predictions.

F1-type columns come from run 1 only; the consistency column uses all runs.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from ..corpus import load_corpus
from .config import ExperimentConfig
from .execute import OutputLayout, output_layout, score_cell
from .ledger import RunLedger
from .plan import PlanCell, plan

SHAPES = ("binary", "multiclass", "multilabel", "temperature_sweep", "size_sweep")


class EmptyReport(Exception):
    """Raised when no scored cells exist to report on."""


def _scored_cells(config: ExperimentConfig, layout: OutputLayout) -> list[PlanCell]:
    ledger = RunLedger.load(layout.ledger_path)
    states = ledger.cells()
    return [
        cell
        for cell in plan(config)
        if states.get(cell.cell_id, {}).get("status") == "scored"
    ]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _train_fields(train_variant: str) -> tuple[int, str]:
    if train_variant == "default":
        return 0, ""
    _, size, distribution = train_variant.split(":")
    return int(size), distribution


def report(config: ExperimentConfig, shape: str, out_path: str | Path | None = None) -> str:
    """Build one CSV table across all scored cells."""
    if shape not in SHAPES:
        raise ValueError(f"unknown report shape {shape!r}; known: {SHAPES}")
    scheme = config.scheme()
    if shape == "multiclass" and scheme.kind != "single_label":
        raise ValueError("multiclass reports need a single-label task")
    if shape == "multilabel" and scheme.kind != "multi_label":
        raise ValueError("multilabel reports need a multi-label task")

    layout = output_layout(config)
    cells = _scored_cells(config, layout)
    if not cells:
        raise EmptyReport("no scored cells; run the experiment first")
    corpus = load_corpus(config.validation_corpus, scheme, split_tag="validation")

    payloads = [(cell, score_cell(cell, config, corpus, layout)) for cell in cells]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")

    if shape == "binary":
        writer.writerow(
            ["model", "train_variant", "variant", "temperature",
             "precision", "recall", "f1", "accuracy", "consistency_rate"]
        )
        for cell, payload in payloads:
            binary = payload["binary"]["classes"][0]
            writer.writerow(
                [cell.effective_model_id, cell.train_variant, cell.variant,
                 _fmt(cell.temperature), _fmt(binary["precision"]),
                 _fmt(binary["recall"]), _fmt(binary["f1"]),
                 _fmt(payload["binary"]["accuracy"]),
                 _fmt(payload["consistency_rate"])]
            )
    elif shape in ("multiclass", "multilabel"):
        class_cols = [f"f1_{c}" for c in scheme.classes]
        writer.writerow(
            ["model", "train_variant", "variant", "temperature", *class_cols,
             "accuracy", "macro_f1", "weighted_f1", "consistency_rate"]
        )
        for cell, payload in payloads:
            by_class = {row["class"]: row["f1"] for row in payload["report"]["classes"]}
            writer.writerow(
                [cell.effective_model_id, cell.train_variant, cell.variant,
                 _fmt(cell.temperature),
                 *[_fmt(by_class[c]) for c in scheme.classes],
                 _fmt(payload["report"]["accuracy"]),
                 _fmt(payload["report"]["macro_f1"]),
                 _fmt(payload["report"]["weighted_f1"]),
                 _fmt(payload["consistency_rate"])]
            )
    elif shape == "temperature_sweep":
        writer.writerow(
            ["model", "train_variant", "variant", "temperature",
             "macro_f1", "accuracy", "consistency_rate"]
        )
        ordered = sorted(
            payloads,
            key=lambda p: (p[0].effective_model_id, p[0].train_variant,
                           p[0].variant, p[0].temperature),
        )
        for cell, payload in ordered:
            writer.writerow(
                [cell.effective_model_id, cell.train_variant, cell.variant,
                 _fmt(cell.temperature), _fmt(payload["report"]["macro_f1"]),
                 _fmt(payload["report"]["accuracy"]),
                 _fmt(payload["consistency_rate"])]
            )
    else:  # size_sweep
        writer.writerow(
            ["model", "variant", "temperature", "distribution", "train_size",
             "macro_f1", "accuracy", "consistency_rate"]
        )
        ordered = sorted(
            payloads,
            key=lambda p: (p[0].model.model_id, p[0].variant, p[0].temperature,
                           _train_fields(p[0].train_variant)[1],
                           _train_fields(p[0].train_variant)[0]),
        )
        for cell, payload in ordered:
            size, distribution = _train_fields(cell.train_variant)
            writer.writerow(
                [cell.model.model_id, cell.variant, _fmt(cell.temperature),
                 distribution, size, _fmt(payload["report"]["macro_f1"]),
                 _fmt(payload["report"]["accuracy"]),
                 _fmt(payload["consistency_rate"])]
            )

    text = buf.getvalue()
    if out_path is not None:
        Path(out_path).write_text(text, encoding="utf-8")
    return text
