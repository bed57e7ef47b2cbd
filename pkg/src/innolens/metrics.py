"""Evaluation metrics: F1 reports, run-to-run consistency, Cohen's kappa.

Conventions, applied uniformly:
- zero-denominator precision/recall/F1 evaluate to 0.0;
- macro-F1 averages over every class in the scheme, present or not;
- weighted-F1 weights per-class F1 by truth support;
- a fallback prediction counts as a false negative for the true class and
  contributes no true/false positive anywhere;
- chance-corrected agreement with p_e = 1 is defined as 1.0 when observed
  agreement is perfect, else 0.0.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import MULTI_LABEL, SINGLE_LABEL, TaskScheme


class IdSetMismatch(Exception):
    """Raised when two label maps do not cover the same document ids."""


class NotEnoughRuns(Exception):
    """Raised when consistency is requested for fewer than two runs."""


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    per_class: dict[int, ClassMetrics]
    accuracy: float
    macro_f1: float
    weighted_f1: float
    class_order: tuple[int, ...]


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    observed_agreement: float
    per_class: dict[int, float] = field(default_factory=dict)


def _require_same_ids(a: Mapping, b: Mapping) -> None:
    if set(a) != set(b):
        missing = set(a) ^ set(b)
        raise IdSetMismatch(f"id sets differ on {len(missing)} ids, e.g. {sorted(missing)[:3]}")


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _finish(
    counts: dict[int, tuple[int, int, int]],
    accuracy: float,
    class_order: tuple[int, ...],
) -> MetricsReport:
    per_class = {}
    for c in class_order:
        tp, fp, fn = counts[c]
        precision, recall, f1 = _prf(tp, fp, fn)
        per_class[c] = ClassMetrics(precision, recall, f1, support=tp + fn)
    f1s = [per_class[c].f1 for c in class_order]
    macro = sum(f1s) / len(f1s)
    total_support = sum(per_class[c].support for c in class_order)
    weighted = (
        sum(per_class[c].f1 * per_class[c].support for c in class_order) / total_support
        if total_support
        else 0.0
    )
    return MetricsReport(per_class, accuracy, macro, weighted, class_order)


def binary_report(preds: Mapping[str, bool], truth: Mapping[str, bool]) -> MetricsReport:
    """Positive-class report for a boolean task; class key 1 marks the positive class."""
    _require_same_ids(preds, truth)
    if not truth:
        raise ValueError("cannot report on zero documents")
    tp = fp = fn = correct = 0
    for doc_id, t in truth.items():
        p = preds[doc_id]
        correct += p == t
        if p and t:
            tp += 1
        elif p and not t:
            fp += 1
        elif t and not p:
            fn += 1
    return _finish({1: (tp, fp, fn)}, correct / len(truth), (1,))


def _single_label(labels: frozenset[int], scheme: TaskScheme) -> int:
    if len(labels) != 1:
        raise ValueError(f"expected a singleton label set, got {sorted(labels)}")
    return next(iter(labels))


def multiclass_report(
    preds: Mapping[str, frozenset[int]],
    truth: Mapping[str, frozenset[int]],
    scheme: TaskScheme,
) -> MetricsReport:
    """Per-class and aggregate scores for a single-label scheme."""
    if scheme.kind != SINGLE_LABEL:
        raise ValueError("multiclass_report requires a single-label scheme")
    _require_same_ids(preds, truth)
    if not truth:
        raise ValueError("cannot report on zero documents")
    counts = {c: [0, 0, 0] for c in scheme.classes}  # tp, fp, fn
    correct = 0
    for doc_id, t_labels in truth.items():
        t = _single_label(t_labels, scheme)
        p = _single_label(preds[doc_id], scheme)
        if p == t:
            counts[t][0] += 1
            correct += 1
        else:
            counts[t][2] += 1
            if p in counts:  # fallback predictions add no false positive
                counts[p][1] += 1
    return _finish(
        {c: tuple(v) for c, v in counts.items()}, correct / len(truth), tuple(scheme.classes)
    )


def multilabel_report(
    preds: Mapping[str, frozenset[int]],
    truth: Mapping[str, frozenset[int]],
    scheme: TaskScheme,
) -> MetricsReport:
    """One-vs-rest scores per class; accuracy is exact-set match.

    A fallback prediction behaves as the empty set, so it yields false
    negatives for every true class and no false positives.
    """
    if scheme.kind != MULTI_LABEL:
        raise ValueError("multilabel_report requires a multi-label scheme")
    _require_same_ids(preds, truth)
    if not truth:
        raise ValueError("cannot report on zero documents")
    fallback = frozenset({scheme.fallback_label})
    counts = {c: [0, 0, 0] for c in scheme.classes}
    exact = 0
    for doc_id, t in truth.items():
        p = preds[doc_id]
        if p == fallback:
            p = frozenset()
        exact += p == t
        for c in scheme.classes:
            in_t, in_p = c in t, c in p
            if in_t and in_p:
                counts[c][0] += 1
            elif in_p:
                counts[c][1] += 1
            elif in_t:
                counts[c][2] += 1
    return _finish(
        {c: tuple(v) for c, v in counts.items()}, exact / len(truth), tuple(scheme.classes)
    )


def consistency_rate(
    runs: Sequence[Mapping[str, frozenset[int]]], mode: str = "pairwise"
) -> float:
    """Agreement of repeated runs over the same documents.

    pairwise (default): mean exact-match over all document x run-pair
    combinations. unanimous: fraction of documents on which every run agrees.
    """
    if len(runs) < 2:
        raise NotEnoughRuns("consistency needs at least two runs")
    if mode not in ("pairwise", "unanimous"):
        raise ValueError(f"unknown mode {mode!r}")
    first = runs[0]
    for other in runs[1:]:
        _require_same_ids(first, other)
    if not first:
        raise ValueError("cannot compute consistency over zero documents")
    if mode == "unanimous":
        agree = sum(
            1 for doc_id in first if all(run[doc_id] == first[doc_id] for run in runs[1:])
        )
        return agree / len(first)
    pairs = list(combinations(range(len(runs)), 2))
    agree = sum(
        1 for doc_id in first for i, j in pairs if runs[i][doc_id] == runs[j][doc_id]
    )
    return agree / (len(first) * len(pairs))


def _binary_kappa(pairs: list[tuple[bool, bool]]) -> tuple[float, float]:
    n = len(pairs)
    p_o = sum(1 for a, b in pairs if a == b) / n
    a_pos = sum(1 for a, _ in pairs if a) / n
    b_pos = sum(1 for _, b in pairs if b) / n
    p_e = a_pos * b_pos + (1 - a_pos) * (1 - b_pos)
    if p_e == 1.0:
        return (1.0 if p_o == 1.0 else 0.0), p_o
    return (p_o - p_e) / (1 - p_e), p_o


def cohens_kappa(
    a: Mapping[str, frozenset[int]],
    b: Mapping[str, frozenset[int]],
    scheme: TaskScheme | None = None,
) -> KappaResult:
    """Chance-corrected agreement between two raters.

    Single-label (default): the usual kappa from observed agreement and
    marginal chance agreement. With a multi-label scheme, per-class binary
    kappas are macro-averaged and observed agreement is the per-class mean.
    """
    _require_same_ids(a, b)
    if not a:
        raise ValueError("cannot compute kappa over zero documents")

    if scheme is not None and scheme.kind == MULTI_LABEL:
        per_class = {}
        observed = {}
        for c in scheme.classes:
            pairs = [(c in a[i], c in b[i]) for i in a]
            per_class[c], observed[c] = _binary_kappa(pairs)
        kappa = sum(per_class.values()) / len(per_class)
        p_o = sum(observed.values()) / len(observed)
        return KappaResult(kappa=kappa, observed_agreement=p_o, per_class=per_class)

    n = len(a)
    values_a = {i: _scalar(v) for i, v in a.items()}
    values_b = {i: _scalar(v) for i, v in b.items()}
    p_o = sum(1 for i in values_a if values_a[i] == values_b[i]) / n
    categories = set(values_a.values()) | set(values_b.values())
    count_a = {c: 0 for c in categories}
    count_b = {c: 0 for c in categories}
    for v in values_a.values():
        count_a[v] += 1
    for v in values_b.values():
        count_b[v] += 1
    p_e = sum(count_a[c] * count_b[c] for c in categories) / (n * n)
    if p_e == 1.0:
        return KappaResult(kappa=1.0 if p_o == 1.0 else 0.0, observed_agreement=p_o)
    return KappaResult(kappa=(p_o - p_e) / (1 - p_e), observed_agreement=p_o)


def _scalar(labels: frozenset[int]) -> int:
    if len(labels) != 1:
        raise ValueError(
            "kappa without a multi-label scheme needs singleton label sets; "
            f"got {sorted(labels)}"
        )
    return next(iter(labels))


# fixed serialization columns
CSV_COLUMNS = ("class", "precision", "recall", "f1", "support")
AGGREGATE_ROWS = ("accuracy", "macro_f1", "weighted_f1", "consistency_rate")


def report_to_csv(
    report: MetricsReport,
    path: str | Path | None = None,
    consistency_rate: float | None = None,
) -> str:
    """Render a report as CSV: one row per class, then aggregate rows.

    Aggregate rows carry their value in the f1 column.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in report.class_order:
        m = report.per_class[c]
        writer.writerow([c, f"{m.precision:.6f}", f"{m.recall:.6f}", f"{m.f1:.6f}", m.support])
    aggregates = {
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "weighted_f1": report.weighted_f1,
        "consistency_rate": consistency_rate,
    }
    for name in AGGREGATE_ROWS:
        value = aggregates[name]
        if value is None:
            continue
        writer.writerow([name, "", "", f"{value:.6f}", ""])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def report_to_json(
    report: MetricsReport,
    path: str | Path | None = None,
    consistency_rate: float | None = None,
) -> dict:
    payload = {
        "classes": [
            {
                "class": c,
                "precision": report.per_class[c].precision,
                "recall": report.per_class[c].recall,
                "f1": report.per_class[c].f1,
                "support": report.per_class[c].support,
            }
            for c in report.class_order
        ],
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "weighted_f1": report.weighted_f1,
    }
    if consistency_rate is not None:
        payload["consistency_rate"] = consistency_rate
    if path is not None:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return payload
