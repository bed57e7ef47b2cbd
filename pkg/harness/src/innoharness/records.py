"""Target encoding and prediction records in the innolens file formats."""

from __future__ import annotations

import numpy as np

from innolens import LabeledCorpus, TaskScheme, encode_one_vs_rest

MULTI_LABEL = "multi_label"
SINGLE_LABEL = "single_label"


def targets(corpus: LabeledCorpus) -> np.ndarray:
    """Class-index targets: a vector for single-label, multi-hot rows otherwise."""
    scheme = corpus.scheme
    corpus.require_labels()
    if scheme.kind == MULTI_LABEL:
        return np.asarray(
            [encode_one_vs_rest(corpus.labels_of(d.id), scheme) for d in corpus],
            dtype=np.int64,
        )
    index = {c: i for i, c in enumerate(scheme.classes)}
    return np.asarray(
        [index[next(iter(corpus.labels_of(d.id)))] for d in corpus], dtype=np.int64
    )


def decode_one_vs_rest(bits, scheme: TaskScheme) -> frozenset[int]:
    """Inverse of the innolens multi-hot encoder; all-zeros decodes to fallback."""
    labels = frozenset(c for c, bit in zip(scheme.classes, bits) if bit)
    if not labels:
        return frozenset({scheme.fallback_label})
    return labels


def prediction_rows(
    ids: list[str], label_sets: list[frozenset[int]], scheme: TaskScheme
) -> list[dict]:
    """Cleaned-prediction rows, one per document.

    Model decisions carry tier "T1" and fallback false; an empty or fallback
    label set becomes the fallback sentinel row (scored as wrong).
    """
    rows = []
    for doc_id, labels in zip(ids, label_sets):
        if labels and labels != {scheme.fallback_label}:
            rows.append(
                {"custom_id": doc_id, "labels": sorted(labels), "fallback": False, "tier": "T1"}
            )
        else:
            rows.append(
                {
                    "custom_id": doc_id,
                    "labels": [scheme.fallback_label],
                    "fallback": True,
                    "tier": "none",
                }
            )
    return rows


def validate_prediction_rows(rows, scheme: TaskScheme) -> None:
    """Check rows against the shared cleaned-prediction schema."""
    expected_keys = {"custom_id", "labels", "fallback", "tier"}
    for i, row in enumerate(rows):
        where = f"row {i}"
        if set(row) != expected_keys:
            raise ValueError(f"{where}: keys {sorted(row)} != {sorted(expected_keys)}")
        labels = row["labels"]
        if not isinstance(labels, list) or not labels:
            raise ValueError(f"{where}: labels must be a non-empty list")
        if labels != sorted(labels):
            raise ValueError(f"{where}: labels must be sorted")
        if row["fallback"]:
            if labels != [scheme.fallback_label]:
                raise ValueError(f"{where}: fallback rows carry only the sentinel label")
            if row["tier"] != "none":
                raise ValueError(f"{where}: fallback rows carry tier 'none'")
            continue
        bad = [l for l in labels if not scheme.is_valid_label(l)]
        if bad:
            raise ValueError(f"{where}: labels {bad} not in scheme classes")
        if scheme.kind == SINGLE_LABEL and len(labels) != 1:
            raise ValueError(f"{where}: single-label rows carry exactly one label")
        if row["tier"] not in ("T1", "T2", "T3"):
            raise ValueError(f"{where}: unknown tier {row['tier']!r}")
