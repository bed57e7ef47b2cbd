"""Corpus types: documents, labeling schemes, labeled corpora, and JSON Lines IO."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

SINGLE_LABEL = "single_label"
MULTI_LABEL = "multi_label"


class EmptyCorpus(Exception):
    """Raised when an operation needs at least one document."""


class MissingLabel(Exception):
    """Raised when an operation needs truth labels and a document has none."""


class InvalidLabelSet(Exception):
    """Raised when a label set violates the scheme it is checked against."""


class WrongSchemeKind(Exception):
    """Raised when an operation is called with a scheme of the wrong kind."""


@dataclass(frozen=True)
class Document:
    """One unit of text to classify. Version fields are optional metadata."""

    id: str
    text: str
    version_prev: str | None = None
    version_next: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")


@dataclass(frozen=True)
class TaskScheme:
    """A labeling scheme: the class universe plus which classes count as innovative.

    kind is "single_label" (exactly one class per document) or "multi_label"
    (one or more classes per document). fallback_label marks unparseable
    model output and must not collide with a real class.
    """

    kind: str
    classes: tuple[int, ...]
    innovative_classes: frozenset[int]
    fallback_label: int = -1

    def __post_init__(self) -> None:
        if self.kind not in (SINGLE_LABEL, MULTI_LABEL):
            raise ValueError(f"unknown scheme kind: {self.kind!r}")
        if not self.classes:
            raise ValueError("scheme needs at least one class")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("scheme classes must be distinct")
        if not self.innovative_classes <= set(self.classes):
            raise ValueError("innovative_classes must be a subset of classes")
        if self.fallback_label in self.classes:
            raise ValueError("fallback_label must not be a valid class")

    def is_valid_label(self, label: int) -> bool:
        return label in self.classes


# Built-in schemes for the two studied tasks.
STUDY1_UPDATES = TaskScheme(
    kind=SINGLE_LABEL,
    classes=(1, 2, 3, 4, 5, 6, 7),
    innovative_classes=frozenset({1, 2}),
)
STUDY2_REVIEWS = TaskScheme(
    kind=MULTI_LABEL,
    classes=(0, 1, 2, 3, 4, 5, 6, 7, 8),
    innovative_classes=frozenset({3}),
)

BUILTIN_SCHEMES: dict[str, TaskScheme] = {
    "study1_updates": STUDY1_UPDATES,
    "study2_reviews": STUDY2_REVIEWS,
}


def validate_label_set(labels: frozenset[int], scheme: TaskScheme) -> None:
    """Check a truth/prediction label set against a scheme.

    A valid set is either {fallback_label} or a non-empty set of valid
    classes; single-label schemes allow exactly one class.
    """
    if not labels:
        raise InvalidLabelSet("label set must be non-empty")
    if labels == {scheme.fallback_label}:
        return
    bad = sorted(l for l in labels if not scheme.is_valid_label(l))
    if bad:
        raise InvalidLabelSet(f"labels {bad} not in scheme classes")
    if scheme.kind == SINGLE_LABEL and len(labels) != 1:
        raise InvalidLabelSet("single-label scheme allows exactly one label")


@dataclass(frozen=True)
class LabeledCorpus:
    """Documents plus a truth map. Empty truth entries mean 'unlabeled'."""

    documents: tuple[Document, ...]
    truth: Mapping[str, frozenset[int]]
    scheme: TaskScheme
    split_tag: str = "pool"

    def __post_init__(self) -> None:
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise ValueError("document ids must be unique within a corpus")
        for doc_id in ids:
            if doc_id not in self.truth:
                raise ValueError(f"document {doc_id!r} has no truth entry")
        for doc_id, labels in self.truth.items():
            if labels:
                validate_label_set(labels, self.scheme)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def labels_of(self, doc_id: str) -> frozenset[int]:
        return self.truth[doc_id]

    def is_fully_labeled(self) -> bool:
        return all(self.truth[d.id] for d in self.documents)

    def require_labels(self) -> None:
        for doc in self.documents:
            if not self.truth[doc.id]:
                raise MissingLabel(f"document {doc.id!r} is unlabeled")


def class_distribution(corpus: LabeledCorpus) -> dict[int, int]:
    """Count truth occurrences per class.

    Single-label: counts sum to the corpus size. Multi-label: each label
    instance counts once, so the sum can exceed the corpus size.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot compute a distribution of an empty corpus")
    corpus.require_labels()
    counts: dict[int, int] = {c: 0 for c in corpus.scheme.classes}
    for doc in corpus:
        for label in corpus.labels_of(doc.id):
            counts[label] += 1
    return counts


def binarize_innovative(labels: frozenset[int], scheme: TaskScheme) -> bool:
    """True when any label is in the scheme's innovative set; fallback is False."""
    if labels == {scheme.fallback_label}:
        return False
    validate_label_set(labels, scheme)
    return bool(labels & scheme.innovative_classes)


def encode_one_vs_rest(labels: frozenset[int], scheme: TaskScheme) -> list[int]:
    """Multi-hot encode a multi-label set in scheme class order.

    The fallback sentinel encodes as all zeros.
    """
    if scheme.kind != MULTI_LABEL:
        raise WrongSchemeKind("one-vs-rest encoding requires a multi-label scheme")
    if labels == {scheme.fallback_label}:
        return [0] * len(scheme.classes)
    validate_label_set(labels, scheme)
    return [1 if c in labels else 0 for c in scheme.classes]


def _document_to_row(doc: Document, labels: frozenset[int]) -> dict:
    return {
        "id": doc.id,
        "text": doc.text,
        "version_prev": doc.version_prev,
        "version_next": doc.version_next,
        "labels": sorted(labels),
    }


def save_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    """Write a corpus as JSON Lines, one document per row."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus:
            row = _document_to_row(doc, corpus.labels_of(doc.id))
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_corpus(path: str | Path, scheme: TaskScheme, split_tag: str = "pool") -> LabeledCorpus:
    """Read a JSON Lines corpus. An empty labels array marks an unlabeled document."""
    docs: list[Document] = []
    truth: dict[str, frozenset[int]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            try:
                doc = Document(
                    id=str(row["id"]),
                    text=row["text"],
                    version_prev=row.get("version_prev"),
                    version_next=row.get("version_next"),
                )
            except KeyError as exc:
                raise ValueError(f"{path}:{line_no}: missing field {exc}") from exc
            docs.append(doc)
            truth[doc.id] = frozenset(int(l) for l in row.get("labels", []))
    return LabeledCorpus(documents=tuple(docs), truth=truth, scheme=scheme, split_tag=split_tag)


def corpus_from_pairs(
    pairs: Iterable[tuple[Document, frozenset[int] | set[int]]],
    scheme: TaskScheme,
    split_tag: str = "pool",
) -> LabeledCorpus:
    """Convenience constructor from (document, labels) pairs."""
    docs = []
    truth = {}
    for doc, labels in pairs:
        docs.append(doc)
        truth[doc.id] = frozenset(labels)
    return LabeledCorpus(documents=tuple(docs), truth=truth, scheme=scheme, split_tag=split_tag)
