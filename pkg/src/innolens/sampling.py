"""Seeded, stratified subsampling for training-set construction."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import (
    MULTI_LABEL,
    Document,
    EmptyCorpus,
    LabeledCorpus,
)

REPRESENTATIVE = "representative"
BALANCED = "balanced"


class SizeTooSmall(Exception):
    """Raised when a balanced sample cannot give every class at least one slot."""


@dataclass(frozen=True)
class SamplingSpec:
    size: int
    strategy: str
    seed: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("sample size must be >= 1")
        if self.strategy not in (REPRESENTATIVE, BALANCED):
            raise ValueError(f"unknown strategy: {self.strategy!r}")


def largest_remainder_quotas(counts: dict, size: int) -> dict:
    """Apportion `size` slots proportionally to integer counts.

    Floor quotas first, then hand the leftover slots to the largest fractional
    remainders (ties: larger count, then smaller key). Guarantees each quota is
    within 1 of its exact proportional share.
    """
    total = sum(counts.values())
    if total == 0:
        raise ValueError("counts must not all be zero")
    quotas = {}
    remainders = []
    for key in sorted(counts):
        count = counts[key]
        exact_numer = size * count
        quotas[key] = exact_numer // total
        remainders.append((exact_numer % total, count, key))
    leftover = size - sum(quotas.values())
    # remainder desc, count desc, key asc
    remainders.sort(key=lambda t: (-t[0], -t[1], t[2]))
    for _, _, key in remainders[:leftover]:
        quotas[key] += 1
    return quotas


def balanced_quotas(keys: list, size: int) -> dict:
    """Equal quotas with the remainder going one-each to the lowest keys."""
    k = len(keys)
    if size < k:
        raise SizeTooSmall(f"balanced sample of {size} cannot cover {k} classes")
    base, leftover = divmod(size, k)
    ordered = sorted(keys)
    return {key: base + (1 if i < leftover else 0) for i, key in enumerate(ordered)}


def _stratum_key(labels: frozenset[int], kind: str):
    if kind == MULTI_LABEL:
        return tuple(sorted(labels))
    (label,) = labels
    return label


def subsample(corpus: LabeledCorpus, spec: SamplingSpec) -> LabeledCorpus:
    """Draw a stratified subsample.

    representative: stratum quotas proportional to the corpus distribution
    (largest-remainder apportionment). balanced: equal quotas per stratum,
    remainder to the lowest stratum keys. Strata are single labels, or
    composite label sets for multi-label schemes. A stratum short of its
    quota keeps every member once and fills the rest by seeded draws with
    replacement; repeated draws get `#k` id suffixes so ids stay unique.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot subsample an empty corpus")
    corpus.require_labels()

    strata: dict = {}
    for doc in corpus:
        key = _stratum_key(corpus.labels_of(doc.id), corpus.scheme.kind)
        strata.setdefault(key, []).append(doc)

    if spec.strategy == REPRESENTATIVE:
        quotas = largest_remainder_quotas({k: len(v) for k, v in strata.items()}, spec.size)
    else:
        quotas = balanced_quotas(list(strata), spec.size)

    rng = random.Random(spec.seed)
    drawn: list[Document] = []
    for key in sorted(strata):
        members = strata[key]
        quota = quotas[key]
        if quota <= len(members):
            drawn.extend(rng.sample(members, quota))
        else:
            drawn.extend(members)
            drawn.extend(rng.choice(members) for _ in range(quota - len(members)))
    rng.shuffle(drawn)

    seen: dict[str, int] = {}
    out_docs: list[Document] = []
    truth: dict[str, frozenset[int]] = {}
    for doc in drawn:
        n = seen.get(doc.id, 0) + 1
        seen[doc.id] = n
        new_id = doc.id if n == 1 else f"{doc.id}#{n}"
        out_docs.append(
            Document(
                id=new_id,
                text=doc.text,
                version_prev=doc.version_prev,
                version_next=doc.version_next,
            )
        )
        truth[new_id] = corpus.labels_of(doc.id)

    return LabeledCorpus(
        documents=tuple(out_docs),
        truth=truth,
        scheme=corpus.scheme,
        split_tag=corpus.split_tag,
    )
