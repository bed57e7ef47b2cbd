"""Shared corpus builders and fixtures for the harness tests."""

import os

# keep optional hub integrations quiet and offline in every test process
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")

import numpy as np
import pytest

from innolens import Document, TaskScheme, corpus_from_pairs

THREE_CLASS = TaskScheme(
    kind="single_label", classes=(1, 2, 3), innovative_classes=frozenset({1})
)
TWO_CLASS = TaskScheme(kind="single_label", classes=(1, 2), innovative_classes=frozenset())
FOUR_MULTI = TaskScheme(
    kind="multi_label", classes=(0, 1, 2, 3), innovative_classes=frozenset({3})
)

CLASS_WORDS = {
    1: ["added", "new", "feature", "introduce", "launch"],
    2: ["fixed", "bug", "crash", "repair", "patch"],
    3: ["improved", "speed", "performance", "faster", "polish"],
}
MULTI_WORDS = {0: "alpha", 1: "bravo", 2: "carol", 3: "delta"}
FILLER = ["the", "app", "update", "for", "users", "with", "this", "release"]


def keyword_corpus(n, tag, seed, scheme=THREE_CLASS, words=CLASS_WORDS):
    """Single-label corpus whose classes are keyword-disjoint."""
    rng = np.random.default_rng(seed)
    pairs = []
    classes = tuple(words)
    for i in range(n):
        c = classes[int(rng.integers(0, len(classes)))]
        toks = [words[c][int(rng.integers(0, len(words[c])))] for _ in range(3)]
        toks += [FILLER[int(rng.integers(0, len(FILLER)))] for _ in range(5)]
        rng.shuffle(toks)
        pairs.append((Document(id=f"{tag}-{i}", text=" ".join(toks)), {c}))
    return corpus_from_pairs(pairs, scheme, split_tag=tag)


def multilabel_corpus(n, tag, seed, scheme=FOUR_MULTI):
    """Multi-label corpus: each present class contributes its marker token."""
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(n):
        labels = {c for c in scheme.classes if rng.random() < 0.4}
        if not labels:
            labels = {int(rng.integers(0, len(scheme.classes)))}
        toks = [MULTI_WORDS[c] for c in labels for _ in range(3)]
        toks += [FILLER[int(rng.integers(0, 4))] for _ in range(4)]
        rng.shuffle(toks)
        pairs.append((Document(id=f"{tag}-{i}", text=" ".join(toks)), labels))
    return corpus_from_pairs(pairs, scheme, split_tag=tag)


def write_vectors_file(path, words, dim, seed=7):
    """Synthetic vectors file in the plain-text format."""
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for word in words:
            vec = rng.normal(0.0, 0.3, dim)
            fh.write(word + " " + " ".join("%.5f" % v for v in vec) + "\n")


ALL_TEST_WORDS = sorted(
    {w for ws in CLASS_WORDS.values() for w in ws}
    | set(MULTI_WORDS.values())
    | set(FILLER)
)


@pytest.fixture(scope="session")
def vectors_cache(tmp_path_factory):
    """Cache dir pre-seeded with synthetic files for two variants."""
    cache = tmp_path_factory.mktemp("vectors")
    write_vectors_file(cache / "glove.42B.300d.txt", ALL_TEST_WORDS, 300)
    write_vectors_file(cache / "glove.6B.100d.txt", ALL_TEST_WORDS, 100)
    return cache
