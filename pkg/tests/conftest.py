"""Shared corpus and experiment builders for the test suite."""

from __future__ import annotations

import json
import random
from pathlib import Path

from innolens import (
    Document,
    LabeledCorpus,
    STUDY1_UPDATES,
    STUDY2_REVIEWS,
    corpus_from_pairs,
    save_corpus,
)


def single_label_corpus(n: int, seed: int = 0, tag: str = "pool") -> LabeledCorpus:
    """n documents over the 7-class update scheme, labels cycling 1..7."""
    rng = random.Random(seed)
    pairs = []
    for i in range(n):
        label = (i % 7) + 1
        text = f"update note {i} alpha{rng.randrange(1000)} tagged <<c{label}>>"
        pairs.append((Document(id=f"d{i:04d}", text=text), {label}))
    return corpus_from_pairs(pairs, STUDY1_UPDATES, split_tag=tag)


def multi_label_corpus(n: int, seed: int = 0, tag: str = "pool") -> LabeledCorpus:
    """n documents over the 9-class review scheme with 1-2 labels each.

    Each document carries one composite marker like <<r3+5>> so a mock
    behavior table can answer with the full label set.
    """
    rng = random.Random(seed)
    pairs = []
    for i in range(n):
        first = rng.randrange(9)
        labels = {first}
        if rng.random() < 0.4:
            labels.add((first + 1 + rng.randrange(8)) % 9)
        mark = "<<r" + "+".join(str(label) for label in sorted(labels)) + ">>"
        pairs.append((Document(id=f"m{i:04d}", text=f"review {i} {mark}"), labels))
    return corpus_from_pairs(pairs, STUDY2_REVIEWS, split_tag=tag)


def behavior_for_single(prefix: str = "c") -> dict[str, str]:
    return {f"<<{prefix}{c}>>": str(c) for c in range(1, 8)}


def behavior_for_multi() -> dict[str, str]:
    """Answers for every composite marker multi_label_corpus can emit."""
    table = {}
    for first in range(9):
        table[f"<<r{first}>>"] = str(first)
        for second in range(9):
            if second == first:
                continue
            low, high = sorted((first, second))
            table[f"<<r{low}+{high}>>"] = f"{low};{high}"
    return table


def experiment_files(
    root: Path,
    n_docs: int = 20,
    temperatures=(0.0,),
    run_count: int = 3,
    noise_rate: float = 0.0,
    provider: str = "mock",
    model_id: str = "mock-small",
    variants=("default",),
    workers: int = 1,
    extra: dict | None = None,
) -> tuple[LabeledCorpus, Path, dict]:
    """Write a validation corpus plus a runnable config file under root.

    Returns (corpus, config_path, raw config dict).  Paths inside the
    config are relative so the loader's base-dir resolution is exercised.
    """
    corpus = single_label_corpus(n_docs, tag="validation")
    save_corpus(corpus, root / "validation.jsonl")
    data = {
        "task": "study1_updates",
        "validation_corpus": "validation.jsonl",
        "models": [{"provider": provider, "model_id": model_id}],
        "variants": list(variants),
        "temperatures": list(temperatures),
        "run_count": run_count,
        "output_dir": "runs",
        "workers": workers,
        "mock": {"behavior": behavior_for_single(), "noise_rate": noise_rate},
    }
    if extra:
        data.update(extra)
    config_path = root / "config.json"
    config_path.write_text(json.dumps(data, indent=1), encoding="utf-8")
    return corpus, config_path, data
