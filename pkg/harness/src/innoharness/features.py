"""Feature representations: sparse term weighting and averaged word vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer

from .embeddings import EMBEDDING_VARIANTS
from .errors import ConfigMismatch

TERM_WEIGHTING = "term_weighting"
PRETRAINED_EMBEDDING = "pretrained_embedding"

# search bounds for the term-weighting representation
MAX_FEATURES_RANGE = (2000, 10000)
NGRAM_RANGES = ((1, 1), (1, 2), (1, 3))
MIN_DF_RANGE = (1, 4)
MAX_DF_RANGE = (0.6, 1.0)


@dataclass(frozen=True)
class FeatureSpec:
    """A concrete feature configuration.

    Term-weighting params must stay inside the search bounds above; the
    embedding variant must be one of the registered four.
    """

    kind: str
    max_features: int | None = None
    ngram_range: tuple[int, int] | None = None
    min_df: int | None = None
    max_df: float | None = None
    variant: str | None = None

    def __post_init__(self) -> None:
        if self.kind == TERM_WEIGHTING:
            self._check_term_weighting()
        elif self.kind == PRETRAINED_EMBEDDING:
            self._check_embedding()
        else:
            raise ValueError(f"unknown feature kind: {self.kind!r}")

    def _check_term_weighting(self) -> None:
        if self.variant is not None:
            raise ValueError("term weighting takes no embedding variant")
        if None in (self.max_features, self.ngram_range, self.min_df, self.max_df):
            raise ValueError("term weighting needs max_features, ngram_range, min_df, max_df")
        lo, hi = MAX_FEATURES_RANGE
        if not lo <= self.max_features <= hi:
            raise ValueError(f"max_features must be within [{lo}, {hi}]")
        if tuple(self.ngram_range) not in NGRAM_RANGES:
            raise ValueError(f"ngram_range must be one of {NGRAM_RANGES}")
        if not MIN_DF_RANGE[0] <= self.min_df <= MIN_DF_RANGE[1]:
            raise ValueError(f"min_df must be within {MIN_DF_RANGE}")
        if not MAX_DF_RANGE[0] <= self.max_df <= MAX_DF_RANGE[1]:
            raise ValueError(f"max_df must be within {MAX_DF_RANGE}")

    def _check_embedding(self) -> None:
        if self.variant not in EMBEDDING_VARIANTS:
            raise ValueError(
                f"unknown embedding variant {self.variant!r}; "
                f"known: {', '.join(sorted(EMBEDDING_VARIANTS))}"
            )
        for name in ("max_features", "ngram_range", "min_df", "max_df"):
            if getattr(self, name) is not None:
                raise ValueError("pretrained embeddings take no term-weighting params")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == TERM_WEIGHTING:
            out.update(
                max_features=self.max_features,
                ngram_range=list(self.ngram_range),
                min_df=self.min_df,
                max_df=self.max_df,
            )
        else:
            out["variant"] = self.variant
        return out


def feature_spec_from_dict(data: Mapping) -> FeatureSpec:
    kind = data.get("kind")
    try:
        if kind == TERM_WEIGHTING:
            return FeatureSpec(
                kind=kind,
                max_features=int(data["max_features"]),
                ngram_range=tuple(data["ngram_range"]),
                min_df=int(data["min_df"]),
                max_df=float(data["max_df"]),
            )
        if kind == PRETRAINED_EMBEDDING:
            return FeatureSpec(kind=kind, variant=data["variant"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigMismatch(f"invalid feature configuration: {exc}") from exc
    raise ConfigMismatch(f"invalid feature configuration: unknown kind {kind!r}")


def sample_term_weighting(rng: np.random.Generator) -> FeatureSpec:
    """Draw term-weighting params from the search distributions."""
    return FeatureSpec(
        kind=TERM_WEIGHTING,
        max_features=int(rng.integers(MAX_FEATURES_RANGE[0], MAX_FEATURES_RANGE[1], endpoint=True)),
        ngram_range=NGRAM_RANGES[int(rng.integers(0, len(NGRAM_RANGES)))],
        min_df=int(rng.integers(MIN_DF_RANGE[0], MIN_DF_RANGE[1], endpoint=True)),
        max_df=float(rng.uniform(MAX_DF_RANGE[0], MAX_DF_RANGE[1])),
    )


def build_vectorizer(spec: FeatureSpec) -> TfidfVectorizer:
    if spec.kind != TERM_WEIGHTING:
        raise ConfigMismatch("vectorizer requires a term-weighting feature spec")
    return TfidfVectorizer(
        max_features=spec.max_features,
        ngram_range=tuple(spec.ngram_range),
        min_df=spec.min_df,
        max_df=spec.max_df,
    )
