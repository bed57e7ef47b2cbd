"""Feature specifications: validation, sampling bounds, serialization."""

import numpy as np
import pytest

from innoharness import (
    ConfigMismatch,
    FeatureSpec,
    PRETRAINED_EMBEDDING,
    TERM_WEIGHTING,
    feature_spec_from_dict,
    sample_term_weighting,
)
from innoharness.features import (
    MAX_DF_RANGE,
    MAX_FEATURES_RANGE,
    MIN_DF_RANGE,
    NGRAM_RANGES,
    build_vectorizer,
)


def tw(**kw):
    base = dict(
        kind=TERM_WEIGHTING, max_features=5000, ngram_range=(1, 2), min_df=2, max_df=0.9
    )
    base.update(kw)
    return FeatureSpec(**base)


def test_term_weighting_accepts_bounds_edges():
    tw(max_features=2000, min_df=1, max_df=0.6, ngram_range=(1, 1))
    tw(max_features=10000, min_df=4, max_df=1.0, ngram_range=(1, 3))


@pytest.mark.parametrize(
    "kw",
    [
        {"max_features": 1999},
        {"max_features": 10001},
        {"min_df": 0},
        {"min_df": 5},
        {"max_df": 0.59},
        {"max_df": 1.01},
        {"ngram_range": (2, 2)},
        {"ngram_range": (1, 4)},
    ],
)
def test_term_weighting_rejects_out_of_bounds(kw):
    with pytest.raises(ValueError):
        tw(**kw)


def test_term_weighting_forbids_variant():
    with pytest.raises(ValueError):
        tw(variant="6B-100d")


def test_embedding_spec_requires_known_variant():
    FeatureSpec(kind=PRETRAINED_EMBEDDING, variant="840B-300d")
    with pytest.raises(ValueError):
        FeatureSpec(kind=PRETRAINED_EMBEDDING, variant="9000B-1d")
    with pytest.raises(ValueError):
        FeatureSpec(kind=PRETRAINED_EMBEDDING)


def test_embedding_spec_forbids_term_weighting_params():
    with pytest.raises(ValueError):
        FeatureSpec(kind=PRETRAINED_EMBEDDING, variant="6B-100d", max_features=5000)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        FeatureSpec(kind="bag_of_vibes")


def test_sampler_stays_within_bounds():
    rng = np.random.default_rng(3)
    for _ in range(500):
        spec = sample_term_weighting(rng)
        assert MAX_FEATURES_RANGE[0] <= spec.max_features <= MAX_FEATURES_RANGE[1]
        assert spec.ngram_range in NGRAM_RANGES
        assert MIN_DF_RANGE[0] <= spec.min_df <= MIN_DF_RANGE[1]
        assert MAX_DF_RANGE[0] <= spec.max_df <= MAX_DF_RANGE[1]


def test_sampler_reaches_integer_endpoints():
    rng = np.random.default_rng(5)
    seen_df = {sample_term_weighting(rng).min_df for _ in range(400)}
    assert seen_df == {1, 2, 3, 4}


def test_sampler_deterministic_per_seed():
    a = [sample_term_weighting(np.random.default_rng(42)) for _ in range(20)]
    b = [sample_term_weighting(np.random.default_rng(42)) for _ in range(20)]
    assert a == b


def test_dict_round_trip():
    for spec in (tw(), FeatureSpec(kind=PRETRAINED_EMBEDDING, variant="6B-300d")):
        assert feature_spec_from_dict(spec.to_dict()) == spec


def test_to_dict_is_json_plain():
    d = tw().to_dict()
    assert d["ngram_range"] == [1, 2]
    assert isinstance(d["max_df"], float)


def test_from_dict_rejects_junk():
    with pytest.raises(ConfigMismatch):
        feature_spec_from_dict({"kind": TERM_WEIGHTING, "max_features": "lots"})
    with pytest.raises(ConfigMismatch):
        feature_spec_from_dict({})
    with pytest.raises(ConfigMismatch):
        feature_spec_from_dict({"kind": TERM_WEIGHTING, "unexpected": 1})


def test_build_vectorizer_passes_params_through():
    vec = build_vectorizer(tw(max_features=4321, ngram_range=(1, 3), min_df=3, max_df=0.7))
    assert vec.max_features == 4321
    assert vec.ngram_range == (1, 3)
    assert vec.min_df == 3
    assert vec.max_df == 0.7


def test_build_vectorizer_rejects_embedding_spec():
    with pytest.raises(ConfigMismatch):
        build_vectorizer(FeatureSpec(kind=PRETRAINED_EMBEDDING, variant="6B-100d"))
