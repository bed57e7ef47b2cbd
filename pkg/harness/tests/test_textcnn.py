"""Convolutional text model: sampling bounds, embedding matrix, training."""

import numpy as np
import pytest

torch = pytest.importorskip("torch")

from innolens import (
    multiclass_report,
    multilabel_report,
    predictions_from_cleaned,
    read_cleaned,
)
from innoharness import SearchSpec, fit_predict, sample_cnn_params, search
from innoharness.features import PRETRAINED_EMBEDDING
from innoharness.textcnn import CNN_PARAM_NAMES, _embedding_matrix, _fit
from innoharness.tokens import PAD_INDEX, UNK_INDEX, build_vocabulary

from conftest import keyword_corpus, multilabel_corpus

BOUNDS = {
    "num_words": (10000, 30000),
    "seq_len": (100, 300),
    "n_filters": (64, 256),
    "kernel_size": (3, 8),
    "dense_units": (32, 256),
    "batch_size": (32, 128),
    "max_epochs": (5, 15),
}


def test_sampler_stays_within_bounds():
    rng = np.random.default_rng(8)
    for _ in range(300):
        params = sample_cnn_params(rng)
        assert set(params) == CNN_PARAM_NAMES
        for key, (lo, hi) in BOUNDS.items():
            assert lo <= params[key] <= hi, key
        assert 0.1 <= params["dropout"] <= 0.5
        assert isinstance(params["trainable"], bool)


def test_sampler_deterministic_per_seed():
    a = [sample_cnn_params(np.random.default_rng(3)) for _ in range(10)]
    b = [sample_cnn_params(np.random.default_rng(3)) for _ in range(10)]
    assert a == b


def test_embedding_matrix_rows():
    vocab = build_vocabulary(["cat dog cat"], num_words=10)
    table = {"cat": np.array([1.0, 2.0])}
    matrix = _embedding_matrix(vocab, table, dim=2, seed=0)
    assert matrix.shape == (len(vocab) + 2, 2)
    np.testing.assert_array_equal(matrix[PAD_INDEX], [0.0, 0.0])
    np.testing.assert_array_equal(matrix[UNK_INDEX], [0.0, 0.0])
    np.testing.assert_array_equal(matrix[vocab["cat"]], [1.0, 2.0])
    # out-of-table token gets a seeded random row, not zeros
    assert np.any(matrix[vocab["dog"]] != 0.0)


def test_embedding_matrix_misses_are_seeded():
    vocab = build_vocabulary(["dog"], num_words=10)
    a = _embedding_matrix(vocab, {}, dim=4, seed=5)
    b = _embedding_matrix(vocab, {}, dim=4, seed=5)
    c = _embedding_matrix(vocab, {}, dim=4, seed=6)
    np.testing.assert_array_equal(a, b)
    assert np.any(a[vocab["dog"]] != c[vocab["dog"]])


def small_params(**kw):
    base = dict(
        num_words=10000,
        seq_len=100,
        n_filters=64,
        kernel_size=3,
        dense_units=32,
        dropout=0.1,
        trainable=True,
        batch_size=32,
        max_epochs=5,
    )
    base.update(kw)
    return base


def test_fit_rejects_window_longer_than_sequence():
    with pytest.raises(ValueError, match="seq_len"):
        _fit(
            ["a b"],
            np.array([0]),
            small_params(seq_len=2, kernel_size=3),
            seed=0,
            multilabel=False,
            n_classes=2,
            vectors_table={},
            dim=4,
            lowercase=True,
        )


def test_cnn_search_learns_separable_corpus(tmp_path, vectors_cache):
    train = keyword_corpus(60, "train", seed=50)
    spec = SearchSpec(
        family="cnn",
        feature_kind=PRETRAINED_EMBEDDING,
        embedding_variant="42B-300d",
        trials=2,
    )
    result = search(train, spec, out_dir=tmp_path, embeddings_cache=vectors_cache)
    assert result.cv_macro_f1 >= 0.8
    assert result.config["family"] == "cnn"
    assert set(result.config["params"]) == CNN_PARAM_NAMES


def test_cnn_fit_predict_deterministic(tmp_path, vectors_cache):
    train = keyword_corpus(60, "train", seed=51)
    eval_corpus = keyword_corpus(20, "eval", seed=52)
    spec = SearchSpec(
        family="cnn",
        feature_kind=PRETRAINED_EMBEDDING,
        embedding_variant="42B-300d",
        trials=2,
    )
    result = search(train, spec, out_dir=tmp_path, embeddings_cache=vectors_cache)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    fit_predict(result.best_config_path, train, eval_corpus, out_path=a,
                embeddings_cache=vectors_cache)
    fit_predict(result.best_config_path, train, eval_corpus, out_path=b,
                embeddings_cache=vectors_cache)
    assert a.read_bytes() == b.read_bytes()
    preds = predictions_from_cleaned(read_cleaned(a))
    report = multiclass_report(preds, eval_corpus.truth, eval_corpus.scheme)
    assert report.macro_f1 >= 0.8


def test_cnn_multilabel_end_to_end(tmp_path, vectors_cache):
    train = multilabel_corpus(50, "train", seed=53)
    eval_corpus = multilabel_corpus(20, "eval", seed=54)
    spec = SearchSpec(
        family="cnn",
        feature_kind=PRETRAINED_EMBEDDING,
        embedding_variant="42B-300d",
        trials=1,
    )
    result = search(train, spec, out_dir=tmp_path, embeddings_cache=vectors_cache)
    rows = fit_predict(
        result.best_config_path, train, eval_corpus, embeddings_cache=vectors_cache
    )
    report = multilabel_report(
        predictions_from_cleaned(rows), eval_corpus.truth, eval_corpus.scheme
    )
    assert 0.0 <= report.macro_f1 <= 1.0
    assert len(rows) == 20
