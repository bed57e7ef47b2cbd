"""Randomized hyperparameter search: validation, scoring, determinism."""

import csv
import importlib.util
import json

import pytest

from innolens import Document, TaskScheme, corpus_from_pairs
from innoharness import (
    CLASSICAL_TRIALS,
    CNN_TRIALS,
    ConfigMismatch,
    SearchFailed,
    SearchSpec,
    StratificationError,
    UnavailableFamily,
    check_stratifiable,
    classifier_families,
    search,
)
from innoharness.features import PRETRAINED_EMBEDDING

from conftest import THREE_CLASS, keyword_corpus, multilabel_corpus

HAVE_XGBOOST = importlib.util.find_spec("xgboost") is not None


def test_spec_defaults():
    spec = SearchSpec(family="svm")
    assert spec.feature_kind == "term_weighting"
    assert spec.folds == 3
    assert spec.seed == 94032
    assert spec.resolved_trials() == CLASSICAL_TRIALS


def test_spec_trial_budgets():
    assert SearchSpec(family="logistic_regression").resolved_trials() == 50
    assert (
        SearchSpec(
            family="cnn", feature_kind=PRETRAINED_EMBEDDING, embedding_variant="42B-300d"
        ).resolved_trials()
        == CNN_TRIALS
    )
    assert SearchSpec(family="knn", trials=7).resolved_trials() == 7


def test_spec_rejects_unknown_family():
    with pytest.raises(UnavailableFamily, match="unknown"):
        SearchSpec(family="quantum_forest")


def test_spec_embedding_features_need_a_variant():
    with pytest.raises(ConfigMismatch, match="variant"):
        SearchSpec(family="svm", feature_kind=PRETRAINED_EMBEDDING)
    with pytest.raises(ConfigMismatch):
        SearchSpec(
            family="svm", feature_kind=PRETRAINED_EMBEDDING, embedding_variant="77B-9d"
        )


def test_spec_term_weighting_forbids_variant():
    with pytest.raises(ConfigMismatch):
        SearchSpec(family="svm", embedding_variant="6B-100d")


def test_spec_naive_bayes_needs_term_weighting():
    with pytest.raises(ConfigMismatch, match="term-weighting"):
        SearchSpec(
            family="naive_bayes",
            feature_kind=PRETRAINED_EMBEDDING,
            embedding_variant="6B-100d",
        )


def test_spec_cnn_needs_embedding_features():
    with pytest.raises(ConfigMismatch):
        SearchSpec(family="cnn")


def test_spec_rejects_degenerate_budgets():
    with pytest.raises(ValueError):
        SearchSpec(family="svm", trials=0)
    with pytest.raises(ValueError):
        SearchSpec(family="svm", folds=1)


def test_classifier_families_roster():
    assert set(classifier_families()) == {
        "random_forest",
        "logistic_regression",
        "knn",
        "naive_bayes",
        "svm",
        "xgboost",
    }


def test_stratifiable_single_class():
    pairs = [(Document(id=f"d{i}", text="same thing"), {1}) for i in range(6)]
    corpus = corpus_from_pairs(pairs, THREE_CLASS, split_tag="t")
    with pytest.raises(StratificationError, match="single class"):
        check_stratifiable(corpus, folds=3)


def test_stratifiable_small_class_names_offender():
    pairs = [(Document(id=f"a{i}", text="added new"), {1}) for i in range(5)]
    pairs += [(Document(id="b0", text="fixed bug"), {2}), (Document(id="b1", text="bug"), {2})]
    corpus = corpus_from_pairs(pairs, THREE_CLASS, split_tag="t")
    with pytest.raises(StratificationError, match="class 2 has only 2 members"):
        check_stratifiable(corpus, folds=3)


def test_stratifiable_passes_balanced_corpus():
    check_stratifiable(keyword_corpus(30, "t", seed=0), folds=3)


@pytest.mark.parametrize("family,trials", [("svm", 8), ("naive_bayes", 8), ("logistic_regression", 8)])
def test_search_separates_keyword_classes(tmp_path, family, trials):
    train = keyword_corpus(60, "train", seed=10)
    spec = SearchSpec(family=family, trials=trials)
    result = search(train, spec, out_dir=tmp_path)
    assert result.cv_macro_f1 >= 0.9
    assert result.config["family"] == family
    assert len(result.trials) == trials


def test_search_random_forest_small_budget(tmp_path):
    train = keyword_corpus(60, "train", seed=11)
    result = search(train, SearchSpec(family="random_forest", trials=4), out_dir=tmp_path)
    assert result.cv_macro_f1 >= 0.9


def test_search_config_contents(tmp_path):
    train = keyword_corpus(45, "train", seed=12)
    result = search(train, SearchSpec(family="svm", trials=4), out_dir=tmp_path)
    config = json.loads(result.best_config_path.read_text(encoding="utf-8"))
    assert set(config) >= {
        "family",
        "feature",
        "params",
        "cv_macro_f1",
        "fold_scores",
        "trial",
        "trials",
        "folds",
        "seed",
        "scheme",
    }
    assert config["trials"] == 4 and config["folds"] == 3 and config["seed"] == 94032
    assert len(config["fold_scores"]) == 3
    assert config["scheme"]["kind"] == "single_label"
    assert config["scheme"]["classes"] == [1, 2, 3]


def test_search_trial_log_layout(tmp_path):
    train = keyword_corpus(45, "train", seed=13)
    result = search(train, SearchSpec(family="knn", trials=5), out_dir=tmp_path)
    with result.trial_log_path.open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "trial",
        "cv_macro_f1",
        "fold1_f1",
        "fold2_f1",
        "fold3_f1",
        "error",
        "feature",
        "params",
    ]
    assert len(rows) == 1 + 5
    for row in rows[1:]:
        json.loads(row[6])
        json.loads(row[7])


def test_search_deterministic_outputs(tmp_path):
    train = keyword_corpus(45, "train", seed=14)
    spec = SearchSpec(family="svm", trials=6)
    a = search(train, spec, out_dir=tmp_path / "a")
    b = search(train, spec, out_dir=tmp_path / "b")
    assert a.best_config_path.read_bytes() == b.best_config_path.read_bytes()
    assert a.trial_log_path.read_bytes() == b.trial_log_path.read_bytes()


def test_search_seed_changes_sampled_trials(tmp_path):
    train = keyword_corpus(45, "train", seed=15)
    a = search(train, SearchSpec(family="svm", trials=6), out_dir=tmp_path / "a")
    b = search(train, SearchSpec(family="svm", trials=6, seed=7), out_dir=tmp_path / "b")
    assert [t.params for t in a.trials] != [t.params for t in b.trials]


def test_search_parallel_matches_serial(tmp_path):
    train = keyword_corpus(45, "train", seed=16)
    spec = SearchSpec(family="logistic_regression", trials=6)
    serial = search(train, spec, out_dir=tmp_path / "s", workers=1)
    parallel = search(train, spec, out_dir=tmp_path / "p", workers=2)
    assert serial.best_config_path.read_bytes() == parallel.best_config_path.read_bytes()
    assert serial.trial_log_path.read_bytes() == parallel.trial_log_path.read_bytes()


def test_search_isolates_failing_trials(tmp_path):
    # 24 docs -> 16-doc training folds, so sampled n_neighbors above 16 cannot fit
    train = keyword_corpus(24, "train", seed=17)
    result = search(train, SearchSpec(family="knn", trials=10), out_dir=tmp_path)
    errors = [t for t in result.trials if t.error is not None]
    scored = [t for t in result.trials if t.error is None]
    assert errors and scored
    # the winner comes from the surviving pool
    assert result.config["trial"] in {t.index for t in scored}
    with result.trial_log_path.open(encoding="utf-8") as fh:
        rows = {int(r["trial"]): r for r in csv.DictReader(fh)}
    for t in errors:
        assert rows[t.index]["cv_macro_f1"] == ""
        assert rows[t.index]["error"]
    for t in scored:
        assert rows[t.index]["error"] == ""


def test_search_all_trials_failing_raises(tmp_path):
    # punctuation-only texts leave the vectorizer with an empty vocabulary
    pairs = [(Document(id=f"d{i}", text=". . ."), {1 + i % 2}) for i in range(8)]
    scheme = TaskScheme(kind="single_label", classes=(1, 2), innovative_classes=frozenset())
    train = corpus_from_pairs(pairs, scheme, split_tag="t")
    with pytest.raises(SearchFailed, match="all 4 trials failed"):
        search(train, SearchSpec(family="svm", trials=4), out_dir=tmp_path)


def test_search_embedding_features(tmp_path, vectors_cache):
    train = keyword_corpus(45, "train", seed=18)
    spec = SearchSpec(
        family="svm",
        feature_kind=PRETRAINED_EMBEDDING,
        embedding_variant="42B-300d",
        trials=4,
    )
    result = search(train, spec, out_dir=tmp_path, embeddings_cache=vectors_cache)
    assert result.cv_macro_f1 >= 0.9
    assert result.config["feature"]["kind"] == PRETRAINED_EMBEDDING
    assert result.config["feature"]["variant"] == "42B-300d"
    # every trial reuses the fixed embedding feature; only params vary
    assert all(t.feature == result.trials[0].feature for t in result.trials)


def test_search_embedding_deterministic(tmp_path, vectors_cache):
    train = keyword_corpus(45, "train", seed=19)
    spec = SearchSpec(
        family="logistic_regression",
        feature_kind=PRETRAINED_EMBEDDING,
        embedding_variant="6B-100d",
        trials=4,
    )
    a = search(train, spec, out_dir=tmp_path / "a", embeddings_cache=vectors_cache)
    b = search(train, spec, out_dir=tmp_path / "b", embeddings_cache=vectors_cache)
    assert a.trial_log_path.read_bytes() == b.trial_log_path.read_bytes()


def test_search_multilabel_one_vs_rest(tmp_path):
    train = multilabel_corpus(40, "train", seed=20)
    result = search(train, SearchSpec(family="logistic_regression", trials=5), out_dir=tmp_path)
    assert result.cv_macro_f1 >= 0.8
    assert result.config["scheme"]["kind"] == "multi_label"


def test_search_requires_labels():
    from innolens import LabeledCorpus, MissingLabel

    corpus = LabeledCorpus(
        documents=(Document(id="d0", text="added new feature"),),
        truth={"d0": frozenset()},
        scheme=THREE_CLASS,
        split_tag="t",
    )
    with pytest.raises(MissingLabel):
        search(corpus, SearchSpec(family="svm", trials=1))


@pytest.mark.skipif(HAVE_XGBOOST, reason="xgboost installed; nothing to refuse")
def test_xgboost_family_unavailable_without_package():
    with pytest.raises(UnavailableFamily, match="xgboost"):
        SearchSpec(family="xgboost")
