"""Refit the best configuration on the full train split and predict a corpus."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from innolens import LabeledCorpus, TaskScheme, write_cleaned

from . import embeddings, textcnn
from .errors import ConfigMismatch
from .families import require_family_available
from .features import (
    PRETRAINED_EMBEDDING,
    TERM_WEIGHTING,
    FeatureSpec,
    build_vectorizer,
    feature_spec_from_dict,
)
from .records import MULTI_LABEL, decode_one_vs_rest, prediction_rows, targets
from .search import build_estimator

_REQUIRED_KEYS = ("family", "feature", "params", "scheme")


def load_config(source: Mapping | str | Path) -> dict:
    if isinstance(source, (str, Path)):
        source = json.loads(Path(source).read_text(encoding="utf-8"))
    config = dict(source)
    missing = [k for k in _REQUIRED_KEYS if k not in config]
    if missing:
        raise ConfigMismatch(f"configuration is missing fields: {', '.join(missing)}")
    return config


def _check_scheme(config: dict, scheme: TaskScheme, role: str) -> None:
    declared = config["scheme"]
    if declared.get("kind") != scheme.kind:
        raise ConfigMismatch(
            f"configuration is for {declared.get('kind')!r} tasks; "
            f"{role} corpus scheme is {scheme.kind!r}"
        )
    if list(declared.get("classes", [])) != list(scheme.classes):
        raise ConfigMismatch(
            f"configuration classes {declared.get('classes')} do not match "
            f"{role} corpus scheme classes {list(scheme.classes)}"
        )
    if declared.get("fallback_label", -1) != scheme.fallback_label:
        raise ConfigMismatch(
            f"configuration fallback label {declared.get('fallback_label')} does not "
            f"match {role} corpus scheme fallback {scheme.fallback_label}"
        )


def _check_feature(family: str, feature: FeatureSpec) -> None:
    if family == "naive_bayes" and feature.kind != TERM_WEIGHTING:
        raise ConfigMismatch(
            "multinomial naive bayes needs term-weighting features (discrete counts)"
        )
    if family == "cnn" and feature.kind != PRETRAINED_EMBEDDING:
        raise ConfigMismatch("the cnn family needs feature kind 'pretrained_embedding'")


def fit_predict(
    config: Mapping | str | Path,
    train: LabeledCorpus,
    eval_corpus: LabeledCorpus,
    out_path: str | Path | None = None,
    embeddings_cache: str | Path | None = None,
) -> list[dict]:
    """Train the configured model on train and predict every eval document.

    Returns the prediction rows (cleaned-prediction schema) and writes them
    as JSON Lines when out_path is given.
    """
    config = load_config(config)
    family = config["family"]
    require_family_available(family)
    feature = feature_spec_from_dict(config["feature"])
    _check_feature(family, feature)
    _check_scheme(config, train.scheme, "train")
    _check_scheme(config, eval_corpus.scheme, "eval")
    scheme = train.scheme
    multilabel = scheme.kind == MULTI_LABEL
    n_classes = len(scheme.classes)
    seed = int(config.get("seed", 94032))
    params = dict(config["params"])

    train_texts = [doc.text for doc in train]
    eval_texts = [doc.text for doc in eval_corpus]
    y = targets(train)

    if family == "cnn":
        unknown = set(params) - set(textcnn.CNN_PARAM_NAMES)
        if unknown:
            raise ConfigMismatch(
                f"params do not fit family 'cnn': unknown keys {sorted(unknown)}"
            )
        variant = embeddings.EMBEDDING_VARIANTS[feature.variant]
        table = embeddings.load_vectors(
            embeddings.fetch(feature.variant, embeddings_cache), variant.dim
        )
        predicted = textcnn.fit_predict_texts(
            train_texts, y, eval_texts, params, seed, multilabel, n_classes,
            table, variant.dim, variant.lowercase,
        )
    else:
        if feature.kind == TERM_WEIGHTING:
            vectorizer = build_vectorizer(feature)
            x_train = vectorizer.fit_transform(train_texts)
            x_eval = vectorizer.transform(eval_texts)
        else:
            variant = embeddings.EMBEDDING_VARIANTS[feature.variant]
            table = embeddings.load_vectors(
                embeddings.fetch(feature.variant, embeddings_cache), variant.dim
            )
            x_train = embeddings.document_vectors(
                train_texts, table, variant.dim, lowercase=variant.lowercase
            )
            x_eval = embeddings.document_vectors(
                eval_texts, table, variant.dim, lowercase=variant.lowercase
            )
        estimator = build_estimator(family, params, seed, multilabel)
        estimator.fit(x_train, y)
        predicted = estimator.predict(x_eval)

    ids = [doc.id for doc in eval_corpus]
    if multilabel:
        label_sets = [decode_one_vs_rest(row, scheme) for row in predicted]
    else:
        label_sets = [frozenset({scheme.classes[int(i)]}) for i in predicted]
    rows = prediction_rows(ids, label_sets, scheme)
    if out_path is not None:
        write_cleaned(rows, out_path)
    return rows
