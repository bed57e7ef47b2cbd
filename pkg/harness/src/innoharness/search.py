"""Randomized hyperparameter search with stratified cross-validation.

All trial parameters are drawn up front from one seeded generator, so a
fixed seed fixes the whole search regardless of worker count. Trials are
independent of each other and may run in separate processes; the only
shared output is the trial log.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import joblib
import numpy as np
from sklearn.metrics import f1_score
from sklearn.model_selection import KFold, StratifiedKFold
from sklearn.multiclass import OneVsRestClassifier

from innolens import LabeledCorpus, TaskScheme

from . import embeddings, textcnn
from .errors import ConfigMismatch, SearchFailed, StratificationError
from .records import MULTI_LABEL, targets as corpus_targets
from .families import (
    CLASSICAL_TRIALS,
    CNN_TRIALS,
    get_family,
    require_family_available,
)
from .features import (
    PRETRAINED_EMBEDDING,
    TERM_WEIGHTING,
    FeatureSpec,
    build_vectorizer,
    sample_term_weighting,
)

TRIAL_LOG_NAME = "trials.csv"
BEST_CONFIG_NAME = "best_config.json"


@dataclass(frozen=True)
class SearchSpec:
    """What to search: classifier family, feature representation, budget."""

    family: str
    feature_kind: str = TERM_WEIGHTING
    embedding_variant: str | None = None
    trials: int | None = None  # None picks the family default
    folds: int = 3
    seed: int = 94032

    def __post_init__(self) -> None:
        require_family_available(self.family)
        if self.feature_kind not in (TERM_WEIGHTING, PRETRAINED_EMBEDDING):
            raise ValueError(f"unknown feature kind: {self.feature_kind!r}")
        if self.feature_kind == PRETRAINED_EMBEDDING:
            if self.embedding_variant is None:
                raise ConfigMismatch(
                    "feature kind 'pretrained_embedding' needs an embedding variant; "
                    f"known: {', '.join(sorted(embeddings.EMBEDDING_VARIANTS))}"
                )
            if self.embedding_variant not in embeddings.EMBEDDING_VARIANTS:
                raise ConfigMismatch(
                    f"unknown embedding variant {self.embedding_variant!r}; "
                    f"known: {', '.join(sorted(embeddings.EMBEDDING_VARIANTS))}"
                )
        elif self.embedding_variant is not None:
            raise ConfigMismatch(
                "embedding_variant requires feature kind 'pretrained_embedding'"
            )
        if self.family == "cnn" and self.feature_kind != PRETRAINED_EMBEDDING:
            raise ConfigMismatch("the cnn family needs feature kind 'pretrained_embedding'")
        if self.family == "naive_bayes" and self.feature_kind != TERM_WEIGHTING:
            raise ConfigMismatch(
                "multinomial naive bayes needs term-weighting features (discrete counts)"
            )
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be positive")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")

    def resolved_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        return CNN_TRIALS if self.family == "cnn" else CLASSICAL_TRIALS


@dataclass(frozen=True)
class TrialResult:
    index: int
    feature: FeatureSpec
    params: dict
    fold_scores: tuple[float, ...] | None
    cv_macro_f1: float | None
    error: str | None


@dataclass(frozen=True)
class SearchResult:
    config: dict
    trials: tuple[TrialResult, ...]
    best_config_path: Path | None
    trial_log_path: Path | None

    @property
    def cv_macro_f1(self) -> float:
        return self.config["cv_macro_f1"]


def check_stratifiable(corpus: LabeledCorpus, folds: int) -> None:
    """Reject corpora that cannot be split into the requested stratified folds."""
    corpus.require_labels()
    members: dict[int, int] = {}
    for doc in corpus:
        for label in corpus.labels_of(doc.id):
            members[label] = members.get(label, 0) + 1
    if len(members) < 2:
        raise StratificationError(
            "train corpus has a single class; stratified search needs at least two"
        )
    for label in sorted(members):
        if members[label] < folds:
            raise StratificationError(
                f"class {label} has only {members[label]} members; "
                f"{folds}-fold stratification needs at least {folds} per class"
            )


def _fold_indices(targets: np.ndarray, multilabel: bool, folds: int, seed: int):
    if multilabel:
        # sklearn has no stratified splitter for multi-hot targets
        splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    else:
        splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return [
        (np.asarray(tr), np.asarray(te))
        for tr, te in splitter.split(np.zeros(len(targets)), targets)
    ]


def _macro_f1(y_true: np.ndarray, y_pred: np.ndarray, multilabel: bool, n_classes: int) -> float:
    if multilabel:
        return float(f1_score(y_true, y_pred, average="macro", zero_division=0))
    return float(
        f1_score(
            y_true, y_pred, average="macro", labels=list(range(n_classes)), zero_division=0
        )
    )


def build_estimator(family_name: str, params: dict, seed: int, multilabel: bool):
    try:
        estimator = get_family(family_name).build(dict(params), seed)
    except TypeError as exc:
        raise ConfigMismatch(f"params do not fit family {family_name!r}: {exc}") from exc
    if multilabel:
        return OneVsRestClassifier(estimator)
    return estimator


def _classical_fold_scores(
    texts: list[str],
    targets: np.ndarray,
    fold_indices,
    family_name: str,
    feature: FeatureSpec,
    params: dict,
    seed: int,
    multilabel: bool,
    n_classes: int,
    doc_matrix: np.ndarray | None,
) -> tuple[float, ...]:
    scores = []
    for train_idx, test_idx in fold_indices:
        if feature.kind == TERM_WEIGHTING:
            vectorizer = build_vectorizer(feature)
            x_train = vectorizer.fit_transform([texts[i] for i in train_idx])
            x_test = vectorizer.transform([texts[i] for i in test_idx])
        else:
            x_train, x_test = doc_matrix[train_idx], doc_matrix[test_idx]
        estimator = build_estimator(family_name, params, seed, multilabel)
        estimator.fit(x_train, targets[train_idx])
        scores.append(
            _macro_f1(targets[test_idx], estimator.predict(x_test), multilabel, n_classes)
        )
    return tuple(scores)


def _evaluate_trial(
    index: int,
    feature: FeatureSpec,
    params: dict,
    texts: list[str],
    targets: np.ndarray,
    fold_indices,
    family_name: str,
    seed: int,
    multilabel: bool,
    n_classes: int,
    doc_matrix: np.ndarray | None,
    vectors_table: dict | None,
    vectors_dim: int,
    vectors_lowercase: bool,
) -> TrialResult:
    try:
        if family_name == "cnn":
            fold_scores = textcnn.cv_scores(
                texts,
                targets,
                fold_indices,
                params,
                seed,
                multilabel,
                n_classes,
                vectors_table,
                vectors_dim,
                vectors_lowercase,
            )
        else:
            fold_scores = _classical_fold_scores(
                texts,
                targets,
                fold_indices,
                family_name,
                feature,
                params,
                seed,
                multilabel,
                n_classes,
                doc_matrix,
            )
    except Exception as exc:
        return TrialResult(index, feature, params, None, None, f"{type(exc).__name__}: {exc}")
    mean = float(np.mean(fold_scores))
    return TrialResult(index, feature, params, tuple(fold_scores), mean, None)


def _sample_trials(spec: SearchSpec, rng: np.random.Generator) -> list[tuple[FeatureSpec, dict]]:
    fixed_feature = None
    if spec.feature_kind == PRETRAINED_EMBEDDING:
        fixed_feature = FeatureSpec(kind=PRETRAINED_EMBEDDING, variant=spec.embedding_variant)
    out = []
    for _ in range(spec.resolved_trials()):
        feature = fixed_feature or sample_term_weighting(rng)
        if spec.family == "cnn":
            params = textcnn.sample_cnn_params(rng)
        else:
            params = get_family(spec.family).sample(rng)
        out.append((feature, params))
    return out


def _scheme_dict(scheme: TaskScheme) -> dict:
    return {
        "kind": scheme.kind,
        "classes": list(scheme.classes),
        "innovative_classes": sorted(scheme.innovative_classes),
        "fallback_label": scheme.fallback_label,
    }


def search(
    train: LabeledCorpus,
    spec: SearchSpec,
    out_dir: str | Path | None = None,
    workers: int = 1,
    embeddings_cache: str | Path | None = None,
) -> SearchResult:
    """Run the randomized search and persist the best configuration.

    Returns the best configuration with its cross-validated macro-F1; when
    out_dir is given, also writes the trial log CSV and best-config JSON.
    """
    check_stratifiable(train, spec.folds)
    multilabel = train.scheme.kind == MULTI_LABEL
    n_classes = len(train.scheme.classes)
    texts = [doc.text for doc in train]
    targets = corpus_targets(train)
    fold_indices = _fold_indices(targets, multilabel, spec.folds, spec.seed)

    doc_matrix = None
    vectors_table = None
    vectors_dim = 0
    vectors_lowercase = True
    if spec.feature_kind == PRETRAINED_EMBEDDING:
        variant = embeddings.EMBEDDING_VARIANTS[spec.embedding_variant]
        vectors_dim, vectors_lowercase = variant.dim, variant.lowercase
        path = embeddings.fetch(spec.embedding_variant, embeddings_cache)
        vectors_table = embeddings.load_vectors(path, variant.dim)
        if spec.family != "cnn":
            # document vectors are fit-free, so they are precomputed once
            doc_matrix = embeddings.document_vectors(
                texts, vectors_table, variant.dim, lowercase=variant.lowercase
            )
            vectors_table = None

    sampled = _sample_trials(spec, np.random.default_rng(spec.seed))
    args = [
        (
            i,
            feature,
            params,
            texts,
            targets,
            fold_indices,
            spec.family,
            spec.seed,
            multilabel,
            n_classes,
            doc_matrix,
            vectors_table,
            vectors_dim,
            vectors_lowercase,
        )
        for i, (feature, params) in enumerate(sampled)
    ]
    if workers > 1:
        trials = joblib.Parallel(n_jobs=workers)(
            joblib.delayed(_evaluate_trial)(*a) for a in args
        )
    else:
        trials = [_evaluate_trial(*a) for a in args]

    scored = [t for t in trials if t.error is None]
    if not scored:
        first = trials[0].error
        raise SearchFailed(f"all {len(trials)} trials failed; first error: {first}")
    best = sorted(scored, key=lambda t: (-t.cv_macro_f1, t.index))[0]

    config = {
        "family": spec.family,
        "feature": best.feature.to_dict(),
        "params": best.params,
        "cv_macro_f1": best.cv_macro_f1,
        "fold_scores": list(best.fold_scores),
        "trial": best.index,
        "trials": spec.resolved_trials(),
        "folds": spec.folds,
        "seed": spec.seed,
        "scheme": _scheme_dict(train.scheme),
    }

    best_path = log_path = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        log_path = out / TRIAL_LOG_NAME
        write_trial_log(trials, spec.folds, log_path)
        best_path = out / BEST_CONFIG_NAME
        best_path.write_text(json.dumps(config, indent=1) + "\n", encoding="utf-8")
    return SearchResult(
        config=config,
        trials=tuple(trials),
        best_config_path=best_path,
        trial_log_path=log_path,
    )


def write_trial_log(trials, folds: int, path: str | Path) -> None:
    header = ["trial", "cv_macro_f1"]
    header += [f"fold{i + 1}_f1" for i in range(folds)]
    header += ["error", "feature", "params"]
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in trials:
            if t.error is None:
                row = [t.index, "%.6f" % t.cv_macro_f1]
                row += ["%.6f" % s for s in t.fold_scores]
                row += [""]
            else:
                row = [t.index, ""] + [""] * folds + [t.error]
            row.append(json.dumps(t.feature.to_dict(), sort_keys=True))
            row.append(json.dumps(t.params, sort_keys=True))
            writer.writerow(row)
