"""Classical classifier families and their search distributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.naive_bayes import MultinomialNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.svm import SVC

from .errors import UnavailableFamily

CLASSICAL_TRIALS = 50
CNN_TRIALS = 30
PLM_TRIALS = 5


def _choice(rng: np.random.Generator, options: tuple) -> object:
    return options[int(rng.integers(0, len(options)))]


def _int_range(rng: np.random.Generator, lo: int, hi: int) -> int:
    # stated integer ranges are inclusive on both ends
    return int(rng.integers(lo, hi, endpoint=True))


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def _sample_random_forest(rng: np.random.Generator) -> dict:
    return {
        "n_estimators": _int_range(rng, 50, 500),
        "max_depth": _int_range(rng, 5, 100),
        "min_samples_split": _int_range(rng, 2, 20),
        "min_samples_leaf": _int_range(rng, 1, 10),
        "max_features": float(rng.uniform(0.1, 1.0)),
        "criterion": _choice(rng, ("gini", "entropy")),
        "bootstrap": bool(_choice(rng, (True, False))),
    }


def _sample_logistic_regression(rng: np.random.Generator) -> dict:
    return {
        "C": _log_uniform(rng, 0.01, 10.0),
        "penalty": "l2",
        "solver": _choice(rng, ("lbfgs", "saga")),
    }


def _sample_knn(rng: np.random.Generator) -> dict:
    return {
        "n_neighbors": _int_range(rng, 1, 30),
        "weights": _choice(rng, ("uniform", "distance")),
        "leaf_size": _int_range(rng, 10, 50),
    }


def _sample_naive_bayes(rng: np.random.Generator) -> dict:
    return {
        "alpha": _log_uniform(rng, 1e-6, 1.0),
        "fit_prior": bool(_choice(rng, (True, False))),
    }


def _sample_svm(rng: np.random.Generator) -> dict:
    return {
        "C": _log_uniform(rng, 0.1, 10.0),
        "kernel": _choice(rng, ("linear", "rbf", "poly")),
        "gamma": _choice(rng, ("scale", "auto")),
        "degree": _int_range(rng, 2, 5),
    }


def _sample_xgboost(rng: np.random.Generator) -> dict:
    return {
        "n_estimators": _int_range(rng, 50, 500),
        "max_depth": _int_range(rng, 3, 10),
        "learning_rate": float(rng.uniform(0.01, 0.3)),
        "subsample": float(rng.uniform(0.5, 1.0)),
        "colsample_bytree": float(rng.uniform(0.5, 1.0)),
    }


def _build_xgboost(params: dict, seed: int):
    try:
        from xgboost import XGBClassifier
    except ImportError as exc:
        raise UnavailableFamily(
            "the xgboost family needs the optional xgboost package "
            "(pip install 'innolens-harness[xgboost]')"
        ) from exc
    return XGBClassifier(**params, random_state=seed, n_jobs=1)


@dataclass(frozen=True)
class Family:
    name: str
    sample: Callable[[np.random.Generator], dict]
    build: Callable[[dict, int], object]
    term_weighting_only: bool = False


CLASSICAL_FAMILIES: dict[str, Family] = {
    "random_forest": Family(
        name="random_forest",
        sample=_sample_random_forest,
        build=lambda p, seed: RandomForestClassifier(**p, random_state=seed, n_jobs=1),
    ),
    "logistic_regression": Family(
        name="logistic_regression",
        sample=_sample_logistic_regression,
        build=lambda p, seed: LogisticRegression(**p, max_iter=1000, random_state=seed),
    ),
    "knn": Family(
        name="knn",
        sample=_sample_knn,
        build=lambda p, seed: KNeighborsClassifier(**p),
    ),
    "naive_bayes": Family(
        name="naive_bayes",
        sample=_sample_naive_bayes,
        build=lambda p, seed: MultinomialNB(**p),
        term_weighting_only=True,
    ),
    "svm": Family(
        name="svm",
        sample=_sample_svm,
        build=lambda p, seed: SVC(**p, random_state=seed),
    ),
    "xgboost": Family(
        name="xgboost",
        sample=_sample_xgboost,
        build=_build_xgboost,
    ),
}


def classifier_families() -> tuple[str, ...]:
    return tuple(CLASSICAL_FAMILIES)


def get_family(name: str) -> Family:
    try:
        return CLASSICAL_FAMILIES[name]
    except KeyError:
        raise UnavailableFamily(
            f"unknown classifier family {name!r}; known: "
            f"{', '.join(classifier_families())} plus 'cnn'"
        ) from None


def require_family_available(name: str) -> None:
    """Fail fast when a family's optional backing package is missing."""
    if name == "xgboost":
        try:
            import xgboost  # noqa: F401
        except ImportError as exc:
            raise UnavailableFamily(
                "the xgboost family needs the optional xgboost package "
                "(pip install 'innolens-harness[xgboost]')"
            ) from exc
    elif name == "cnn":
        try:
            import torch  # noqa: F401
        except ImportError as exc:
            raise UnavailableFamily(
                "the cnn family needs the optional torch package "
                "(pip install 'innolens-harness[cnn]')"
            ) from exc
    elif name not in CLASSICAL_FAMILIES:
        raise UnavailableFamily(
            f"unknown classifier family {name!r}; known: "
            f"{', '.join(classifier_families())} plus 'cnn'"
        )
