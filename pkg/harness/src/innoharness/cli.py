"""Command line interface for the benchmark harness."""

from __future__ import annotations

import json
from pathlib import Path

import click

from innolens import (
    BUILTIN_SCHEMES,
    EmptyCorpus,
    LabeledCorpus,
    MissingLabel,
    TaskScheme,
    load_corpus,
    multiclass_report,
    multilabel_report,
    predictions_from_cleaned,
)

from .errors import (
    ConfigMismatch,
    EmbeddingUnavailable,
    IntegrityError,
    SearchFailed,
    StratificationError,
    UnavailableFamily,
    WeightsUnavailable,
)
from .families import classifier_families
from .features import PRETRAINED_EMBEDDING, TERM_WEIGHTING
from .plm import PLM_FAMILIES, plm_finetune_eval
from .predict import fit_predict
from .search import SearchSpec, search as run_search

_DOMAIN_ERRORS = (
    ConfigMismatch,
    EmbeddingUnavailable,
    EmptyCorpus,
    IntegrityError,
    MissingLabel,
    SearchFailed,
    StratificationError,
    UnavailableFamily,
    WeightsUnavailable,
    # scheme/config/vectors-file validation failures surface as ValueError
    ValueError,
)

_FAMILY_CHOICES = tuple(classifier_families()) + ("cnn",)


def _resolve_scheme(token: str) -> TaskScheme:
    if token in BUILTIN_SCHEMES:
        return BUILTIN_SCHEMES[token]
    path = Path(token)
    if path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return TaskScheme(
                kind=data["kind"],
                classes=tuple(int(c) for c in data["classes"]),
                innovative_classes=frozenset(int(c) for c in data.get("innovative_classes", ())),
                fallback_label=int(data.get("fallback_label", -1)),
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise click.ClickException(f"bad scheme file {token}: {exc}") from exc
    raise click.ClickException(
        f"unknown task {token!r}: not a builtin scheme "
        f"({', '.join(sorted(BUILTIN_SCHEMES))}) or a scheme JSON file"
    )


def _read_corpus(path: str, scheme: TaskScheme, tag: str) -> LabeledCorpus:
    try:
        return load_corpus(path, scheme, split_tag=tag)
    except (ValueError, MissingLabel) as exc:
        raise click.ClickException(str(exc)) from exc


def _feature_kind(features: str | None, family: str) -> tuple[str, str | None]:
    # the cnn family always runs over pretrained word vectors
    if features is None:
        features = "42B-300d" if family == "cnn" else "term_weighting"
    if features == "term_weighting":
        return TERM_WEIGHTING, None
    return PRETRAINED_EMBEDDING, features


def _echo_score(rows: list[dict], corpus: LabeledCorpus) -> None:
    if not corpus.is_fully_labeled():
        return
    preds = predictions_from_cleaned(rows)
    truth = {doc.id: corpus.labels_of(doc.id) for doc in corpus}
    if corpus.scheme.kind == "multi_label":
        report = multilabel_report(preds, truth, corpus.scheme)
    else:
        report = multiclass_report(preds, truth, corpus.scheme)
    click.echo(f"eval macro-F1 {report.macro_f1:.6f} over {len(truth)} documents")


@click.group()
@click.version_option(package_name="innolens-harness")
def main() -> None:
    """Benchmark classical, convolutional, and transformer text classifiers.

    Reads the innolens corpus format and writes predictions in the innolens
    cleaned-prediction format, so its metrics tooling scores every family.
    """


@main.command("search")
@click.option("--train", "train_path", required=True, type=click.Path(exists=True))
@click.option("--task", required=True, help="builtin scheme name or scheme JSON file")
@click.option("--family", required=True, type=click.Choice(_FAMILY_CHOICES))
@click.option(
    "--features",
    default=None,
    help="'term_weighting' (default) or an embedding variant id; cnn defaults to 42B-300d",
)
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--trials", type=int, default=None, help="override the family's trial budget")
@click.option("--folds", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=94032, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--embeddings-dir", type=click.Path(), default=None)
def search_command(
    train_path: str,
    task: str,
    family: str,
    features: str | None,
    out_dir: str,
    trials: int | None,
    folds: int,
    seed: int,
    workers: int,
    embeddings_dir: str | None,
) -> None:
    """Randomized hyperparameter search with stratified cross-validation."""
    scheme = _resolve_scheme(task)
    train = _read_corpus(train_path, scheme, "train")
    kind, variant = _feature_kind(features, family)
    try:
        spec = SearchSpec(
            family=family,
            feature_kind=kind,
            embedding_variant=variant,
            trials=trials,
            folds=folds,
            seed=seed,
        )
        result = run_search(
            train, spec, out_dir=out_dir, workers=workers, embeddings_cache=embeddings_dir
        )
    except _DOMAIN_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc
    failed = sum(1 for t in result.trials if t.error is not None)
    click.echo(f"{len(result.trials)} trials, {failed} failed")
    click.echo(f"best trial {result.config['trial']}: cv macro-F1 {result.cv_macro_f1:.6f}")
    click.echo(f"wrote {result.trial_log_path}")
    click.echo(f"wrote {result.best_config_path}")


@main.command("fit-predict")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--train", "train_path", required=True, type=click.Path(exists=True))
@click.option("--eval", "eval_path", required=True, type=click.Path(exists=True))
@click.option("--task", required=True, help="builtin scheme name or scheme JSON file")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--embeddings-dir", type=click.Path(), default=None)
def fit_predict_command(
    config_path: str,
    train_path: str,
    eval_path: str,
    task: str,
    out_path: str,
    embeddings_dir: str | None,
) -> None:
    """Refit the best configuration and write eval predictions."""
    scheme = _resolve_scheme(task)
    train = _read_corpus(train_path, scheme, "train")
    eval_corpus = _read_corpus(eval_path, scheme, "eval")
    try:
        rows = fit_predict(
            config_path, train, eval_corpus, out_path=out_path, embeddings_cache=embeddings_dir
        )
    except _DOMAIN_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {len(rows)} predictions to {out_path}")
    _echo_score(rows, eval_corpus)


@main.command("plm-eval")
@click.option(
    "--model",
    required=True,
    help=f"model family ({', '.join(sorted(PLM_FAMILIES))}) or a checkpoint path",
)
@click.option("--train", "train_path", required=True, type=click.Path(exists=True))
@click.option("--eval", "eval_path", required=True, type=click.Path(exists=True))
@click.option("--task", required=True, help="builtin scheme name or scheme JSON file")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--trials", type=int, default=None, help="override the 5-trial budget")
@click.option("--seed", type=int, default=94032, show_default=True)
@click.option("--trial-log", "trial_log_path", type=click.Path(), default=None)
def plm_eval_command(
    model: str,
    train_path: str,
    eval_path: str,
    task: str,
    out_path: str,
    trials: int | None,
    seed: int,
    trial_log_path: str | None,
) -> None:
    """Fine-tune an encoder language model and write eval predictions."""
    scheme = _resolve_scheme(task)
    train = _read_corpus(train_path, scheme, "train")
    eval_corpus = _read_corpus(eval_path, scheme, "eval")
    try:
        result = plm_finetune_eval(
            model,
            train,
            eval_corpus,
            trials=trials,
            seed=seed,
            out_path=out_path,
            trial_log_path=trial_log_path,
        )
    except _DOMAIN_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc
    best = result.trials[result.best_trial]
    click.echo(f"best trial {best.index}: eval macro-F1 {best.eval_macro_f1:.6f}")
    click.echo(f"wrote {len(result.rows)} predictions to {out_path}")


if __name__ == "__main__":
    main()
