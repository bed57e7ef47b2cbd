"""Fine-tune encoder language models and export eval predictions.

Inputs are tokenized with truncation and padding to a fixed 512 tokens.
Single-label runs train with cross-entropy on class indices; multi-label
runs use a sigmoid output with binary cross-entropy on multi-hot targets,
thresholded at 0.5. Each trial fine-tunes a fresh copy of the checkpoint;
the trial with the best eval macro-F1 (scored by the innolens metrics
module) is exported.

torch and transformers are optional dependencies; importing this module
without them is fine, running it is not.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from innolens import LabeledCorpus, multiclass_report, multilabel_report, write_cleaned

from .errors import UnavailableFamily, WeightsUnavailable
from .families import PLM_TRIALS, _int_range, _log_uniform, _choice
from .records import MULTI_LABEL, decode_one_vs_rest, prediction_rows, targets

try:
    import torch
except ImportError:  # pragma: no cover - exercised only without the extra
    torch = None

MAX_LENGTH = 512

PLM_FAMILIES: dict[str, str] = {
    "bert": "bert-base-cased",
    "roberta": "roberta-base",
    "xlnet": "xlnet-base-cased",
    "electra": "google/electra-base-discriminator",
}


@dataclass(frozen=True)
class PlmTrial:
    index: int
    params: dict
    eval_macro_f1: float


@dataclass(frozen=True)
class PlmResult:
    rows: list[dict]
    trials: tuple[PlmTrial, ...]
    best_trial: int
    checkpoint: str


def _require_packages() -> None:
    if torch is None:
        raise UnavailableFamily(
            "the plm path needs the optional torch and transformers packages "
            "(pip install 'innolens-harness[plm]')"
        )
    try:
        import transformers  # noqa: F401
    except ImportError as exc:
        raise UnavailableFamily(
            "the plm path needs the optional torch and transformers packages "
            "(pip install 'innolens-harness[plm]')"
        ) from exc


def sample_plm_params(rng: np.random.Generator) -> dict:
    return {
        "learning_rate": _log_uniform(rng, 1e-5, 5e-5),
        "batch_size": int(_choice(rng, (8, 16))),
        "num_train_epochs": _int_range(rng, 3, 5),
        "weight_decay": float(rng.uniform(0.0, 0.01)),
    }


def resolve_checkpoint(model_id: str) -> str:
    """Family token -> pinned checkpoint; anything else is used verbatim."""
    return PLM_FAMILIES.get(model_id, model_id)


def _load_tokenizer(checkpoint: str):
    from transformers import AutoTokenizer

    try:
        return AutoTokenizer.from_pretrained(checkpoint)
    except (OSError, ValueError) as exc:
        raise WeightsUnavailable(
            f"could not fetch pretrained weights for {checkpoint!r}: {exc}; "
            "pass a local checkpoint directory to run offline"
        ) from exc


def _load_model(checkpoint: str, n_classes: int, multilabel: bool):
    from transformers import AutoModelForSequenceClassification

    problem = "multi_label_classification" if multilabel else "single_label_classification"
    try:
        return AutoModelForSequenceClassification.from_pretrained(
            checkpoint, num_labels=n_classes, problem_type=problem
        )
    except (OSError, ValueError) as exc:
        raise WeightsUnavailable(
            f"could not fetch pretrained weights for {checkpoint!r}: {exc}; "
            "pass a local checkpoint directory to run offline"
        ) from exc


def encode_texts(tokenizer, texts: list[str], max_length: int = MAX_LENGTH):
    return tokenizer(
        texts,
        truncation=True,
        padding="max_length",
        max_length=max_length,
        return_tensors="pt",
    )


def _finetune(model, encodings, y: np.ndarray, params: dict, seed: int, multilabel: bool):
    torch.manual_seed(seed)
    labels = torch.tensor(y, dtype=torch.float32 if multilabel else torch.int64)
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=params["learning_rate"],
        weight_decay=params["weight_decay"],
    )
    shuffler = torch.Generator().manual_seed(seed)
    n = labels.shape[0]
    batch = params["batch_size"]
    model.train()
    for _ in range(params["num_train_epochs"]):
        order = torch.randperm(n, generator=shuffler)
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            optimizer.zero_grad()
            output = model(
                input_ids=encodings["input_ids"][idx],
                attention_mask=encodings["attention_mask"][idx],
                labels=labels[idx],
            )
            output.loss.backward()
            optimizer.step()
    return model


def _predict(model, encodings, multilabel: bool, batch: int = 16) -> np.ndarray:
    model.eval()
    outputs = []
    n = encodings["input_ids"].shape[0]
    with torch.no_grad():
        for start in range(0, n, batch):
            logits = model(
                input_ids=encodings["input_ids"][start : start + batch],
                attention_mask=encodings["attention_mask"][start : start + batch],
            ).logits
            if multilabel:
                outputs.append((torch.sigmoid(logits) > 0.5).to(torch.int64))
            else:
                outputs.append(logits.argmax(dim=1))
    return torch.cat(outputs).numpy()


def _label_sets(predicted: np.ndarray, scheme, multilabel: bool) -> list[frozenset[int]]:
    if multilabel:
        return [decode_one_vs_rest(row, scheme) for row in predicted]
    return [frozenset({scheme.classes[int(i)]}) for i in predicted]


def _score(rows: list[dict], eval_corpus: LabeledCorpus) -> float:
    preds = {row["custom_id"]: frozenset(row["labels"]) for row in rows}
    truth = {doc.id: eval_corpus.labels_of(doc.id) for doc in eval_corpus}
    scheme = eval_corpus.scheme
    if scheme.kind == MULTI_LABEL:
        return multilabel_report(preds, truth, scheme).macro_f1
    return multiclass_report(preds, truth, scheme).macro_f1


def plm_finetune_eval(
    model_id: str,
    train: LabeledCorpus,
    eval_corpus: LabeledCorpus,
    trials: int | None = None,
    seed: int = 94032,
    out_path: str | Path | None = None,
    trial_log_path: str | Path | None = None,
    max_length: int = MAX_LENGTH,
) -> PlmResult:
    """Randomized fine-tuning trials; export the best trial's predictions.

    Trial selection scores each fine-tuned model on the eval corpus, so the
    eval corpus must be labeled.
    """
    _require_packages()
    train.require_labels()
    eval_corpus.require_labels()
    checkpoint = resolve_checkpoint(model_id)
    scheme = train.scheme
    multilabel = scheme.kind == MULTI_LABEL
    n_classes = len(scheme.classes)
    y = targets(train)

    tokenizer = _load_tokenizer(checkpoint)
    train_enc = encode_texts(tokenizer, [d.text for d in train], max_length)
    eval_enc = encode_texts(tokenizer, [d.text for d in eval_corpus], max_length)
    eval_ids = [d.id for d in eval_corpus]

    rng = np.random.default_rng(seed)
    budget = PLM_TRIALS if trials is None else trials
    sampled = [sample_plm_params(rng) for _ in range(budget)]

    results: list[PlmTrial] = []
    rows_by_trial: list[list[dict]] = []
    for index, params in enumerate(sampled):
        # the classification head is freshly initialized from the global RNG
        torch.manual_seed(seed)
        model = _load_model(checkpoint, n_classes, multilabel)
        _finetune(model, train_enc, y, params, seed, multilabel)
        predicted = _predict(model, eval_enc, multilabel)
        rows = prediction_rows(eval_ids, _label_sets(predicted, scheme, multilabel), scheme)
        results.append(PlmTrial(index, params, _score(rows, eval_corpus)))
        rows_by_trial.append(rows)

    best = sorted(results, key=lambda t: (-t.eval_macro_f1, t.index))[0]
    rows = rows_by_trial[best.index]
    if out_path is not None:
        write_cleaned(rows, out_path)
    if trial_log_path is not None:
        _write_trial_log(results, trial_log_path)
    return PlmResult(
        rows=rows, trials=tuple(results), best_trial=best.index, checkpoint=checkpoint
    )


def _write_trial_log(results: list[PlmTrial], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "eval_macro_f1", "params"])
        for t in results:
            writer.writerow([t.index, "%.6f" % t.eval_macro_f1, json.dumps(t.params, sort_keys=True)])
