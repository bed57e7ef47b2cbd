"""Cell execution with resume: build, submit, download, clean, score.

Artifacts land under the config's output directory:
batches/<cell>/run<i>.jsonl, raw/<cell>/run<i>.jsonl, cleaned/<cell>/run<i>.jsonl,
reports/<cell>.json|.csv, cache/ (provider results by job id), runledger.json.
A re-invocation picks each cell up at its recorded status; cached results are
never re-downloaded, and a cell failure never takes down its siblings.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from ..cleaning import clean_rows, predictions_from_cleaned, read_cleaned, write_cleaned
from ..corpus import LabeledCorpus, binarize_innovative, load_corpus
from ..metrics import (
    IdSetMismatch,
    binary_report,
    consistency_rate,
    multiclass_report,
    multilabel_report,
    report_to_csv,
    report_to_json,
)
from ..orchestrator.batch import (
    BatchJob,
    RequestConfig,
    build_batch,
    parse_custom_id,
    read_raw_rows,
    write_batch_file,
    write_raw_rows,
)
from ..orchestrator.mock import MockProvider
from ..orchestrator.providers import (
    AnthropicBatchAdapter,
    BatchClient,
    OpenAIStyleBatchAdapter,
    PermanentProviderError,
)
from ..prompts import load_builtin
from .config import ExperimentConfig
from .ledger import STATUSES, RunLedger
from .plan import PlanCell, plan

logger = logging.getLogger(__name__)

_RANK = {name: i for i, name in enumerate(STATUSES)}


@dataclass(frozen=True)
class OutputLayout:
    root: Path

    @property
    def batches(self) -> Path:
        return self.root / "batches"

    @property
    def raw(self) -> Path:
        return self.root / "raw"

    @property
    def cleaned(self) -> Path:
        return self.root / "cleaned"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    @property
    def cache(self) -> Path:
        return self.root / "cache"

    @property
    def ledger_path(self) -> Path:
        return self.root / "runledger.json"

    @property
    def plan_path(self) -> Path:
        return self.root / "plan.json"

    def create(self) -> "OutputLayout":
        for directory in (self.root, self.batches, self.raw, self.cleaned,
                          self.reports, self.cache):
            directory.mkdir(parents=True, exist_ok=True)
        return self


def output_layout(config: ExperimentConfig) -> OutputLayout:
    return OutputLayout(Path(config.output_dir)).create()


def default_adapters(config: ExperimentConfig) -> dict:
    """Adapters per provider name; the mock one is seeded from the config."""
    mock_settings = config.mock
    scheme = config.scheme()
    adapters: dict = {}
    if mock_settings is not None:
        adapters["mock"] = MockProvider(
            behavior=mock_settings.behavior,
            classes=scheme.classes,
            noise_rate=mock_settings.noise_rate,
            seed=config.seed,
        )
    adapters.setdefault("openai", OpenAIStyleBatchAdapter())
    adapters.setdefault(
        "mistral",
        OpenAIStyleBatchAdapter(
            base_url="https://api.mistral.ai/v1", api_key_env="MISTRAL_API_KEY"
        ),
    )
    adapters.setdefault("anthropic", AnthropicBatchAdapter())
    return adapters


def jobs_for_cell(
    cell: PlanCell, config: ExperimentConfig, corpus: LabeledCorpus
) -> list[BatchJob]:
    """Rebuildable request set for a cell; identical across invocations."""
    template = load_builtin(config.task, cell.variant)
    model = replace(cell.model, model_id=cell.effective_model_id)
    request_config = RequestConfig(
        temperature=cell.temperature,
        seed=config.seed,
        max_output_tokens=config.max_output_tokens,
        reasoning_effort=config.reasoning_effort if model.is_reasoning else None,
        message_role=config.message_role,
    )
    return build_batch(corpus, template, model, request_config, cell.run_count)


def _predictions_by_sample(rows: list[dict]) -> dict[str, frozenset[int]]:
    preds = {}
    for custom_id, labels in predictions_from_cleaned(rows).items():
        coord = parse_custom_id(custom_id)
        preds[coord.sample_id] = labels
    return preds


def score_cell(
    cell: PlanCell,
    config: ExperimentConfig,
    corpus: LabeledCorpus,
    layout: OutputLayout,
) -> dict:
    """Recompute a cell's metrics payload from its persisted cleaned predictions."""
    scheme = config.scheme()
    cleaned_dir = layout.cleaned / cell.slug
    runs = []
    for run_index in range(1, cell.run_count + 1):
        rows = read_cleaned(cleaned_dir / f"run{run_index}.jsonl")
        preds = _predictions_by_sample(rows)
        if set(preds) != {doc.id for doc in corpus}:
            raise IdSetMismatch(
                f"{cell.cell_id} run {run_index}: cleaned ids do not cover the corpus"
            )
        runs.append(preds)

    truth = {doc.id: corpus.labels_of(doc.id) for doc in corpus}
    if scheme.kind == "single_label":
        shape = "multiclass"
        main = multiclass_report(runs[0], truth, scheme)
    else:
        shape = "multilabel"
        main = multilabel_report(runs[0], truth, scheme)
    binary = binary_report(
        {i: binarize_innovative(runs[0][i], scheme) for i in truth},
        {i: binarize_innovative(truth[i], scheme) for i in truth},
    )
    rate = (
        consistency_rate(runs, mode=config.consistency_mode)
        if cell.run_count >= 2
        else None
    )
    return {
        "cell_id": cell.cell_id,
        "model_id": cell.effective_model_id,
        "train_variant": cell.train_variant,
        "variant": cell.variant,
        "temperature": cell.temperature,
        "shape": shape,
        "report": report_to_json(main, consistency_rate=rate),
        "binary": report_to_json(binary),
        "consistency_rate": rate,
    }


def _write_score_artifacts(cell, config, corpus, layout) -> None:
    import json

    payload = score_cell(cell, config, corpus, layout)
    scheme = config.scheme()
    (layout.reports / f"{cell.slug}.json").write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )
    # CSV view of the primary per-class report
    truth = {doc.id: corpus.labels_of(doc.id) for doc in corpus}
    rows = read_cleaned(layout.cleaned / cell.slug / "run1.jsonl")
    preds = _predictions_by_sample(rows)
    if scheme.kind == "single_label":
        main = multiclass_report(preds, truth, scheme)
    else:
        main = multilabel_report(preds, truth, scheme)
    report_to_csv(
        main,
        path=layout.reports / f"{cell.slug}.csv",
        consistency_rate=payload["consistency_rate"],
    )


def _run_cell(
    cell: PlanCell,
    config: ExperimentConfig,
    corpus: LabeledCorpus,
    layout: OutputLayout,
    ledger: RunLedger,
    client: BatchClient,
) -> None:
    ledger.ensure_cell(cell.cell_id)
    ledger.set_error(cell.cell_id, None)
    jobs = jobs_for_cell(cell, config, corpus)
    scheme = config.scheme()

    if _RANK[ledger.status(cell.cell_id)] < _RANK["downloaded"]:
        batch_dir = layout.batches / cell.slug
        batch_dir.mkdir(parents=True, exist_ok=True)
        for job in jobs:
            write_batch_file(job, batch_dir / f"run{job.run_index}.jsonl")
        # ensure a handle (or cached rows) per job, then mark submitted
        for job in jobs:
            if client.cached_rows(job) is not None:
                ledger.record_job(cell.cell_id, job.run_index, job.job_id, None)
                continue
            handle = ledger.job_handle(cell.cell_id, job.run_index)
            if handle is None:
                handle = client.submit(job)
                ledger.record_job(cell.cell_id, job.run_index, job.job_id, handle)
        ledger.set_status(cell.cell_id, "submitted")

        raw_dir = layout.raw / cell.slug
        raw_dir.mkdir(parents=True, exist_ok=True)
        for job in jobs:
            rows = client.cached_rows(job)
            if rows is None:
                handle = ledger.job_handle(cell.cell_id, job.run_index)
                if handle is None:
                    handle = client.submit(job)
                    ledger.record_job(cell.cell_id, job.run_index, job.job_id, handle)
                status = client.wait(handle)
                if status.state == "failed":
                    # stale handle (e.g. provider restarted): one resubmission
                    handle = client.submit(job)
                    ledger.record_job(cell.cell_id, job.run_index, job.job_id, handle)
                    status = client.wait(handle)
                if status.state != "done":
                    raise PermanentProviderError(
                        f"job {job.job_id} failed: {status.detail}"
                    )
                rows = client.download(job, handle)
            write_raw_rows(rows, raw_dir / f"run{job.run_index}.jsonl")
        ledger.set_status(cell.cell_id, "downloaded")

    if _RANK[ledger.status(cell.cell_id)] < _RANK["cleaned"]:
        clean_cell(cell, config, layout)
        ledger.set_status(cell.cell_id, "cleaned")

    if _RANK[ledger.status(cell.cell_id)] < _RANK["scored"]:
        _write_score_artifacts(cell, config, corpus, layout)
        ledger.set_status(cell.cell_id, "scored")


def clean_cell(cell: PlanCell, config: ExperimentConfig, layout: OutputLayout) -> None:
    """(Re)derive cleaned prediction files from raw result rows."""
    scheme = config.scheme()
    cleaned_dir = layout.cleaned / cell.slug
    cleaned_dir.mkdir(parents=True, exist_ok=True)
    for run_index in range(1, cell.run_count + 1):
        raw_rows = read_raw_rows(layout.raw / cell.slug / f"run{run_index}.jsonl")
        write_cleaned(clean_rows(raw_rows, scheme), cleaned_dir / f"run{run_index}.jsonl")


def execute(
    config: ExperimentConfig,
    cells: list[PlanCell] | None = None,
    adapters: dict | None = None,
    sleep=time.sleep,
    poll_interval: float = 2.0,
) -> RunLedger:
    """Run every cell to scored (or record its failure) and return the ledger."""
    layout = output_layout(config)
    if cells is None:
        cells = plan(config)
    scheme = config.scheme()
    corpus = load_corpus(config.validation_corpus, scheme, split_tag="validation")
    ledger = RunLedger.load(layout.ledger_path)
    adapter_map = dict(default_adapters(config))
    if adapters:
        adapter_map.update(adapters)

    clients: dict[str, BatchClient] = {}

    def client_for(provider: str) -> BatchClient:
        if provider not in clients:
            if provider not in adapter_map:
                raise PermanentProviderError(f"no adapter for provider {provider!r}")
            clients[provider] = BatchClient(
                adapter_map[provider],
                cache_dir=layout.cache,
                sleep=sleep,
                poll_interval=poll_interval,
            )
        return clients[provider]

    def worker(cell: PlanCell) -> None:
        try:
            _run_cell(cell, config, corpus, layout, ledger, client_for(cell.model.provider))
        except Exception as exc:  # cell isolation: record, move on
            logger.exception("cell %s failed", cell.cell_id)
            ledger.set_error(cell.cell_id, f"{type(exc).__name__}: {exc}")

    if config.workers == 1:
        for cell in cells:
            worker(cell)
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(worker, cells))
    return ledger
