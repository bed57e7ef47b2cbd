"""Batch request construction: model specs, request coordinates, job assembly.

Every request is addressed by a custom id that encodes its experiment
coordinate (model, prompt variant, temperature, run index, sample id), so a
downloaded result row can be traced back without side tables.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from ..corpus import LabeledCorpus
from ..prompts import PromptTemplate

DEFAULT_SEED = 94032
DEFAULT_MAX_OUTPUT_TOKENS = 1000
DEFAULT_REASONING_EFFORT = "low"


class MalformedCustomId(Exception):
    """Raised when a custom id cannot be parsed back into a coordinate."""


class TemperatureCapExceeded(Exception):
    """Raised when a requested temperature exceeds a model's cap."""


@dataclass(frozen=True)
class ModelSpec:
    """Static facts about a model needed to build valid requests."""

    provider: str
    model_id: str
    supports_temperature: bool = True
    is_reasoning: bool = False
    max_temperature: float = 2.0
    fine_tunable: bool = False

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if self.is_reasoning and self.supports_temperature:
            raise ValueError("reasoning models do not take a temperature")
        if self.max_temperature <= 0:
            raise ValueError("max_temperature must be positive")


@dataclass(frozen=True)
class RequestConfig:
    temperature: float = 0.0
    seed: int = DEFAULT_SEED
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    reasoning_effort: str | None = None
    message_role: str = "user"

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")


@dataclass(frozen=True)
class ExperimentCoord:
    model_id: str
    prompt_variant: str
    temperature: float
    run_index: int
    sample_id: str

    def __post_init__(self) -> None:
        if self.run_index < 1:
            raise ValueError("run_index starts at 1")


# '%' must be escaped before '|' so unescaping can reverse in the opposite order
def _escape(field: str) -> str:
    return field.replace("%", "%25").replace("|", "%7C")


def _unescape(field: str) -> str:
    return field.replace("%7C", "|").replace("%25", "%")


def encode_custom_id(coord: ExperimentCoord) -> str:
    fields = [
        coord.model_id,
        coord.prompt_variant,
        repr(float(coord.temperature)),
        str(coord.run_index),
        coord.sample_id,
    ]
    return "|".join(_escape(f) for f in fields)


def parse_custom_id(custom_id: str) -> ExperimentCoord:
    parts = custom_id.split("|")
    if len(parts) != 5:
        raise MalformedCustomId(f"expected 5 fields, got {len(parts)}: {custom_id!r}")
    model_id, variant, temp_s, run_s, sample_id = (_unescape(p) for p in parts)
    try:
        temperature = float(temp_s)
        run_index = int(run_s)
    except ValueError as exc:
        raise MalformedCustomId(f"bad numeric field in {custom_id!r}") from exc
    if run_index < 1:
        raise MalformedCustomId(f"run index must be >= 1 in {custom_id!r}")
    return ExperimentCoord(model_id, variant, temperature, run_index, sample_id)


@dataclass(frozen=True)
class BatchRequest:
    custom_id: str
    body: dict


@dataclass(frozen=True)
class BatchJob:
    job_id: str
    model: ModelSpec
    run_index: int
    requests: tuple[BatchRequest, ...]


def _request_body(
    prompt_text: str, model: ModelSpec, config: RequestConfig
) -> dict:
    body = {
        "model": model.model_id,
        "messages": [{"role": config.message_role, "content": prompt_text}],
        "seed": config.seed,
        "max_tokens": config.max_output_tokens,
    }
    if model.is_reasoning:
        # temperature is silently omitted for reasoning models
        body["reasoning_effort"] = config.reasoning_effort or DEFAULT_REASONING_EFFORT
    elif model.supports_temperature:
        body["temperature"] = config.temperature
    return body


def _job_id(model_id: str, requests: list[BatchRequest]) -> str:
    hasher = hashlib.sha256()
    hasher.update(model_id.encode("utf-8"))
    for request in requests:
        hasher.update(b"\n")
        hasher.update(
            json.dumps(
                {"custom_id": request.custom_id, "body": request.body},
                sort_keys=True,
                ensure_ascii=False,
            ).encode("utf-8")
        )
    return hasher.hexdigest()[:16]


def build_batch(
    corpus: LabeledCorpus,
    template: PromptTemplate,
    model: ModelSpec,
    config: RequestConfig,
    run_count: int,
) -> list[BatchJob]:
    """One job per run; each job holds one request per corpus document."""
    if run_count < 1:
        raise ValueError("run_count must be >= 1")
    if config.reasoning_effort is not None and not model.is_reasoning:
        raise ValueError("reasoning_effort is only valid for reasoning models")
    if not model.is_reasoning and config.temperature > model.max_temperature:
        raise TemperatureCapExceeded(
            f"{model.model_id} caps temperature at {model.max_temperature}, "
            f"got {config.temperature}"
        )
    jobs = []
    for run_index in range(1, run_count + 1):
        requests = []
        for doc in corpus:
            coord = ExperimentCoord(
                model_id=model.model_id,
                prompt_variant=template.variant,
                temperature=config.temperature,
                run_index=run_index,
                sample_id=doc.id,
            )
            requests.append(
                BatchRequest(
                    custom_id=encode_custom_id(coord),
                    body=_request_body(template.render(doc.text).text, model, config),
                )
            )
        jobs.append(
            BatchJob(
                job_id=_job_id(model.model_id, requests),
                model=model,
                run_index=run_index,
                requests=tuple(requests),
            )
        )
    return jobs


def write_batch_file(job: BatchJob, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for request in job.requests:
            row = {"custom_id": request.custom_id, "body": request.body}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def _read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def read_batch_rows(path: str | Path) -> list[dict]:
    return _read_jsonl(path)


def write_raw_rows(rows: Iterable[Mapping], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(dict(row), ensure_ascii=False) + "\n")


def read_raw_rows(path: str | Path) -> list[dict]:
    return _read_jsonl(path)
