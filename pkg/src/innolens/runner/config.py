"""Experiment configuration: JSON in, validated dataclass out."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..corpus import BUILTIN_SCHEMES
from ..orchestrator.batch import (
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_SEED,
    ModelSpec,
)
from ..prompts import VARIANTS

CONFIG_VERSION = 1

DEFAULT_TEMPERATURES = (0.0, 0.5, 1.0, 1.5)
DEFAULT_TRAIN_SIZES = (100, 250, 500, 1000, 2000)
DISTRIBUTIONS = ("representative", "balanced")

KNOWN_PROVIDERS = ("openai", "mistral", "anthropic", "mock")
ALLOWED_MAX_TEMPERATURES = (1.0, 2.0)


class ConfigError(Exception):
    """Raised with a field path when a config value is invalid."""


@dataclass(frozen=True)
class FinetunedModelRef:
    """A fine-tuned checkpoint derived from a base model at a given train setup."""

    base_model_id: str
    model_id: str
    train_size: int
    distribution: str
    export_hash: str | None = None


@dataclass(frozen=True)
class MockSettings:
    behavior: dict[str, str] = field(default_factory=dict)
    noise_rate: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    validation_corpus: str
    models: tuple[ModelSpec, ...]
    train_corpus: str | None = None
    finetuned: tuple[FinetunedModelRef, ...] = ()
    variants: tuple[str, ...] = ("default",)
    temperatures: tuple[float, ...] = DEFAULT_TEMPERATURES
    run_count: int = 3
    seed: int = DEFAULT_SEED
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    message_role: str = "user"
    reasoning_effort: str | None = None
    train_sizes: tuple[int, ...] = DEFAULT_TRAIN_SIZES
    distributions: tuple[str, ...] = DISTRIBUTIONS
    output_dir: str = "runs"
    workers: int = 1
    consistency_mode: str = "pairwise"
    mock: MockSettings | None = None

    def scheme(self):
        return BUILTIN_SCHEMES[self.task]

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs) if kwargs else self


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _require(data: dict, key: str, path: str):
    if key not in data:
        _fail(f"{path}{key}", "required field missing")
    return data[key]


def _parse_model(data: dict, path: str) -> ModelSpec:
    if not isinstance(data, dict):
        _fail(path, "model entry must be an object")
    provider = _require(data, "provider", f"{path}.")
    model_id = _require(data, "model_id", f"{path}.")
    if provider not in KNOWN_PROVIDERS:
        _fail(f"{path}.provider", f"unknown provider {provider!r}; known: {KNOWN_PROVIDERS}")
    spec_kwargs = {
        "provider": provider,
        "model_id": model_id,
        "supports_temperature": data.get("supports_temperature", True),
        "is_reasoning": data.get("is_reasoning", False),
        "max_temperature": float(data.get("max_temperature", 2.0)),
        "fine_tunable": data.get("fine_tunable", False),
    }
    if spec_kwargs["is_reasoning"]:
        spec_kwargs["supports_temperature"] = False
    if spec_kwargs["max_temperature"] not in ALLOWED_MAX_TEMPERATURES:
        _fail(
            f"{path}.max_temperature",
            f"must be one of {ALLOWED_MAX_TEMPERATURES}, got {spec_kwargs['max_temperature']}",
        )
    try:
        return ModelSpec(**spec_kwargs)
    except ValueError as exc:
        _fail(path, str(exc))


def _parse_finetuned(data: dict, path: str, models: tuple[ModelSpec, ...]) -> FinetunedModelRef:
    base = _require(data, "base_model_id", f"{path}.")
    model_id = _require(data, "model_id", f"{path}.")
    size = _require(data, "train_size", f"{path}.")
    distribution = _require(data, "distribution", f"{path}.")
    base_spec = next((m for m in models if m.model_id == base), None)
    if base_spec is None:
        _fail(f"{path}.base_model_id", f"{base!r} does not match any configured model")
    if not base_spec.fine_tunable:
        _fail(f"{path}.base_model_id", f"{base!r} is not marked fine_tunable")
    if not isinstance(size, int) or size < 1:
        _fail(f"{path}.train_size", "must be a positive integer")
    if distribution not in DISTRIBUTIONS:
        _fail(f"{path}.distribution", f"must be one of {DISTRIBUTIONS}")
    return FinetunedModelRef(
        base_model_id=base,
        model_id=model_id,
        train_size=size,
        distribution=distribution,
        export_hash=data.get("export_hash"),
    )


def parse_config(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    version = data.get("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        _fail("config_version", f"this build reads version {CONFIG_VERSION}, got {version}")

    task = _require(data, "task", "")
    if task not in BUILTIN_SCHEMES:
        _fail("task", f"unknown task {task!r}; known: {sorted(BUILTIN_SCHEMES)}")

    def _resolve(p: str | None) -> str | None:
        if p is None:
            return None
        path = Path(p)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return str(path)

    validation_corpus = _resolve(_require(data, "validation_corpus", ""))

    models_raw = _require(data, "models", "")
    if not isinstance(models_raw, list) or not models_raw:
        _fail("models", "must be a non-empty array")
    models = tuple(_parse_model(m, f"models[{i}]") for i, m in enumerate(models_raw))
    if len({m.model_id for m in models}) != len(models):
        _fail("models", "model_id values must be unique")

    finetuned = tuple(
        _parse_finetuned(ft, f"finetuned[{i}]", models)
        for i, ft in enumerate(data.get("finetuned", []))
    )

    variants = tuple(data.get("variants", ["default"]))
    if not variants:
        _fail("variants", "must be non-empty")
    for i, v in enumerate(variants):
        if v not in VARIANTS:
            _fail(f"variants[{i}]", f"unknown variant {v!r}; known: {VARIANTS}")
    if len(set(variants)) != len(variants):
        _fail("variants", "variants must be distinct")

    temperatures = tuple(float(t) for t in data.get("temperatures", DEFAULT_TEMPERATURES))
    if not temperatures:
        _fail("temperatures", "must be non-empty")
    if any(t < 0 for t in temperatures):
        _fail("temperatures", "temperatures must be >= 0")
    if len(set(temperatures)) != len(temperatures):
        _fail("temperatures", "temperatures must be distinct")

    run_count = data.get("run_count", 3)
    if not isinstance(run_count, int) or run_count < 1:
        _fail("run_count", "must be a positive integer")

    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        _fail("workers", "must be a positive integer")

    consistency_mode = data.get("consistency_mode", "pairwise")
    if consistency_mode not in ("pairwise", "unanimous"):
        _fail("consistency_mode", "must be 'pairwise' or 'unanimous'")

    distributions = tuple(data.get("distributions", DISTRIBUTIONS))
    for i, d in enumerate(distributions):
        if d not in DISTRIBUTIONS:
            _fail(f"distributions[{i}]", f"must be one of {DISTRIBUTIONS}")

    train_sizes = tuple(int(s) for s in data.get("train_sizes", DEFAULT_TRAIN_SIZES))
    if any(s < 1 for s in train_sizes):
        _fail("train_sizes", "sizes must be positive")

    mock = None
    if "mock" in data:
        mock_raw = data["mock"]
        if not isinstance(mock_raw, dict):
            _fail("mock", "must be an object")
        behavior = mock_raw.get("behavior", {})
        if not isinstance(behavior, dict):
            _fail("mock.behavior", "must be an object mapping substrings to labels")
        noise = float(mock_raw.get("noise_rate", 0.0))
        if not 0.0 <= noise <= 1.0:
            _fail("mock.noise_rate", "must be in [0, 1]")
        mock = MockSettings(behavior={str(k): str(v) for k, v in behavior.items()},
                            noise_rate=noise)

    return ExperimentConfig(
        task=task,
        validation_corpus=validation_corpus,
        train_corpus=_resolve(data.get("train_corpus")),
        models=models,
        finetuned=finetuned,
        variants=variants,
        temperatures=temperatures,
        run_count=run_count,
        seed=data.get("seed", DEFAULT_SEED),
        max_output_tokens=data.get("max_output_tokens", DEFAULT_MAX_OUTPUT_TOKENS),
        message_role=data.get("message_role", "user"),
        reasoning_effort=data.get("reasoning_effort"),
        train_sizes=train_sizes,
        distributions=distributions,
        output_dir=_resolve(data.get("output_dir", "runs")),
        workers=workers,
        consistency_mode=consistency_mode,
        mock=mock,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data, base_dir=path.parent)
