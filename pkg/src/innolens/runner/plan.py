"""Expand an experiment config into the cell grid to execute."""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass

from ..orchestrator.batch import ModelSpec
from .config import ConfigError, ExperimentConfig

logger = logging.getLogger(__name__)

DEFAULT_TRAIN_VARIANT = "default"


@dataclass(frozen=True)
class PlanCell:
    """One scoring unit: a model/train-variant/prompt-variant/temperature point."""

    cell_id: str
    model: ModelSpec
    effective_model_id: str
    variant: str
    temperature: float
    train_variant: str
    run_count: int

    @property
    def slug(self) -> str:
        """Filesystem-safe directory name, uniqued by a content hash."""
        safe = re.sub(r"[^A-Za-z0-9._-]+", "_", self.cell_id).strip("_")
        digest = hashlib.sha256(self.cell_id.encode("utf-8")).hexdigest()[:8]
        return f"{safe[:80]}-{digest}"


def _cell_id(model_id: str, variant: str, temperature: float, train_variant: str) -> str:
    return f"{model_id}|{variant}|{float(temperature)!r}|{train_variant}"


def _temperatures_for(model: ModelSpec, config: ExperimentConfig) -> list[float]:
    if model.is_reasoning:
        if len(config.temperatures) > 1:
            logger.info(
                "%s is a reasoning model; collapsing the temperature sweep to one cell",
                model.model_id,
            )
        return [0.0]
    kept = [t for t in config.temperatures if t <= model.max_temperature]
    dropped = [t for t in config.temperatures if t > model.max_temperature]
    if dropped:
        logger.warning(
            "%s caps temperature at %s; dropping %s", model.model_id,
            model.max_temperature, dropped,
        )
    if not kept:
        raise ConfigError(
            f"models: every configured temperature exceeds {model.model_id}'s cap"
        )
    return kept


def plan(config: ExperimentConfig) -> list[PlanCell]:
    """Deterministic cell grid: config order for models/variants, temps as given."""
    cells = []
    for model in config.models:
        train_variants = [(DEFAULT_TRAIN_VARIANT, model.model_id)]
        for ft in config.finetuned:
            if ft.base_model_id == model.model_id:
                train_variants.append(
                    (f"ft:{ft.train_size}:{ft.distribution}", ft.model_id)
                )
        temperatures = _temperatures_for(model, config)
        for train_variant, effective_id in train_variants:
            for variant in config.variants:
                for temperature in temperatures:
                    cells.append(
                        PlanCell(
                            cell_id=_cell_id(effective_id, variant, temperature, train_variant),
                            model=model,
                            effective_model_id=effective_id,
                            variant=variant,
                            temperature=temperature,
                            train_variant=train_variant,
                            run_count=config.run_count,
                        )
                    )
    ids = [c.cell_id for c in cells]
    if len(set(ids)) != len(ids):
        raise ConfigError("finetuned: duplicate cells; model_id values must be unique")
    return cells
