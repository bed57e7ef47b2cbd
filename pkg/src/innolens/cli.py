"""Command line interface over the experiment runner."""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import click

from .corpus import load_corpus
from .orchestrator.finetune import prepare_finetune_export, write_finetune_file
from .prompts import load_builtin
from .runner.config import ConfigError, load_config
from .runner.execute import (
    _write_score_artifacts,
    clean_cell,
    execute,
    output_layout,
)
from .runner.ledger import RunLedger, STATUSES
from .runner.plan import plan
from .runner.reports import SHAPES, EmptyReport, report
from .sampling import SamplingSpec, subsample

_RANK = {name: i for i, name in enumerate(STATUSES)}


def _load(config_path: str, output_dir: str | None, workers: int | None):
    config = load_config(config_path)
    return config.with_overrides(output_dir=output_dir, workers=workers)


def _wrap_config_errors(fn):
    """Surface ConfigError as a clean CLI error instead of a traceback."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            raise click.ClickException(f"config error: {exc}")

    return wrapper


def _config_options(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="Experiment config (JSON).")(fn)
    fn = click.option("--output-dir", default=None,
                      help="Override the config's output directory.")(fn)
    return fn


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG instead of INFO.")
def main(verbose: bool) -> None:
    """Prompted-LLM classification experiments: plan, run, score, report."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command("plan")
@_config_options
@_wrap_config_errors
def plan_command(config_path: str, output_dir: str | None) -> None:
    """Expand the config into cells and write plan.json."""
    config = _load(config_path, output_dir, None)
    cells = plan(config)
    layout = output_layout(config)
    payload = [
        {
            "cell_id": cell.cell_id,
            "slug": cell.slug,
            "provider": cell.model.provider,
            "model_id": cell.effective_model_id,
            "variant": cell.variant,
            "temperature": cell.temperature,
            "train_variant": cell.train_variant,
            "run_count": cell.run_count,
        }
        for cell in cells
    ]
    layout.plan_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    for cell in cells:
        click.echo(cell.cell_id)
    click.echo(f"{len(cells)} cells -> {layout.plan_path}")


@main.command("run")
@_config_options
@click.option("--workers", type=int, default=None, help="Parallel cell workers.")
@click.option("--mock", "force_mock", is_flag=True,
              help="Route every model through the offline mock provider.")
@_wrap_config_errors
def run_command(config_path: str, output_dir: str | None, workers: int | None,
                force_mock: bool) -> None:
    """Execute all planned cells; exit 0 only if every cell reaches scored."""
    config = _load(config_path, output_dir, workers)
    if force_mock:
        if config.mock is None:
            click.echo("warning: --mock with no mock settings; outputs will be "
                       "unclassifiable", err=True)
        config = replace(
            config,
            models=tuple(replace(m, provider="mock") for m in config.models),
        )
    ledger = execute(config)
    cells = ledger.cells()
    for cell_id, state in sorted(cells.items()):
        line = f"{state['status']:<10} {cell_id}"
        if state.get("error"):
            line += f"  [{state['error']}]"
        click.echo(line)
    if not ledger.all_scored():
        raise SystemExit(1)


@main.command("report")
@_config_options
@click.option("--shape", type=click.Choice(SHAPES), required=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Also write the CSV here.")
@_wrap_config_errors
def report_command(config_path: str, output_dir: str | None, shape: str,
                   out_path: str | None) -> None:
    """Print a cross-cell CSV table recomputed from cleaned predictions."""
    config = _load(config_path, output_dir, None)
    try:
        click.echo(report(config, shape, out_path), nl=False)
    except EmptyReport as exc:
        raise click.ClickException(str(exc))


@main.command("clean-only")
@_config_options
@_wrap_config_errors
def clean_only_command(config_path: str, output_dir: str | None) -> None:
    """Re-derive cleaned predictions from raw downloads (no network)."""
    config = _load(config_path, output_dir, None)
    layout = output_layout(config)
    ledger = RunLedger.load(layout.ledger_path)
    states = ledger.cells()
    count = 0
    for cell in plan(config):
        status = states.get(cell.cell_id, {}).get("status")
        if status is None or _RANK[status] < _RANK["downloaded"]:
            continue
        clean_cell(cell, config, layout)
        if status == "downloaded":
            ledger.set_status(cell.cell_id, "cleaned")
        count += 1
    click.echo(f"re-cleaned {count} cells")


@main.command("score-only")
@_config_options
@_wrap_config_errors
def score_only_command(config_path: str, output_dir: str | None) -> None:
    """Re-score cells from their cleaned predictions (no network)."""
    config = _load(config_path, output_dir, None)
    layout = output_layout(config)
    scheme = config.scheme()
    corpus = load_corpus(config.validation_corpus, scheme, split_tag="validation")
    ledger = RunLedger.load(layout.ledger_path)
    states = ledger.cells()
    count = 0
    for cell in plan(config):
        status = states.get(cell.cell_id, {}).get("status")
        if status is None or _RANK[status] < _RANK["cleaned"]:
            continue
        _write_score_artifacts(cell, config, corpus, layout)
        ledger.set_status(cell.cell_id, "scored")
        count += 1
    click.echo(f"re-scored {count} cells")


@main.command("export-finetune")
@_config_options
@click.option("--size", type=int, required=True, help="Training subsample size.")
@click.option("--distribution", type=click.Choice(["representative", "balanced"]),
              required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_wrap_config_errors
def export_finetune_command(config_path: str, output_dir: str | None, size: int,
                            distribution: str, out_path: str) -> None:
    """Subsample the train corpus and write a chat-format fine-tuning file."""
    config = _load(config_path, output_dir, None)
    if config.train_corpus is None:
        raise click.ClickException("config has no train_corpus")
    scheme = config.scheme()
    corpus = load_corpus(config.train_corpus, scheme, split_tag="train")
    sample = subsample(corpus, SamplingSpec(size=size, strategy=distribution,
                                            seed=config.seed))
    template = load_builtin(config.task, "default")
    try:
        records = prepare_finetune_export(sample, template)
    except Exception as exc:
        raise click.ClickException(str(exc))
    digest = write_finetune_file(records, out_path, role=config.message_role)
    click.echo(f"wrote {len(records)} records to {out_path}")
    click.echo(f"export hash: {digest}")


if __name__ == "__main__":
    main()
