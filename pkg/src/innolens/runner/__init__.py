from .config import (
    ConfigError,
    ExperimentConfig,
    FinetunedModelRef,
    MockSettings,
    load_config,
    parse_config,
)
from .execute import (
    OutputLayout,
    clean_cell,
    default_adapters,
    execute,
    jobs_for_cell,
    output_layout,
    score_cell,
)
from .ledger import RunLedger, StatusRegression, STATUSES
from .plan import PlanCell, plan
from .reports import SHAPES, EmptyReport, report

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "FinetunedModelRef",
    "MockSettings",
    "load_config",
    "parse_config",
    "OutputLayout",
    "clean_cell",
    "default_adapters",
    "execute",
    "jobs_for_cell",
    "output_layout",
    "score_cell",
    "RunLedger",
    "StatusRegression",
    "STATUSES",
    "PlanCell",
    "plan",
    "SHAPES",
    "EmptyReport",
    "report",
]
