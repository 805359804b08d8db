from .harness import (
    EvalReport,
    IndexCache,
    RecordResult,
    Strategy,
    ablation_strategies,
    format_table,
    run_ablation,
    run_eval,
    write_ablation,
    write_report,
)
from .metrics import chrf, context_recall
from .records import EvalRecord, load_dataset, save_dataset
from .synth import generate_synthetic_repo

__all__ = [
    "EvalRecord",
    "EvalReport",
    "IndexCache",
    "RecordResult",
    "Strategy",
    "ablation_strategies",
    "chrf",
    "context_recall",
    "format_table",
    "generate_synthetic_repo",
    "load_dataset",
    "run_ablation",
    "run_eval",
    "save_dataset",
    "write_ablation",
    "write_report",
]
