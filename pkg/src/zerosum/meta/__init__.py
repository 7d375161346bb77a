"""Population meta-algorithms: DO, ADO, RM-BR (DO), tabular PSRO, and APSRO."""

from .checkpoint import (
    checkpoint_state,
    load_checkpoint,
    restore_runner,
    save_checkpoint,
)
from .oracle import AdoRunner, DoRunner, run_ado, run_do
from .rl import ApsroRunner, PsroTabularRunner, run_apsro, run_psro_tabular
from .rmbr import RmbrDoRunner, RmbrResult, run_rmbr, run_rmbr_do
from .traces import CSV_COLUMNS, IterationRecord, Population, RunTrace, pad_distribution

__all__ = [
    "AdoRunner",
    "ApsroRunner",
    "CSV_COLUMNS",
    "DoRunner",
    "IterationRecord",
    "Population",
    "PsroTabularRunner",
    "RmbrDoRunner",
    "RmbrResult",
    "RunTrace",
    "checkpoint_state",
    "load_checkpoint",
    "pad_distribution",
    "restore_runner",
    "run_ado",
    "run_apsro",
    "run_do",
    "run_psro_tabular",
    "run_rmbr",
    "run_rmbr_do",
    "save_checkpoint",
]
