from .experiment import (
    ConfigError,
    ExperimentConfig,
    METHODS,
    TableEntry,
    TableRow,
    load_config,
    reproduce_table,
    run_experiment,
    solve,
)
from .report import emit_report, parse_report_csv, read_trace, write_trace

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "METHODS",
    "TableEntry",
    "TableRow",
    "load_config",
    "reproduce_table",
    "run_experiment",
    "solve",
    "emit_report",
    "parse_report_csv",
    "read_trace",
    "write_trace",
]
