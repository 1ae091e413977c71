"""Evaluation harness: backends, scored runs, checkpoint sweeps, comparisons."""

from .backends import (
    FileMapBackend,
    HttpBackend,
    IdentityBackend,
    SubprocessBackend,
    parse_backend_spec,
)
from .harness import (
    ComparisonResult,
    EvalRunResult,
    SweepResult,
    TestItem,
    checkpoint_sweep,
    compare_systems,
    compute_test_set_hash,
    load_run,
    load_test_set,
    run_eval,
    save_run,
)

__all__ = [
    "ComparisonResult",
    "EvalRunResult",
    "FileMapBackend",
    "HttpBackend",
    "IdentityBackend",
    "SubprocessBackend",
    "SweepResult",
    "TestItem",
    "checkpoint_sweep",
    "compare_systems",
    "compute_test_set_hash",
    "load_run",
    "load_test_set",
    "parse_backend_spec",
    "run_eval",
    "save_run",
]
