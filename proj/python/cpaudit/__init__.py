"""Corepower audit toolkit.

Validates the CPU corepower declared by batch queues against the runtime
corepower observed in benchmark runs, and ships a deterministic synthetic
fleet simulator for end-to-end checks.
"""

import json as _json

from ._core import (
    AnalysisError,
    ConfigError,
    IngestError,
    __version__,
    audit_files,
    classify,
    compute_weights,
    load_correlation,
    normalize_cpu_model,
    queue_runtime_corepower,
    relative_change,
    simulate,
)

__all__ = [
    "AnalysisError",
    "ConfigError",
    "IngestError",
    "__version__",
    "audit",
    "audit_files",
    "classify",
    "compute_weights",
    "load_correlation",
    "normalize_cpu_model",
    "queue_runtime_corepower",
    "relative_change",
    "simulate",
]


def audit(benchmarks, jobs, declared, **kwargs):
    """Run the audit and return the report as a dict (see audit_files)."""
    return _json.loads(audit_files(benchmarks, jobs, declared, **kwargs))
