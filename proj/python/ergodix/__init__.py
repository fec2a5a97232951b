"""Følner averages, mixing statistics and Koopman splitting on matrix and spin-lattice systems."""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    InvalidArgument,
    NumericalError,
    Observable,
    System,
    box_size,
    clock_matrix,
    folner_defect,
    invariants,
    set_thread_count,
    shift_matrix,
    tempelman_ratio,
    thread_count,
)

__all__ = [
    "ConfigError", "InvalidArgument", "NumericalError", "Observable", "System",
    "box_size", "clock_matrix", "dichotomy", "folner_defect", "higher_order_defect",
    "invariants", "run", "set_thread_count", "shift_matrix", "szemeredi",
    "tempelman_ratio", "thread_count", "vdc_report", "weak_mixing_defect",
]


def weak_mixing_defect(system, a, b, n_min, n_max):
    """Per-window mean of |ω(a τ_g b) − ω(a)ω(b)| on boxes n_min..n_max."""
    return _json.loads(_core.weak_mixing_defect(system, a, b, n_min, n_max))


def higher_order_defect(system, observables, homs, n_min, n_max):
    """Multi-correlation defect with scalar homomorphisms `homs`."""
    return _json.loads(_core.higher_order_defect(system, observables, homs, n_min, n_max))


def dichotomy(system):
    return _json.loads(_core.dichotomy(system))


def szemeredi(system, a, exponents, n_min, n_max):
    return _json.loads(_core.szemeredi(system, a, exponents, n_min, n_max))


def vdc_report(kind, alpha, n_values, tolerance=0.05):
    return _json.loads(_core.vdc_report(kind, alpha, list(n_values), tolerance))


def run(command, config, out_dir, threads=0, seed=None):
    """Run a CLI subcommand in-process; `config` may be a dict or JSON text."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _core.run(command, config, str(out_dir), threads, seed)
