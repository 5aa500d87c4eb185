"""Port-Hamiltonian impedance-control benchmark.

Thin wrapper over the compiled ``_phbench`` extension. Runs return a dict with
``columns`` (CSV header cells, units included), ``data`` (rows x columns
array) and, for simulations, ``name`` and ``summary``.
"""

from ._phbench import (
    ConfigError,
    Model,
    ModelError,
    NumericalDivergence,
    OverdampedUnsupported,
    ParseError,
    PhbenchError,
    SchemaError,
    WindowError,
    builtin_model_names,
    damping_ratio,
    metrics,
    preset_names,
    read_csv,
    rms_over_window,
    run,
    step_power,
    step_response,
    validate,
)


def column(table, name):
    """Column of a run table by name, with or without the unit suffix."""
    for i, header in enumerate(table["columns"]):
        if header == name or header.split("[", 1)[0] == name:
            return table["data"][:, i]
    raise KeyError(name)


__all__ = [
    "ConfigError",
    "Model",
    "ModelError",
    "NumericalDivergence",
    "OverdampedUnsupported",
    "ParseError",
    "PhbenchError",
    "SchemaError",
    "WindowError",
    "builtin_model_names",
    "column",
    "damping_ratio",
    "metrics",
    "preset_names",
    "read_csv",
    "rms_over_window",
    "run",
    "step_power",
    "step_response",
    "validate",
]
