"""Thinging-machine models: parse, validate, simulate and export."""

from ._core import (
    Diagnostic,
    DynamicsError,
    Firing,
    Model,
    ParseError,
    RegionBudgetExceeded,
    Trace,
    TraceFormatError,
    behavior_edges,
    enumerate_regions,
    export_behavior,
    export_dynamic,
    export_static,
    export_table_csv,
    load_trace,
    occurrences,
    pa_table,
    parse_model,
    save_trace,
    serialize_model,
    simulate,
    validate,
)

__all__ = [
    "Diagnostic",
    "DynamicsError",
    "Firing",
    "Model",
    "ParseError",
    "RegionBudgetExceeded",
    "Trace",
    "TraceFormatError",
    "behavior_edges",
    "enumerate_regions",
    "export_behavior",
    "export_dynamic",
    "export_static",
    "export_table_csv",
    "load_model",
    "load_trace",
    "occurrences",
    "pa_table",
    "parse_model",
    "save_trace",
    "serialize_model",
    "simulate",
    "validate",
]


def load_model(path):
    """Parse a .tm file; the model name defaults to the file stem."""
    with open(path, encoding="utf-8") as f:
        return parse_model(f.read(), str(path))
