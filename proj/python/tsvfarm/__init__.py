"""Thermal-aware TSV farm placement for 3-D integrated circuits."""

import json as _json

from ._core import (
    DataError,
    Design,
    SolverError,
    acceptance_probability,
    analyze,
    parse_design,
    parse_design_text,
    parse_length,
    parse_temperature,
    resistance,
)
from ._core import optimize as _optimize

__all__ = [
    "DataError",
    "Design",
    "SolverError",
    "acceptance_probability",
    "analyze",
    "optimize",
    "parse_design",
    "parse_design_text",
    "parse_length",
    "parse_temperature",
    "resistance",
]


def optimize(design, **kwargs):
    """Run the placement flow. Returns (best_design, report_dict)."""
    best, report = _optimize(design, **kwargs)
    return best, _json.loads(report)
