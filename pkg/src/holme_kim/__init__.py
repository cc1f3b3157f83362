"""Holme-Kim random multigraph process: generator, statistics, exact oracle."""

from .core import (
    HkParams,
    Multigraph,
    StepTrace,
    generate,
    grow_step,
    new_initial,
    sample_pa,
    sample_step,
    sample_tf,
)
from .rng import HkRng
from .stats import IncrementalStats, StatsSnapshot, snapshot_from_graph

__all__ = [
    "HkParams",
    "HkRng",
    "IncrementalStats",
    "Multigraph",
    "StatsSnapshot",
    "StepTrace",
    "generate",
    "grow_step",
    "new_initial",
    "sample_pa",
    "sample_step",
    "sample_tf",
    "snapshot_from_graph",
]
