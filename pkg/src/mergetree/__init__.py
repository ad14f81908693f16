"""Mergeable heap-ordered forests with interchangeable backends.

Four implementations of one interface: a slow transparent oracle, a
dynamic-tree path merger, a rank-partitioned structure with amortized
counter guarantees, and a cut-plus-link backend that only keeps an
equivalent tree.  On top: critical-point pairing over Reeb graphs,
adversarial workloads, and a differential fuzzer.
"""

from .core import (
    BOTTOM,
    Capability,
    Forest,
    InvalidHandleError,
    Key,
    NaiveForest,
    OpCounters,
    UnsupportedOperationError,
)
from .dynmerge import DynMergeForest
from .harness import BACKENDS, make_forest
from .implicitmerge import ImplicitForest
from .rankmerge import RankMergeForest

__all__ = [
    "BACKENDS",
    "BOTTOM",
    "Capability",
    "DynMergeForest",
    "Forest",
    "ImplicitForest",
    "InvalidHandleError",
    "Key",
    "NaiveForest",
    "OpCounters",
    "RankMergeForest",
    "UnsupportedOperationError",
    "make_forest",
]
