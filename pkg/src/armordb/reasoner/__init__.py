"""Reasoning over the supported concept fragment: normalization into normal
shapes, completion-rule saturation, and the query layer built on top.

The saturation fixpoint runs in a compiled kernel when the extension built,
otherwise in a pure Python twin with identical semantics; `BACKEND` reports
which one is active.
"""

from .normalize import NormalizedTBox, normalize
from .saturate import (
    BACKEND,
    Inference,
    Realization,
    SubsumptionSet,
    saturate,
)

__all__ = [
    "BACKEND",
    "Inference",
    "NormalizedTBox",
    "Realization",
    "SubsumptionSet",
    "normalize",
    "saturate",
]
