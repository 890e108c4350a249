"""Recognizer adapter: posteriorgram export in the interchange CSV format."""

from .adapter import AdapterError, AdapterOutput, infer, validate
from .backends import (
    AllosaurusBackend,
    BackendError,
    EnergyBackend,
    MODEL_CACHE_ENV,
    resolve_backend,
)
from .interchange import CANONICAL_LABELS, HEADER, HOP_S, WINDOW_S, frame_count

__all__ = [
    "AdapterError",
    "AdapterOutput",
    "AllosaurusBackend",
    "BackendError",
    "CANONICAL_LABELS",
    "EnergyBackend",
    "HEADER",
    "HOP_S",
    "MODEL_CACHE_ENV",
    "WINDOW_S",
    "frame_count",
    "infer",
    "resolve_backend",
    "validate",
]

__version__ = "0.1.0"
