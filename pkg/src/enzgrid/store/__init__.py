"""
Result storage: run manifests, phasor archives and reports.
"""

from .data_types import RunManifest
from .result_store import FileResultStore, InMemoryResultStore, ResultStore

__all__ = [
    "RunManifest",
    "ResultStore",
    "InMemoryResultStore",
    "FileResultStore",
]
