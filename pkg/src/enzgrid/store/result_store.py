"""
Result stores: JSON documents and run phasors keyed by run.

Keys use ':' as separator ("manifest:<run key>"); the file store maps
them to paths under its root.
"""

import fnmatch
import json
import logging
import threading
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..fdtd.engine import RunResult
from .data_types import RunManifest

logger = logging.getLogger(__name__)

PHASOR_FILE = "phasors.npz"
SUMMARY_FILE = "summary.json"


class ResultStore(ABC):
    """Abstract interface for run result storage."""

    @abstractmethod
    def write(self, key: str, value: Any) -> bool:
        pass

    @abstractmethod
    def read(self, key: str) -> Optional[Any]:
        pass

    @abstractmethod
    def delete(self, key: str) -> bool:
        pass

    @abstractmethod
    def exists(self, key: str) -> bool:
        pass

    @abstractmethod
    def keys(self, pattern: str = "*") -> List[str]:
        pass

    @abstractmethod
    def save_run(self, run_key: str, result: RunResult) -> Optional[Path]:
        pass

    @abstractmethod
    def load_run(self, run_key: str) -> Optional[RunResult]:
        pass

    def save_manifest(self, manifest: RunManifest) -> bool:
        return self.write(f"manifest:{manifest.key}", manifest.to_dict())

    def get_manifest(self, run_key: str) -> Optional[RunManifest]:
        data = self.read(f"manifest:{run_key}")
        if data:
            return RunManifest.from_dict(data)
        return None

    def run_keys(self) -> List[str]:
        return sorted(k.split(":", 1)[1] for k in self.keys("manifest:*"))


class InMemoryResultStore(ResultStore):
    """Process-local store for tests and chained in-memory runs."""

    def __init__(self):
        self._data: Dict[str, str] = {}
        self._runs: Dict[str, RunResult] = {}
        self._lock = threading.Lock()

    def write(self, key: str, value: Any) -> bool:
        with self._lock:
            self._data[key] = json.dumps(value, sort_keys=True)
            return True

    def read(self, key: str) -> Optional[Any]:
        with self._lock:
            value = self._data.get(key)
        return None if value is None else json.loads(value)

    def delete(self, key: str) -> bool:
        with self._lock:
            removed = self._data.pop(key, None) is not None
            if key.startswith("manifest:"):
                self._runs.pop(key.split(":", 1)[1], None)
            return removed

    def exists(self, key: str) -> bool:
        with self._lock:
            return key in self._data

    def keys(self, pattern: str = "*") -> List[str]:
        with self._lock:
            return [k for k in self._data if fnmatch.fnmatch(k, pattern)]

    def save_run(self, run_key: str, result: RunResult) -> Optional[Path]:
        with self._lock:
            self._runs[run_key] = result
        return None

    def load_run(self, run_key: str) -> Optional[RunResult]:
        with self._lock:
            return self._runs.get(run_key)


class FileResultStore(ResultStore):
    """
    One directory per run under `root`:

        <root>/<run key>/manifest.json
        <root>/<run key>/summary.json
        <root>/<run key>/phasors.npz
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        kind, _, name = key.partition(":")
        if not name:
            return self.root / f"{kind}.json"
        return self.root / name / f"{kind}.json"

    def run_dir(self, run_key: str) -> Path:
        return self.root / run_key

    def write(self, key: str, value: Any) -> bool:
        path = self._path(key)
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(value, sort_keys=True, indent=2) + "\n", encoding='utf-8')
        return True

    def read(self, key: str) -> Optional[Any]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            logger.error("Corrupt store entry %s: %s", path, e)
            return None

    def delete(self, key: str) -> bool:
        path = self._path(key)
        with self._lock:
            if path.exists():
                path.unlink()
                return True
            return False

    def exists(self, key: str) -> bool:
        return self._path(key).exists()

    def keys(self, pattern: str = "*") -> List[str]:
        found = []
        for path in sorted(self.root.glob("*.json")) + sorted(self.root.glob("*/*.json")):
            if path.parent == self.root:
                key = path.stem
            else:
                key = f"{path.stem}:{path.parent.name}"
            if fnmatch.fnmatch(key, pattern):
                found.append(key)
        return found

    def save_run(self, run_key: str, result: RunResult) -> Optional[Path]:
        directory = self.run_dir(run_key)
        directory.mkdir(parents=True, exist_ok=True)
        result.save(directory / PHASOR_FILE)
        self.write(f"summary:{run_key}", result.summary())
        logger.debug("Stored run %s in %s", run_key, directory)
        return directory / PHASOR_FILE

    def load_run(self, run_key: str) -> Optional[RunResult]:
        directory = self.run_dir(run_key)
        summary = self.read(f"summary:{run_key}")
        if summary is None or not (directory / PHASOR_FILE).exists():
            return None
        return RunResult.load(directory / PHASOR_FILE, summary)

    @classmethod
    def for_run_directory(cls, run_dir: Union[str, Path]) -> 'FileResultStore':
        """Store rooted at the parent of an existing run directory."""
        return cls(Path(run_dir).resolve().parent)
