"""
Tests for run manifests and the result stores.
"""

import numpy as np
import pytest

from src.enzgrid.fdtd import MonitorResult, RunResult
from src.enzgrid.store import FileResultStore, InMemoryResultStore, RunManifest


def manifest(name="grid_phase", variant="enz", digest="ab" * 32):
    return RunManifest(
        command="run",
        name=name,
        config_digest=digest,
        tool_version="0.1.0",
        variant=variant,
        inputs={'config': digest},
        outputs={'phasors': 'phasors.npz'},
        status={'converged': True, 'steps': 1200},
    )


def tiny_run():
    monitor = MonitorResult(
        name='cavity_0', kind='point', frequencies=np.array([2.4e15]),
        phasors={'hz': np.array([[1.0 + 2.0j]]), 'ex': np.array([[0.5j]]), 'ey': np.array([[0.0]])},
        positions=np.array([[0.0, 0.0]]),
    )
    return RunResult(
        monitors={'cavity_0': monitor}, steps=1200, converged=True, residual=5e-5,
        dt=1e-17, dx=25e-9, shape=(40, 40), origin=(-5e-7, -5e-7),
        waveform={'kind': 'cw', 'omega': 2.4e15, 'ramp_periods': 5.0},
    )


@pytest.fixture(params=["memory", "file"])
def store(request, tmp_path):
    if request.param == "memory":
        return InMemoryResultStore()
    return FileResultStore(tmp_path / "runs")


class TestRunManifest:
    """Tests for the RunManifest data type."""

    def test_key(self):
        """Keys are name, variant and the first 12 digest characters."""
        assert manifest().key == "grid_phase-enz-" + "ab" * 6
        assert manifest(variant=None).key == "grid_phase-" + "ab" * 6

    def test_to_dict_from_dict(self):
        """Test serialization roundtrip."""
        original = manifest()
        original.finish()
        restored = RunManifest.from_dict(original.to_dict())
        assert restored.key == original.key
        assert restored.status == original.status
        assert restored.finished_at == original.finished_at

    def test_json(self):
        """JSON output has sorted keys."""
        text = manifest().to_json()
        assert text.index('"command"') < text.index('"variant"')
        assert RunManifest.from_json(text).outputs == {'phasors': 'phasors.npz'}


class TestResultStore:
    """Tests shared by the in-memory and file stores."""

    def test_write_read(self, store):
        """Test writing and reading values."""
        data = {"name": "test", "count": 42}
        assert store.write("report:run-1", data) is True
        assert store.read("report:run-1") == data
        assert store.write("report:run-2", [1, 2, 3]) is True
        assert store.read("report:run-2") == [1, 2, 3]

    def test_missing(self, store):
        """Missing keys read as None."""
        assert store.read("report:nothing") is None
        assert store.get_manifest("nothing") is None
        assert store.load_run("nothing") is None

    def test_exists_delete(self, store):
        """Test exists and delete operations."""
        store.write("temp:run-1", {"a": 1})
        assert store.exists("temp:run-1") is True
        assert store.delete("temp:run-1") is True
        assert store.exists("temp:run-1") is False
        assert store.delete("temp:run-1") is False

    def test_keys_pattern(self, store):
        """Test keys pattern matching."""
        store.write("manifest:run-1", {})
        store.write("manifest:run-2", {})
        store.write("decay:run-1", {})
        assert len(store.keys("manifest:*")) == 2
        assert len(store.keys("decay:*")) == 1

    def test_manifests(self, store):
        """Manifests are stored under their key and listed as runs."""
        m = manifest()
        assert store.save_manifest(m) is True
        again = store.get_manifest(m.key)
        assert again.to_dict() == m.to_dict()
        assert store.run_keys() == [m.key]

    def test_runs(self, store):
        """Run results come back with their phasors."""
        store.save_run("run-1", tiny_run())
        again = store.load_run("run-1")
        assert again.converged is True
        assert again.monitor('cavity_0').phasor('hz')[0] == 1.0 + 2.0j


class TestFileResultStore:
    """Tests for the directory layout of the file store."""

    def test_layout(self, tmp_path):
        """Each run gets a directory holding its JSON documents and phasors."""
        store = FileResultStore(tmp_path)
        m = manifest()
        store.save_manifest(m)
        store.save_run(m.key, tiny_run())
        run_dir = store.run_dir(m.key)
        assert (run_dir / "manifest.json").exists()
        assert (run_dir / "summary.json").exists()
        assert (run_dir / "phasors.npz").exists()

    def test_top_level_key(self, tmp_path):
        """Keys without a run part live at the root."""
        store = FileResultStore(tmp_path)
        store.write("index", {"runs": []})
        assert (tmp_path / "index.json").exists()
        assert "index" in store.keys()

    def test_corrupt_entry(self, tmp_path):
        """An unreadable JSON document reads as None."""
        store = FileResultStore(tmp_path)
        (tmp_path / "run-1").mkdir()
        (tmp_path / "run-1" / "manifest.json").write_text("{not json")
        assert store.read("manifest:run-1") is None

    def test_for_run_directory(self, tmp_path):
        """A store opened from a run directory sees that run."""
        store = FileResultStore(tmp_path)
        m = manifest()
        store.save_manifest(m)
        reopened = FileResultStore.for_run_directory(store.run_dir(m.key))
        assert reopened.get_manifest(m.key).key == m.key
