"""
Field snapshot files: one JSON header line, then little-endian float64
(re, im) pairs in row-major order with rows running along y.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

SNAPSHOT_FORMAT = "enzgrid-snapshot/1"


@dataclass
class Snapshot:
    values: np.ndarray  # complex, shape (nx, ny)
    dx: float
    component: str
    omega: float
    origin: Tuple[float, float] = (0.0, 0.0)

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    def header(self) -> Dict[str, Any]:
        return {
            'format': SNAPSHOT_FORMAT,
            'nx': self.nx,
            'ny': self.ny,
            'dx': self.dx,
            'component': self.component,
            'omega': self.omega,
            'origin': list(self.origin),
        }


def write_snapshot(snapshot: Snapshot, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.ascontiguousarray(snapshot.values.T, dtype='<c16')
    with open(path, 'wb') as f:
        f.write(json.dumps(snapshot.header(), sort_keys=True).encode('utf-8') + b"\n")
        f.write(rows.view('<f8').tobytes())
    logger.debug("Wrote %s snapshot %dx%d to %s", snapshot.component, snapshot.nx, snapshot.ny, path)
    return path


def read_snapshot(path: Union[str, Path]) -> Snapshot:
    path = Path(path)
    with open(path, 'rb') as f:
        header = json.loads(f.readline().decode('utf-8'))
        payload = f.read()
    if header.get('format') != SNAPSHOT_FORMAT:
        raise ConfigError(f"not a snapshot file (format {header.get('format')!r})", str(path))
    nx, ny = int(header['nx']), int(header['ny'])
    if len(payload) != nx * ny * 16:
        raise ConfigError(f"expected {nx * ny * 16} payload bytes, found {len(payload)}", str(path))
    pairs = np.frombuffer(payload, dtype='<f8').reshape(ny, nx, 2)
    values = (pairs[..., 0] + 1j * pairs[..., 1]).T.copy()
    return Snapshot(
        values=values,
        dx=float(header['dx']),
        component=header['component'],
        omega=float(header['omega']),
        origin=tuple(header.get('origin', (0.0, 0.0))),
    )
