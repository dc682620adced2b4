"""
CSV tables and JSON reports with input digests.

CSVs are written through pandas with CRLF line endings and full-precision
floats; reports are canonical JSON (sorted keys) so identical inputs give
identical bytes.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Sequence, Union

import pandas as pd

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DECAY_COLUMNS = ("distance_m", "normalized_E")
PHASE_COLUMNS = ("cavity_i", "cavity_j", "phase_rad")
COUPLING_COLUMNS = ("omega_rad_s", "gamma21_norm", "lamb_norm")
SLAB_COLUMNS = ("omega_rad_s", "measured_re", "measured_im", "model_re", "model_im", "relative_error")


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_json(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode('utf-8')).hexdigest()


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_encode)


def _encode(value: Any) -> Any:
    if isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, 'tolist'):
        return value.tolist()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, index=False, lineterminator="\r\n", float_format="%.17g")
    logger.debug("Wrote %d rows to %s", len(frame), path)
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)


def write_report(
    path: PathLike,
    analysis: str,
    result: Mapping[str, Any],
    inputs: Mapping[str, PathLike] = (),
    extra: Mapping[str, Any] = (),
) -> Path:
    """JSON report carrying the SHA-256 of every input file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report: Dict[str, Any] = {
        'analysis': analysis,
        'inputs': {name: {'path': str(p), 'sha256': sha256_file(p)} for name, p in dict(inputs).items()},
        'result': dict(result),
    }
    report.update(dict(extra))
    path.write_text(canonical_json(report) + "\n", encoding='utf-8')
    logger.info("Wrote %s report to %s", analysis, path)
    return path
