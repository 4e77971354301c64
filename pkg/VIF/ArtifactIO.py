"""
Reading and writing of run artifacts: CSV tables with a header naming each quantity and its reduced
unit, JSON documents for scalars and manifests
"""
import hashlib
import json
import logging
import math
import numpy as np
from pathlib import Path
from typing import Dict, Optional
# VIF imports
from VIF.errors import ArtifactError, StageError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def _header_name(column: str) -> str:
    """ 'omega [t/hbar]' -> 'omega' """
    return column.split(' [', 1)[0].strip()


def write_table(path, columns: Dict[str, np.ndarray], units: Optional[Dict[str, str]] = None) -> Path:
    """
    Writes equally long columns as CSV with 17 significant digits, so every double round-trips exactly

    Parameters
    ----------
    path : str or Path
        target file; parent directories are created
    columns : dict
        column name -> 1D array, in output order
    units : dict or None
        column name -> reduced unit shown in the header as 'name [unit]'
    """
    path = Path(path)
    units = units or {}
    names = list(columns)
    data = np.column_stack([np.asarray(columns[name], dtype=float) for name in names]) if names else None
    header = ','.join(f'{name} [{units[name]}]' if name in units else name for name in names)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, data, fmt=FLOAT_FORMAT, delimiter=',', header=header, comments='')
    except OSError as exc:
        raise ArtifactError(f'cannot write {path}: {exc}') from exc
    logger.debug(f'Wrote {path}')
    return path


def read_table(path) -> Dict[str, np.ndarray]:
    """ Inverse of write_table; units are stripped from the column names """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            header = f.readline().strip()
        data = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ArtifactError(f'cannot read table {path}: {exc}') from exc
    names = [_header_name(col) for col in header.split(',')]
    if data.size == 0:
        return {name: np.zeros(0) for name in names}
    if data.shape[1] != len(names):
        raise ArtifactError(f'{path}: {data.shape[1]} columns but {len(names)} header names')
    return {name: data[:, i] for i, name in enumerate(names)}


def _encode(value):
    """ Replaces non-finite floats by strings and numpy scalars by Python ones """
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_encode(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def canonical_json(obj) -> str:
    """ Deterministic JSON text: sorted keys, non-finite floats written as strings """
    return json.dumps(_encode(obj), sort_keys=True, indent=2, allow_nan=False)


def write_json(path, obj) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(canonical_json(obj) + '\n')
    except OSError as exc:
        raise ArtifactError(f'cannot write {path}: {exc}') from exc
    logger.debug(f'Wrote {path}')
    return path


def _decode(value):
    """ Inverse of _encode for the non-finite float markers """
    if isinstance(value, dict):
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    if value in ('inf', '-inf', 'nan'):
        return float(value)
    return value


def read_json(path) -> dict:
    path = Path(path)
    try:
        return _decode(json.loads(path.read_text()))
    except (OSError, ValueError) as exc:
        raise ArtifactError(f'cannot read {path}: {exc}') from exc


def as_float(value) -> float:
    """ Reads back a float written by write_json, including 'inf' and 'nan' """
    return float(value)


def file_checksum(path) -> str:
    """ SHA-256 hex digest of a file """
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as f:
            for block in iter(lambda: f.read(1 << 16), b''):
                digest.update(block)
    except OSError as exc:
        raise ArtifactError(f'cannot read {path}: {exc}') from exc
    return digest.hexdigest()


class StageArtifacts:
    """
    Read access to the files a pipeline stage left under `<out>/<stage>/`. Missing files raise StageError
    naming the stage that should have produced them.
    """

    def __init__(self, out_dir, stage: str):
        self.out_dir = Path(out_dir)
        self.stage = stage
        self.directory = self.out_dir / stage

    def __contains__(self, name: str):
        return (self.directory / name).is_file()

    def path(self, name: str) -> Path:
        return self.directory / name

    def require(self, name: str) -> Path:
        path = self.directory / name
        if not path.is_file():
            raise StageError(f'missing {self.stage}/{name}; run the {self.stage} stage first')
        return path

    def table(self, name: str) -> Dict[str, np.ndarray]:
        return read_table(self.require(name))

    def scalars(self, name: str) -> dict:
        return read_json(self.require(name))
