"""
Run Manifest: CSV tables and the JSON record of one CLI run

Responsibility:
- Write plot-ready CSV with a fixed header and 17 significant digits
- Record command, parameters, outputs (with sha256) and headline numbers
- Write every file atomically (temp file in the target directory + rename)
"""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Mapping, Sequence

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"


def format_value(value: Any) -> str:
    """Reals with 17 significant digits, everything else as str"""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return format(value, '.17g')
    return str(value)


def atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def csv_bytes(fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> bytes:
    buf = io.StringIO(newline='')
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format_value(row[k]) for k in fieldnames})
    return buf.getvalue().encode('utf-8')


def sha256_of(path: str) -> str:
    with open(path, 'rb') as f:
        return hashlib.sha256(f.read()).hexdigest()


def _jsonable(value: Any) -> Any:
    """numpy scalars and tuples down to plain JSON types"""
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, 'item') and callable(value.item):
        return value.item()
    return value


@dataclass
class RunManifest:
    """
    One CLI invocation: what ran, with which flags, and what it wrote

    Every CSV goes through write_csv so that it is listed in `outputs`.
    """
    command: str
    out_dir: str
    params: Dict[str, Any] = field(default_factory=dict)
    headline: Dict[str, Any] = field(default_factory=dict)
    outputs: List[Dict[str, str]] = field(default_factory=list)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def _emit(self, name: str, data: bytes) -> str:
        path = os.path.join(self.out_dir, name)
        atomic_write(path, data)
        self.outputs = [o for o in self.outputs if o['file'] != name]
        self.outputs.append({'file': name, 'sha256': sha256_of(path)})
        logger.info("wrote %s", path)
        return path

    def write_csv(self, name: str, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
        return self._emit(name, csv_bytes(fieldnames, rows))

    def write_json(self, name: str, payload: Mapping[str, Any]) -> str:
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
        return self._emit(name, (text + "\n").encode('utf-8'))

    def as_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'tool_version': TOOL_VERSION,
            'command': self.command,
            'timestamp': self.timestamp,
            'params': _jsonable(self.params),
            'outputs': list(self.outputs),
            'headline': _jsonable(self.headline),
        }

    def save(self) -> str:
        path = os.path.join(self.out_dir, MANIFEST_NAME)
        text = json.dumps(self.as_dict(), indent=2, sort_keys=True, allow_nan=True)
        atomic_write(path, (text + "\n").encode('utf-8'))
        logger.info("manifest %s lists %d output files", path, len(self.outputs))
        return path


def load_manifest(path: str) -> Dict[str, Any]:
    with open(path, 'r', encoding='utf-8') as f:
        manifest = json.load(f)
    if manifest.get('schema_version') != SCHEMA_VERSION:
        raise ValueError(f"unsupported manifest schema {manifest.get('schema_version')!r}")
    return manifest
