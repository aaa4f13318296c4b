"""
Input validation and content hashing for run manifests.
"""

import hashlib
from pathlib import Path
from typing import Dict, Iterable, Optional

from clt.errors import ConfigError

HASH_CHUNK_BYTES = 1 << 20


def require_readable(path: Optional[str], what: str = "file") -> Path:
    """
    Check that `path` names an existing readable file.

    Raises:
        ConfigError: naming the path when it is missing or not a file
    """
    if not path:
        raise ConfigError(f"no {what} path given")
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {path}")
    try:
        with open(p, 'rb'):
            pass
    except OSError as e:
        raise ConfigError(f"{what} not readable: {path} ({e})")
    return p


def content_hash(path: str) -> str:
    """sha256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(HASH_CHUNK_BYTES), b''):
            digest.update(chunk)
    return digest.hexdigest()


def hash_inputs(paths: Iterable[Optional[str]]) -> Dict[str, str]:
    return {str(p): content_hash(p) for p in paths if p}


def format_file_size(size_bytes: int) -> str:
    """Human-readable size for log lines: `512 B`, `1.5 KB`, `3.2 GB`."""
    size, unit = float(size_bytes), 'B'
    for unit in ('B', 'KB', 'MB', 'GB', 'TB'):
        if size < 1024 or unit == 'TB':
            break
        size /= 1024
    return f"{int(size)} B" if unit == 'B' else f"{size:.1f} {unit}"
