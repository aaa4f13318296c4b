"""
Model checkpoints.

Layout:
    CHECKPOINT_MAGIC
    uint32 LE  format version
    uint32 LE  header length in bytes
    header     UTF-8 JSON: model config plus [{name, shape}] in declared order
    payload    little-endian float64 parameter values in the same order
"""

import json
import struct
from pathlib import Path
from typing import Union

import numpy as np

from clt.config import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from clt.errors import CheckpointFormatError
from clt.models.base import SentimentModel
from clt.utils.logging.component_loggers import get_model_logger

logger = get_model_logger(__name__)

_U32 = struct.Struct('<I')


def save_checkpoint(model: SentimentModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    params = model.parameters()
    header = dict(model.config())
    header['parameters'] = [{'name': p.name, 'shape': list(p.shape)} for p in params]
    header_bytes = json.dumps(header, sort_keys=True).encode('utf-8')

    with open(path, 'wb') as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(_U32.pack(CHECKPOINT_VERSION))
        f.write(_U32.pack(len(header_bytes)))
        f.write(header_bytes)
        for p in params:
            f.write(np.ascontiguousarray(p.data, dtype='<f8').tobytes())

    logger.info(f"Saved {model.kind} checkpoint ({model.num_parameters()} values) to {path}",
                extra={'action': 'checkpoint_saved', 'path': str(path), 'model_kind': model.kind})
    return path


def read_header(path: Union[str, Path]) -> dict:
    with open(path, 'rb') as f:
        header, _ = _read_header(f, str(path))
    return header


def _read_header(f, path: str):
    magic = f.read(len(CHECKPOINT_MAGIC))
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(f"{path}: not a checkpoint file")
    raw = f.read(_U32.size * 2)
    if len(raw) != _U32.size * 2:
        raise CheckpointFormatError(f"{path}: truncated header")
    version, header_len = _U32.unpack(raw[:4])[0], _U32.unpack(raw[4:])[0]
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(f"{path}: checkpoint version {version}, expected {CHECKPOINT_VERSION}")
    try:
        header = json.loads(f.read(header_len).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointFormatError(f"{path}: unreadable header: {e}")
    return header, version


def load_checkpoint(path: Union[str, Path]) -> SentimentModel:
    """
    Rebuild a model from a checkpoint written by `save_checkpoint`.

    Raises:
        CheckpointFormatError: on a bad magic, version, header or payload size,
            or when the declared parameters do not match the rebuilt model
    """
    from clt.models.registry import model_from_config

    path = str(path)
    with open(path, 'rb') as f:
        header, _ = _read_header(f, path)
        payload = f.read()

    model = model_from_config(header)
    params = model.parameters()
    declared = [(d['name'], tuple(d['shape'])) for d in header.get('parameters', [])]
    expected = [(p.name, p.shape) for p in params]
    if declared != expected:
        raise CheckpointFormatError(f"{path}: declared parameters do not match a {model.kind} model")

    values = np.frombuffer(payload, dtype='<f8')
    if values.size != sum(p.size for p in params):
        raise CheckpointFormatError(
            f"{path}: payload holds {values.size} values, expected {sum(p.size for p in params)}"
        )
    offset = 0
    for p in params:
        p.data[...] = values[offset:offset + p.size].reshape(p.shape)
        offset += p.size

    logger.info(f"Loaded {model.kind} checkpoint from {path}",
                extra={'action': 'checkpoint_loaded', 'path': path, 'model_kind': model.kind})
    return model
