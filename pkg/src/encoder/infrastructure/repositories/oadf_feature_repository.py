# src/encoder/infrastructure/repositories/oadf_feature_repository.py
"""OADF binary feature files.

Layout (little-endian)::

    magic    4 bytes  b"OADF"
    version  u32      1
    T        u32      number of snippets
    D        u32      feature dimension
    payload  T*D float32, row-major

The video id is the file stem.
"""

import struct
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np
import structlog

from src.encoder.domain.value_objects.feature_snippet import FeatureSnippet
from src.shared.domain.exceptions.base import FormatException
from src.encoder.domain.repositories.feature_repository import FeatureRepository

logger = structlog.get_logger()

MAGIC = b"OADF"
VERSION = 1
SUFFIX = ".oadf"
_HEADER = struct.Struct("<4sIII")
_FLOAT = np.dtype("<f4")


def _read_header(handle: BinaryIO, path: Path) -> tuple[int, int]:
    raw = handle.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise FormatException(
            f"{path}: truncated header, expected {_HEADER.size} bytes, got {len(raw)}"
        )
    magic, version, num_snippets, dim = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FormatException(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatException(f"{path}: unsupported OADF version {version}, expected {VERSION}")
    if dim < 1:
        raise FormatException(f"{path}: feature dimension must be positive, got {dim}")
    return num_snippets, dim


def expected_size(num_snippets: int, dim: int) -> int:
    return _HEADER.size + num_snippets * dim * _FLOAT.itemsize


class OadfFeatureRepository(FeatureRepository):
    """Whole-file access to ``[T x D]`` float32 features."""

    def read(self, path: Path) -> np.ndarray:
        try:
            with path.open("rb") as handle:
                num_snippets, dim = _read_header(handle, path)
                payload = handle.read()
        except FileNotFoundError as e:
            raise FormatException(f"Feature file not found: {path}") from e

        expected = expected_size(num_snippets, dim)
        actual = _HEADER.size + len(payload)
        if actual != expected:
            raise FormatException(
                f"{path}: expected {expected} bytes for T={num_snippets}, D={dim}, got {actual}"
            )
        return np.frombuffer(payload, dtype=_FLOAT).reshape(num_snippets, dim).astype(np.float32)

    def write(self, path: Path, item: np.ndarray) -> None:
        features = np.asarray(item)
        if features.ndim != 2:
            raise FormatException(f"Features must be [T x D], got shape {features.shape}")
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            handle.write(_HEADER.pack(MAGIC, VERSION, features.shape[0], features.shape[1]))
            handle.write(features.astype(_FLOAT).tobytes(order="C"))

    def read_dim(self, path: Path) -> tuple[int, int]:
        """``(T, D)`` from the header only."""
        try:
            with path.open("rb") as handle:
                return _read_header(handle, path)
        except FileNotFoundError as e:
            raise FormatException(f"Feature file not found: {path}") from e

    def iter_snippets(self, path: Path) -> Iterator[FeatureSnippet]:
        """Yield snippets one at a time as their bytes are read."""
        video_id = path.stem
        with path.open("rb") as handle:
            num_snippets, dim = _read_header(handle, path)
            row_bytes = dim * _FLOAT.itemsize
            for index in range(num_snippets):
                raw = handle.read(row_bytes)
                if len(raw) < row_bytes:
                    raise FormatException(
                        f"{path}: truncated at snippet {index}, expected "
                        f"{expected_size(num_snippets, dim)} bytes in total"
                    )
                feature = np.frombuffer(raw, dtype=_FLOAT).astype(np.float32)
                yield FeatureSnippet(video_id, index, feature)
