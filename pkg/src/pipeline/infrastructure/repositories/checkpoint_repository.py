# src/pipeline/infrastructure/repositories/checkpoint_repository.py
"""Checkpoint files.

Layout (little-endian)::

    magic       4 bytes  b"OADC"
    header_len  u32
    header      UTF-8 JSON: format_version, config, parameters[name, shape, offset]
    payload     float32 values of every parameter, manifest order
    crc32       u32 of the payload

Offsets are byte offsets into the payload and must tile it exactly.
"""

import json
import struct
import zlib
from pathlib import Path

import numpy as np
import structlog

from src.pipeline.domain.value_objects.checkpoint import Checkpoint
from src.shared.domain.exceptions.base import CheckpointCorruptionException
from src.shared.infrastructure.repositories.base import BaseFileRepository

logger = structlog.get_logger()

MAGIC = b"OADC"
FORMAT_VERSION = 1
SUFFIX = ".oadc"
_PREFIX = struct.Struct("<4sI")
_CRC = struct.Struct("<I")
_FLOAT = np.dtype("<f4")


class CheckpointRepository(BaseFileRepository[Checkpoint]):
    """Binary checkpoint storage with a CRC32 over the payload."""

    def write(self, path: Path, item: Checkpoint) -> None:
        manifest = []
        chunks = []
        offset = 0
        for name, values in item.tensors.items():
            raw = np.ascontiguousarray(values, dtype=_FLOAT).tobytes(order="C")
            manifest.append({"name": name, "shape": list(values.shape), "offset": offset})
            chunks.append(raw)
            offset += len(raw)

        payload = b"".join(chunks)
        header = json.dumps(
            {"format_version": FORMAT_VERSION, "config": item.config, "parameters": manifest},
            sort_keys=True,
            separators=(",", ":"),
        ).encode("utf-8")

        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            handle.write(_PREFIX.pack(MAGIC, len(header)))
            handle.write(header)
            handle.write(payload)
            handle.write(_CRC.pack(zlib.crc32(payload) & 0xFFFFFFFF))

        logger.info("Checkpoint written", path=str(path), parameters=len(manifest), bytes=len(payload))

    def read(self, path: Path) -> Checkpoint:
        try:
            blob = path.read_bytes()
        except FileNotFoundError as e:
            raise CheckpointCorruptionException(f"Checkpoint not found: {path}") from e

        if len(blob) < _PREFIX.size + _CRC.size:
            raise CheckpointCorruptionException(f"{path}: file too short to be a checkpoint")
        magic, header_len = _PREFIX.unpack_from(blob)
        if magic != MAGIC:
            raise CheckpointCorruptionException(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")

        payload_start = _PREFIX.size + header_len
        payload_end = len(blob) - _CRC.size
        if payload_start > payload_end:
            raise CheckpointCorruptionException(f"{path}: header length {header_len} exceeds file size")

        try:
            header = json.loads(blob[_PREFIX.size:payload_start].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise CheckpointCorruptionException(f"{path}: unreadable header: {e}") from e

        payload = blob[payload_start:payload_end]
        (stored_crc,) = _CRC.unpack_from(blob, payload_end)
        actual_crc = zlib.crc32(payload) & 0xFFFFFFFF
        if stored_crc != actual_crc:
            raise CheckpointCorruptionException(
                f"{path}: payload CRC32 mismatch (stored {stored_crc:#010x}, computed {actual_crc:#010x})"
            )

        if header.get("format_version") != FORMAT_VERSION:
            raise CheckpointCorruptionException(
                f"{path}: unsupported checkpoint version {header.get('format_version')}"
            )

        try:
            tensors = self._unpack(path, header["parameters"], payload)
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointCorruptionException(f"{path}: malformed parameter manifest: {e}") from e
        return Checkpoint(header.get("config", {}), tensors)

    @staticmethod
    def _unpack(path: Path, manifest: list[dict], payload: bytes) -> dict[str, np.ndarray]:
        tensors = {}
        cursor = 0
        for entry in manifest:
            shape = tuple(int(s) for s in entry["shape"])
            count = int(np.prod(shape, dtype=np.int64))
            if entry["offset"] != cursor:
                raise CheckpointCorruptionException(
                    f"{path}: parameter {entry['name']} at offset {entry['offset']}, expected {cursor}"
                )
            end = cursor + count * _FLOAT.itemsize
            if end > len(payload):
                raise CheckpointCorruptionException(f"{path}: parameter {entry['name']} runs past the payload")
            tensors[entry["name"]] = (
                np.frombuffer(payload[cursor:end], dtype=_FLOAT).reshape(shape).astype(np.float32)
            )
            cursor = end

        if cursor != len(payload):
            raise CheckpointCorruptionException(
                f"{path}: manifest covers {cursor} bytes of a {len(payload)}-byte payload"
            )
        return tensors


def save_checkpoint(path: Path, checkpoint: Checkpoint) -> None:
    CheckpointRepository().write(Path(path), checkpoint)


def load_checkpoint(path: Path) -> Checkpoint:
    return CheckpointRepository().read(Path(path))
