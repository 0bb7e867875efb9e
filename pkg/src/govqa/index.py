"""Exact k-nearest-neighbor vector store with metadata filtering and
disk persistence.

Exact search is deliberate: corpora here are thousands of chunks, and an
exhaustive scan doubles as a correctness baseline. The query surface is
kept narrow so an ANN backend could slot in later.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import errors
from .embed import EmbeddingVector
from .ingest import Chunk

_MAGIC = b"RGFI"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class RetrievalResult:
    chunk_key: str
    score: float
    rank: int


@dataclass
class _Entry:
    key: str
    vector: np.ndarray  # unit-norm float64
    chunk: Chunk | None
    metadata: dict[str, str] = field(default_factory=dict)


class VectorIndex:
    def __init__(self, dims: int | None = None):
        self.dims = dims
        self._entries: dict[str, _Entry] = {}
        self.version = 0

    def __len__(self) -> int:
        return len(self._entries)

    def _check_dims(self, vector: EmbeddingVector) -> None:
        if self.dims is None:
            self.dims = vector.dims
        elif vector.dims != self.dims:
            raise errors.DimensionMismatch(
                f"vector has {vector.dims} dims, index has {self.dims}"
            )

    def upsert(
        self,
        chunk: Chunk,
        vector: EmbeddingVector,
        metadata: dict[str, str] | None = None,
    ) -> int:
        self._check_dims(vector)
        key = chunk.key
        self._entries[key] = _Entry(
            key=key,
            vector=vector.as_array(),
            chunk=chunk,
            metadata=dict(metadata or {}),
        )
        self.version += 1
        return self.version

    def get_chunk(self, chunk_key: str) -> Chunk | None:
        entry = self._entries.get(chunk_key)
        return entry.chunk if entry else None

    def get_metadata(self, chunk_key: str) -> dict[str, str] | None:
        entry = self._entries.get(chunk_key)
        return dict(entry.metadata) if entry else None

    def query(
        self,
        vector: EmbeddingVector,
        k: int,
        filter: dict[str, str] | None = None,
    ) -> list[RetrievalResult]:
        if k < 1:
            raise errors.InvalidParams(f"k must be >= 1, got {k}")
        if not self._entries:
            return []
        if vector.dims != self.dims:
            raise errors.DimensionMismatch(
                f"query has {vector.dims} dims, index has {self.dims}"
            )

        entries = list(self._entries.values())
        if filter:
            entries = [
                e for e in entries
                if all(e.metadata.get(fk) == fv for fk, fv in filter.items())
            ]
        if not entries:
            return []

        q = vector.as_array()
        scored = [(float(np.dot(e.vector, q)), e.key) for e in entries]
        # score desc, then chunk_key asc for determinism
        scored.sort(key=lambda t: (-t[0], t[1]))
        return [
            RetrievalResult(chunk_key=key, score=score, rank=i + 1)
            for i, (score, key) in enumerate(scored[:k])
        ]

    def delete_document(self, doc_id: str) -> int:
        victims = [k for k in self._entries if k.rsplit(":", 1)[0] == doc_id]
        for k in victims:
            del self._entries[k]
        if victims:
            self.version += 1
        return len(victims)

    # --- persistence ---
    # little-endian: magic "RGFI", format version u32, dims u32, count u64,
    # then length-prefixed records, trailing CRC32 of the record body.

    def persist(self, path: str | Path) -> None:
        path = Path(path)
        dims = self.dims or 0
        body = bytearray()
        for key in sorted(self._entries):
            e = self._entries[key]
            record = {
                "key": e.key,
                "vector": [float(v) for v in e.vector],
                "metadata": e.metadata,
                "chunk": None,
            }
            if e.chunk is not None:
                record["chunk"] = {
                    "doc_id": e.chunk.doc_id,
                    "seq": e.chunk.seq,
                    "text": e.chunk.text,
                    "span": list(e.chunk.span),
                }
            blob = json.dumps(record, ensure_ascii=False).encode("utf-8")
            body += struct.pack("<I", len(blob))
            body += blob

        try:
            with path.open("wb") as f:
                f.write(_MAGIC)
                f.write(struct.pack("<IIQ", _FORMAT_VERSION, dims, len(self._entries)))
                f.write(body)
                f.write(struct.pack("<I", zlib.crc32(bytes(body)) & 0xFFFFFFFF))
        except OSError as e:
            raise errors.IoError(str(e)) from e

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as e:
            raise errors.IoError(str(e)) from e

        header_len = 4 + 4 + 4 + 8
        if len(data) < header_len + 4 or data[:4] != _MAGIC:
            raise errors.CorruptFile("bad magic or truncated header")
        fmt_version, dims, count = struct.unpack("<IIQ", data[4:header_len])
        if fmt_version != _FORMAT_VERSION:
            raise errors.CorruptFile(f"unsupported format version {fmt_version}")

        body = data[header_len:-4]
        (crc,) = struct.unpack("<I", data[-4:])
        if zlib.crc32(body) & 0xFFFFFFFF != crc:
            raise errors.CorruptFile("checksum mismatch")

        index = cls(dims=dims if count > 0 else None)
        offset = 0
        for _ in range(count):
            if offset + 4 > len(body):
                raise errors.CorruptFile("truncated record")
            (blob_len,) = struct.unpack("<I", body[offset:offset + 4])
            offset += 4
            if offset + blob_len > len(body):
                raise errors.CorruptFile("truncated record")
            record = json.loads(body[offset:offset + blob_len].decode("utf-8"))
            offset += blob_len
            chunk = None
            if record["chunk"] is not None:
                c = record["chunk"]
                chunk = Chunk(
                    doc_id=c["doc_id"], seq=c["seq"], text=c["text"],
                    span=(c["span"][0], c["span"][1]),
                )
            index._entries[record["key"]] = _Entry(
                key=record["key"],
                vector=np.asarray(record["vector"], dtype=np.float64),
                chunk=chunk,
                metadata=record["metadata"],
            )
        if offset != len(body):
            raise errors.CorruptFile("trailing bytes after records")
        index.version = count  # version preserved as entry count on load
        return index
