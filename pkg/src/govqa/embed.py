"""Embedding providers and the deterministic offline embedder.

All vectors leaving this module are unit-norm, so downstream cosine
similarity reduces to a dot product.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from . import errors
from .ingest import content_tokens

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: str) -> int:
    """FNV-1a 64-bit hash; fixed here so fixtures are portable."""
    h = _FNV_OFFSET
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class EmbeddingVector:
    dims: int
    values: tuple[float, ...]
    provider_id: str
    model_id: str

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


class EmbeddingProvider(Protocol):
    provider_id: str
    model_id: str
    dims: int

    def embed_batch(self, texts: list[str]) -> list[list[float]]: ...


def _normalize(values: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(values))
    if norm == 0.0 or not np.isfinite(norm):
        raise errors.EmptyText(message="cannot normalize zero or non-finite vector")
    return values / norm


def deterministic_embed(text: str, dims: int = 64) -> EmbeddingVector:
    """Bag-of-tokens hashing embedder: lowercase, split on non-alphanumerics,
    each token adds 1.0 at fnv1a_64(token) mod dims, then L2-normalize."""
    if dims < 8:
        raise errors.InvalidParams(f"dims must be >= 8, got {dims}")
    tokens = content_tokens(text)
    if not tokens:
        raise errors.EmptyText(message="text has no content tokens")
    values = np.zeros(dims, dtype=np.float64)
    for tok in tokens:
        values[fnv1a_64(tok) % dims] += 1.0
    values = _normalize(values)
    return EmbeddingVector(
        dims=dims,
        values=tuple(float(v) for v in values),
        provider_id="deterministic",
        model_id=f"bag-fnv1a-{dims}",
    )


class DeterministicEmbedder:
    """Offline provider wrapping deterministic_embed."""

    provider_id = "deterministic"

    def __init__(self, dims: int = 64):
        self.dims = dims
        self.model_id = f"bag-fnv1a-{dims}"
        self.calls = 0

    def embed_batch(self, texts: list[str]) -> list[list[float]]:
        self.calls += 1
        return [list(deterministic_embed(t, self.dims).values) for t in texts]


class EmbeddingCache:
    """Content-addressed file cache keyed by (provider, model, text hash)."""

    def __init__(self, cache_dir: str | Path | None = None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._mem: dict[str, list[float]] = {}
        self.hits = 0
        self.misses = 0

    def _key(self, provider_id: str, model_id: str, text: str) -> str:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return f"{provider_id}__{model_id}__{digest}".replace("/", "_")

    def get(self, provider_id: str, model_id: str, text: str) -> list[float] | None:
        key = self._key(provider_id, model_id, text)
        if key in self._mem:
            self.hits += 1
            return self._mem[key]
        if self.cache_dir:
            path = self.cache_dir / f"{key}.json"
            if path.is_file():
                values = json.loads(path.read_text())
                self._mem[key] = values
                self.hits += 1
                return values
        self.misses += 1
        return None

    def put(self, provider_id: str, model_id: str, text: str, values: list[float]) -> None:
        key = self._key(provider_id, model_id, text)
        self._mem[key] = values
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            path = self.cache_dir / f"{key}.json"
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(values))
            tmp.replace(path)  # atomic; last-writer-wins on equal values is harmless


_RETRY_ATTEMPTS = 3
_RETRY_BASE_DELAY = 0.25


def embed_texts(
    provider: EmbeddingProvider,
    texts: list[str],
    cache: EmbeddingCache | None = None,
) -> list[EmbeddingVector]:
    for i, t in enumerate(texts):
        if not t or not t.strip():
            raise errors.EmptyText(index=i)

    results: list[list[float] | None] = [None] * len(texts)
    missing: list[int] = []
    for i, t in enumerate(texts):
        cached = cache.get(provider.provider_id, provider.model_id, t) if cache else None
        if cached is not None:
            results[i] = cached
        else:
            missing.append(i)

    if missing:
        batch = [texts[i] for i in missing]
        raw = _call_with_retry(provider, batch)
        for i, values in zip(missing, raw):
            arr = _normalize(np.asarray(values, dtype=np.float64))
            normalized = [float(v) for v in arr]
            results[i] = normalized
            if cache:
                cache.put(provider.provider_id, provider.model_id, texts[i], normalized)

    out = []
    for values in results:
        assert values is not None
        out.append(
            EmbeddingVector(
                dims=len(values),
                values=tuple(values),
                provider_id=provider.provider_id,
                model_id=provider.model_id,
            )
        )
    return out


def _call_with_retry(provider: EmbeddingProvider, texts: list[str]) -> list[list[float]]:
    delay = _RETRY_BASE_DELAY
    last: Exception | None = None
    for attempt in range(_RETRY_ATTEMPTS):
        try:
            return provider.embed_batch(texts)
        except errors.ProviderUnavailable as e:
            last = e
            if attempt < _RETRY_ATTEMPTS - 1:
                time.sleep(delay)
                delay *= 2
    raise errors.ProviderUnavailable(str(last))
