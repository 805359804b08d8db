"""Dense retrieval: pluggable embedders and an exact cosine-scan vector index."""

from __future__ import annotations

import hashlib
import json
import urllib.error
import urllib.request
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from .chunker import Chunk
from .errors import ConfigError, RemoteEmbedderError, RepoCtxError
from .lexical import tokenize
from .ranking import RankedHit, rank_scores

DEFAULT_DIMENSION = 384
BUCKET_SEED = 0x5EED_0001
SIGN_SEED = 0x5EED_0002
REMOTE_BATCH_SIZE = 32


class Embedder(Protocol):
    dimension: int
    deterministic: bool

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Return a ``(len(texts), dimension)`` float64 array of unit (or zero) rows."""
        ...


@lru_cache(maxsize=None)
def _seeded_hash(token: str, seed: int) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")
    ).digest()
    return int.from_bytes(digest, "little")


def bucket_of(token: str, dimension: int) -> int:
    return _seeded_hash(token, BUCKET_SEED) % dimension


def sign_of(token: str) -> float:
    return -1.0 if _seeded_hash(token, SIGN_SEED) >> 63 else 1.0


def embed_hashing(text: str, dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Signed feature-hashing bag of tokens, L2-normalized.

    Text with no tokens maps to the all-zeros vector.
    """
    if dimension < 1:
        raise ConfigError(f"dimension must be >= 1, got {dimension}")
    vec = np.zeros(dimension, dtype=np.float64)
    for token in tokenize(text):
        vec[bucket_of(token, dimension)] += sign_of(token)
    norm = np.linalg.norm(vec)
    if norm > 0.0:
        vec /= norm
    return vec


class HashingEmbedder:
    deterministic = True

    def __init__(self, dimension: int = DEFAULT_DIMENSION) -> None:
        if dimension < 1:
            raise ConfigError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dimension), dtype=np.float64)
        for i, text in enumerate(texts):
            out[i] = embed_hashing(text, self.dimension)
        return out

    def __repr__(self) -> str:
        return f"HashingEmbedder(dimension={self.dimension})"


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return np.divide(matrix, norms, out=np.zeros_like(matrix), where=norms > 0)


class RemoteEmbedder:
    """Client for an HTTP embedding service.

    The service accepts ``POST <url>/embed`` with ``{"texts": [...]}`` and
    answers ``{"vectors": [[...], ...]}``. Vectors are re-normalized here.
    """

    deterministic = False

    def __init__(
        self,
        base_url: str,
        dimension: int = DEFAULT_DIMENSION,
        timeout: float = 30.0,
        batch_size: int = REMOTE_BATCH_SIZE,
    ) -> None:
        if dimension < 1 or batch_size < 1:
            raise ConfigError("dimension and batch_size must be positive")
        self.url = base_url.rstrip("/") + "/embed"
        self.dimension = dimension
        self.timeout = timeout
        self.batch_size = batch_size

    def _post(self, texts: Sequence[str], batch_index: int) -> list:
        body = json.dumps({"texts": list(texts)}).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}, method="POST"
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                status = resp.status
                payload = resp.read()
        except urllib.error.HTTPError as exc:
            raise RemoteEmbedderError(f"service answered HTTP {exc.code}", batch_index) from exc
        except (urllib.error.URLError, OSError) as exc:
            raise RemoteEmbedderError(f"transport failure: {exc}", batch_index) from exc
        if status != 200:
            raise RemoteEmbedderError(f"service answered HTTP {status}", batch_index)
        try:
            vectors = json.loads(payload)["vectors"]
        except (ValueError, KeyError, TypeError) as exc:
            raise RemoteEmbedderError("malformed response body", batch_index) from exc
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            got = len(vectors) if isinstance(vectors, list) else "no"
            raise RemoteEmbedderError(
                f"expected {len(texts)} vectors, got {got}", batch_index
            )
        return vectors

    def embed_batch(self, texts: Sequence[str], batch_index: int = 0) -> np.ndarray:
        vectors = self._post(texts, batch_index)
        for row in vectors:
            if not isinstance(row, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in row
            ):
                raise RemoteEmbedderError("vector is not a list of numbers", batch_index)
            if len(row) != self.dimension:
                raise ConfigError(
                    f"service returned dimension {len(row)}, configured {self.dimension}"
                )
        return _normalize_rows(np.asarray(vectors, dtype=np.float64).reshape(len(texts), -1))

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension), dtype=np.float64)
        parts = []
        for batch_index, start in enumerate(range(0, len(texts), self.batch_size)):
            parts.append(self.embed_batch(texts[start : start + self.batch_size], batch_index))
        return np.vstack(parts)

    def __repr__(self) -> str:
        return f"RemoteEmbedder({self.url!r}, dimension={self.dimension})"


def embed_remote(texts: Sequence[str], embedder: RemoteEmbedder) -> list[np.ndarray]:
    return list(embedder.embed(texts))


class EmbeddingError(RepoCtxError):
    """An embedder failure while indexing, tagged with the offending chunk."""

    def __init__(self, chunk_id: str, cause: Exception) -> None:
        super().__init__(f"embedding failed for chunk {chunk_id!r}: {cause}")
        self.chunk_id = chunk_id
        self.category = getattr(cause, "category", "runtime")


@dataclass
class VectorIndex:
    chunk_ids: list[str]
    matrix: np.ndarray
    dimension: int

    def __len__(self) -> int:
        return len(self.chunk_ids)

    def rows(self) -> list[tuple[str, np.ndarray]]:
        return list(zip(self.chunk_ids, self.matrix))


def build_vector(chunks: Sequence[Chunk], embedder: Embedder) -> VectorIndex:
    chunk_ids = [c.id for c in chunks]
    if len(set(chunk_ids)) != len(chunk_ids):
        raise ConfigError("chunk ids must be unique")
    dim = embedder.dimension
    try:
        matrix = embedder.embed([c.text for c in chunks])
    except RemoteEmbedderError as exc:
        batch_size = getattr(embedder, "batch_size", REMOTE_BATCH_SIZE)
        raise EmbeddingError(chunk_ids[exc.batch_index * batch_size], exc) from exc
    if matrix.shape != (len(chunks), dim):
        raise ConfigError(f"embedder produced shape {matrix.shape}, expected {(len(chunks), dim)}")
    return VectorIndex(chunk_ids, matrix, dim)


def query_vector(index: VectorIndex, text: str, embedder: Embedder, top_n: int) -> list[RankedHit]:
    if embedder.dimension != index.dimension:
        raise ConfigError(
            f"embedder dimension {embedder.dimension} != index dimension {index.dimension}"
        )
    query = embedder.embed([text])[0]
    if not np.any(query) or len(index) == 0 or top_n <= 0:
        return []
    sims = index.matrix @ query
    return rank_scores(dict(zip(index.chunk_ids, sims.tolist())), top_n)
