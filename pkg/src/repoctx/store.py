"""In-memory chunk database with neighbor lookups and a JSON-lines file format.

Each line of a store file is a JSON array with the fields
``[id, file_path, start_line, end_line, text, prev_id, next_id]``; an absent
link is written as the empty string.
"""

from __future__ import annotations

import json
import os
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional

from .chunker import Chunk
from .errors import ChunkLookupError, IntegrityError, StoreParseError

RECORD_FIELDS = ("id", "file_path", "start_line", "end_line", "text", "prev_id", "next_id")


class ChunkStore:
    """Immutable mapping of chunk id to :class:`Chunk` plus a per-file index."""

    def __init__(self, chunks: Iterable[Chunk] = ()) -> None:
        by_id: dict[str, Chunk] = {}
        for chunk in chunks:
            if chunk.id in by_id:
                raise IntegrityError(f"duplicate chunk id {chunk.id!r}")
            by_id[chunk.id] = chunk
        _check_links(by_id)

        by_file: dict[str, list[str]] = {}
        for chunk in sorted(by_id.values(), key=lambda c: (c.file_path, c.start_line)):
            by_file.setdefault(chunk.file_path, []).append(chunk.id)
        self._chunks = by_id
        self._by_file = {path: tuple(ids) for path, ids in by_file.items()}

    @property
    def chunks(self) -> Mapping[str, Chunk]:
        return MappingProxyType(self._chunks)

    @property
    def by_file(self) -> Mapping[str, tuple[str, ...]]:
        return MappingProxyType(self._by_file)

    def __len__(self) -> int:
        return len(self._chunks)

    def __iter__(self) -> Iterator[Chunk]:
        return iter(self._chunks.values())

    def __contains__(self, chunk_id: object) -> bool:
        return chunk_id in self._chunks

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChunkStore):
            return NotImplemented
        return list(self._chunks.items()) == list(other._chunks.items())

    def get(self, chunk_id: str) -> Optional[Chunk]:
        return self._chunks.get(chunk_id)

    def _require(self, chunk_id: str) -> Chunk:
        try:
            return self._chunks[chunk_id]
        except KeyError:
            raise ChunkLookupError(f"unknown chunk id {chunk_id!r}") from None

    def next_of(self, chunk_id: str) -> Optional[Chunk]:
        chunk = self._require(chunk_id)
        return self._chunks[chunk.next_id] if chunk.next_id else None

    def prev_of(self, chunk_id: str) -> Optional[Chunk]:
        chunk = self._require(chunk_id)
        return self._chunks[chunk.prev_id] if chunk.prev_id else None


def _check_links(by_id: Mapping[str, Chunk]) -> None:
    for chunk in by_id.values():
        for attr in ("prev_id", "next_id"):
            target_id = getattr(chunk, attr)
            if target_id is None:
                continue
            target = by_id.get(target_id)
            if target is None:
                raise IntegrityError(f"{chunk.id!r}.{attr} points to missing chunk {target_id!r}")
            if target.file_path != chunk.file_path:
                raise IntegrityError(f"{chunk.id!r}.{attr} crosses files to {target_id!r}")
            back = target.next_id if attr == "prev_id" else target.prev_id
            if back != chunk.id:
                raise IntegrityError(f"{chunk.id!r}.{attr} is not reciprocated by {target_id!r}")


def put_all(chunks: Iterable[Chunk]) -> ChunkStore:
    return ChunkStore(chunks)


def encode_record(chunk: Chunk) -> str:
    row = [
        chunk.id,
        chunk.file_path,
        chunk.start_line,
        chunk.end_line,
        chunk.text,
        chunk.prev_id or "",
        chunk.next_id or "",
    ]
    return json.dumps(row, ensure_ascii=False, separators=(",", ":"))


def decode_record(line: str, record_index: int) -> Chunk:
    try:
        row = json.loads(line)
    except json.JSONDecodeError as exc:
        raise StoreParseError(f"malformed JSON ({exc.msg})", record_index) from None
    if not isinstance(row, list) or len(row) != len(RECORD_FIELDS):
        raise StoreParseError(f"expected a {len(RECORD_FIELDS)}-field array", record_index)
    cid, path, start, end, text, prev_id, next_id = row
    if not all(isinstance(v, str) for v in (cid, path, text, prev_id, next_id)):
        raise StoreParseError("string field has the wrong type", record_index)
    if not (type(start) is int and type(end) is int):
        raise StoreParseError("line bounds must be integers", record_index)
    if not cid:
        raise StoreParseError("empty chunk id", record_index)
    return Chunk(cid, path, start, end, text, prev_id or None, next_id or None)


def save(store: ChunkStore, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for chunk in store:
            fh.write(encode_record(chunk))
            fh.write("\n")


def load(path: str | os.PathLike) -> ChunkStore:
    """Read a store file; parse errors name the 1-based record (line) index."""
    chunks = []
    with open(path, encoding="utf-8", newline="\n") as fh:
        for index, line in enumerate(fh, start=1):
            if not line.endswith("\n"):
                raise StoreParseError("truncated record (missing line terminator)", index)
            chunks.append(decode_record(line[:-1], index))
    return ChunkStore(chunks)
