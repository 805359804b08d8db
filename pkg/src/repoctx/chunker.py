"""Fixed-size line chunking with overlap and prev/next links."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_EXTENSIONS = frozenset({".py", ".kt", ".kts"})
BINARY_SNIFF_BYTES = 8192


@dataclass(frozen=True)
class ChunkConfig:
    chunk_lines: int = 20
    overlap_lines: int = 5

    def __post_init__(self) -> None:
        if self.chunk_lines < 1:
            raise ConfigError(f"chunk_lines must be >= 1, got {self.chunk_lines}")
        if self.overlap_lines < 0:
            raise ConfigError(f"overlap_lines must be >= 0, got {self.overlap_lines}")
        if self.chunk_lines <= self.overlap_lines:
            raise ConfigError(
                f"chunk_lines ({self.chunk_lines}) must exceed overlap_lines ({self.overlap_lines})"
            )

    @property
    def stride(self) -> int:
        return self.chunk_lines - self.overlap_lines


@dataclass(frozen=True)
class Chunk:
    id: str
    file_path: str
    start_line: int
    end_line: int
    text: str
    prev_id: Optional[str] = None
    next_id: Optional[str] = None

    @property
    def line_count(self) -> int:
        return self.end_line - self.start_line + 1


def chunk_id(file_path: str, start_line: int, end_line: int) -> str:
    return f"{file_path}:{start_line}-{end_line}"


def split_lines(content: str) -> list[str]:
    """Split on LF after CRLF normalization; a trailing newline adds no line."""
    if not content:
        return []
    content = content.replace("\r\n", "\n")
    lines = content.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def window_bounds(line_count: int, config: ChunkConfig) -> list[tuple[int, int]]:
    """1-based inclusive (start, end) pairs for a file of ``line_count`` lines.

    A window after the first is only emitted when it contributes at least one
    line not already covered, i.e. ``start + overlap <= line_count``.
    """
    n, m = config.chunk_lines, config.overlap_lines
    bounds = []
    start = 1
    while start <= line_count and (start == 1 or start + m <= line_count):
        bounds.append((start, min(start + n - 1, line_count)))
        start += config.stride
    return bounds


def chunk_file(file_path: str, content: str, config: ChunkConfig = ChunkConfig()) -> list[Chunk]:
    lines = split_lines(content)
    bounds = window_bounds(len(lines), config)
    ids = [chunk_id(file_path, s, e) for s, e in bounds]
    chunks = []
    for i, (start, end) in enumerate(bounds):
        chunks.append(
            Chunk(
                id=ids[i],
                file_path=file_path,
                start_line=start,
                end_line=end,
                text="\n".join(lines[start - 1 : end]),
                prev_id=ids[i - 1] if i > 0 else None,
                next_id=ids[i + 1] if i + 1 < len(ids) else None,
            )
        )
    return chunks


def _looks_binary(raw: bytes) -> bool:
    return b"\x00" in raw[:BINARY_SNIFF_BYTES]


def scan_repository(
    repo_root: str | os.PathLike,
    extensions: Iterable[str] = DEFAULT_EXTENSIONS,
) -> tuple[list[tuple[str, str]], list[str]]:
    """Collect ``(relative_path, text)`` for matching files in lexicographic order.

    Returns the readable files and the relative paths that were skipped
    (binary, undecodable or unreadable). Directories whose name starts with a
    dot are not descended into.
    """
    root = Path(repo_root)
    if not root.is_dir():
        raise NotADirectoryError(f"repository root is not a directory: {root}")
    os.listdir(root)  # surfaces PermissionError for an unreadable root
    exts = {e if e.startswith(".") else "." + e for e in extensions}

    candidates = []
    for dirpath, dirnames, filenames in os.walk(root, onerror=_warn_walk):
        dirnames[:] = [d for d in dirnames if not d.startswith(".")]
        for name in filenames:
            if Path(name).suffix in exts:
                full = Path(dirpath) / name
                candidates.append(full.relative_to(root).as_posix())
    candidates.sort()

    files, skipped = [], []
    for rel in candidates:
        try:
            raw = (root / rel).read_bytes()
        except OSError as exc:
            logger.warning("skipping unreadable file %s: %s", rel, exc)
            skipped.append(rel)
            continue
        if _looks_binary(raw):
            skipped.append(rel)
            continue
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            skipped.append(rel)
            continue
        files.append((rel, text))
    if skipped:
        logger.warning("skipped %d non-text or unreadable files", len(skipped))
    return files, skipped


def _warn_walk(exc: OSError) -> None:
    logger.warning("cannot list %s: %s", exc.filename, exc)


def chunk_repository(
    repo_root: str | os.PathLike,
    file_filter: Iterable[str] = DEFAULT_EXTENSIONS,
    config: ChunkConfig = ChunkConfig(),
) -> list[Chunk]:
    files, _ = scan_repository(repo_root, file_filter)
    chunks: list[Chunk] = []
    for rel, text in files:
        chunks.extend(chunk_file(rel, text, config))
    return chunks
