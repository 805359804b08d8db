"""Hybrid chunk retrieval with relative positioning and final-context assembly.

For a completion point, chunks similar to the prefix are paired with the
chunk that follows them in their file, and chunks similar to the suffix with
the chunk that precedes them. The rendered context is, in order: the
completion file, the recent files, the prefix-side chunks and the
suffix-side chunks, cut to a character budget.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .chunker import Chunk, split_lines
from .errors import ChunkLookupError, ConfigError
from .fusion import FusionConfig, rrf_fuse
from .lexical import LexicalIndex, build_lexical, query_lexical
from .ranking import RankedHit
from .semantic import Embedder, HashingEmbedder, VectorIndex, build_vector, query_vector
from .store import ChunkStore

DEFAULT_REPO_ID = "default"


class Side(str, enum.Enum):
    PREFIX = "prefix_side"
    SUFFIX = "suffix_side"


class SectionLabel(str, enum.Enum):
    COMPLETION_FILE = "completion_file"
    RECENT_FILE = "recent_file"
    PREFIX_HITS = "prefix_hits"
    SUFFIX_HITS = "suffix_hits"


class NeighborOrder(str, enum.Enum):
    # similar chunk, then its neighbor, on both sides
    SIMILAR_FIRST = "similar-first"
    # neighbors placed in file order: a suffix-side prev chunk precedes its hit
    FILE_ORDER = "file-order"


@dataclass(frozen=True)
class CompletionQuery:
    prefix: str
    suffix: str
    completion_file_path: str
    completion_file_content: str
    recent_files: tuple[tuple[str, str], ...] = ()
    repo_id: str = DEFAULT_REPO_ID

    def __post_init__(self) -> None:
        object.__setattr__(self, "recent_files", tuple((p, c) for p, c in self.recent_files))


@dataclass(frozen=True)
class PositionedHit:
    similar: Chunk
    neighbor: Optional[Chunk]
    side: Side
    fused_score: float
    rank: int


@dataclass(frozen=True)
class ContextConfig:
    k: int = 10
    budget_chars: int = 32_000
    fusion: FusionConfig = field(default_factory=FusionConfig)
    attach_neighbors: bool = True
    include_completion_file: bool = True
    include_recent_files: bool = True
    include_prefix_hits: bool = True
    include_suffix_hits: bool = True
    neighbor_order: NeighborOrder = NeighborOrder.SIMILAR_FIRST

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if self.budget_chars <= 0:
            raise ConfigError(f"budget_chars must be > 0, got {self.budget_chars}")
        object.__setattr__(self, "neighbor_order", NeighborOrder(self.neighbor_order))


class RepoIndex:
    """Chunk store plus the lexical and vector indexes built over it."""

    def __init__(
        self,
        store: ChunkStore,
        embedder: Optional[Embedder] = None,
        repo_id: str = DEFAULT_REPO_ID,
        k1: float = 1.2,
        b: float = 0.75,
    ) -> None:
        self.repo_id = repo_id
        self.store = store
        self.embedder = embedder if embedder is not None else HashingEmbedder()
        chunks = list(store)
        self.lexical: LexicalIndex = build_lexical(chunks, k1=k1, b=b)
        self.vectors: VectorIndex = build_vector(chunks, self.embedder)

    @classmethod
    def from_chunks(cls, chunks: Iterable[Chunk], embedder: Optional[Embedder] = None, **kwargs) -> "RepoIndex":
        return cls(ChunkStore(chunks), embedder, **kwargs)

    def search(self, text: str, fusion: FusionConfig = FusionConfig()) -> list[RankedHit]:
        """Fused lexical+semantic hits; each retriever contributes ``fusion.top_n`` candidates."""
        lexical = query_lexical(self.lexical, text, fusion.top_n)
        semantic = query_vector(self.vectors, text, self.embedder, fusion.top_n)
        return rrf_fuse([lexical, semantic], fusion)


@dataclass(frozen=True)
class Section:
    label: SectionLabel
    source_path: str
    start_line: int
    end_line: int
    body: str
    chunk_id: Optional[str] = None
    text: str = ""


@dataclass(frozen=True)
class AssembledContext:
    sections: tuple[Section, ...]
    rendered: str
    budget_chars: int

    @property
    def size(self) -> int:
        return len(self.rendered)


def header_line(path: str, start_line: int, end_line: int) -> str:
    return f"### file: {path} lines {start_line}-{end_line}"


def render_section(label: SectionLabel, path: str, start: int, end: int, body: str,
                   chunk_id: Optional[str] = None) -> Section:
    text = header_line(path, start, end) + "\n" + body
    if not text.endswith("\n"):
        text += "\n"
    return Section(label, path, start, end, body, chunk_id, text)


def _whole_file_section(label: SectionLabel, path: str, content: str) -> Section:
    return render_section(label, path, 1, len(split_lines(content)), content)


def _truncated_completion(path: str, content: str, budget: int) -> Section:
    """Keep the tail of an over-budget completion file so the section is exactly ``budget`` long."""
    line_count = len(split_lines(content))
    head = header_line(path, 1, line_count) + "\n"
    if budget > len(head):
        body = content[len(content) - (budget - len(head)):]
        text = head + body
    else:
        # no room for the header at all
        body = content[len(content) - budget:]
        text = body
    return Section(SectionLabel.COMPLETION_FILE, path, 1, line_count, body, None, text)


class ContextEngine:
    def __init__(
        self,
        indexes: RepoIndex | Mapping[str, RepoIndex],
        config: ContextConfig = ContextConfig(),
    ) -> None:
        if isinstance(indexes, RepoIndex):
            indexes = {indexes.repo_id: indexes}
        self.indexes = dict(indexes)
        self.config = config

    def index_for(self, repo_id: str) -> RepoIndex:
        try:
            return self.indexes[repo_id]
        except KeyError:
            raise ChunkLookupError(f"repository {repo_id!r} is not indexed") from None

    def _collect(self, query: CompletionQuery, text: str, side: Side, k: Optional[int]) -> list[PositionedHit]:
        k = self.config.k if k is None else k
        if k < 0:
            raise ConfigError(f"k must be >= 0, got {k}")
        index = self.index_for(query.repo_id)
        if k == 0:
            return []
        hits = []
        for fused in index.search(text, self.config.fusion):
            chunk = index.store.get(fused.chunk_id)
            if chunk.file_path == query.completion_file_path:
                continue
            neighbor = None
            if self.config.attach_neighbors:
                if side is Side.PREFIX:
                    neighbor = index.store.next_of(chunk.id)
                else:
                    neighbor = index.store.prev_of(chunk.id)
            hits.append(PositionedHit(chunk, neighbor, side, fused.score, len(hits) + 1))
            if len(hits) == k:
                break
        return hits

    def collect_prefix_hits(self, query: CompletionQuery, k: Optional[int] = None) -> list[PositionedHit]:
        """Chunks similar to the prefix, each paired with the chunk that follows it."""
        return self._collect(query, query.prefix, Side.PREFIX, k)

    def collect_suffix_hits(self, query: CompletionQuery, k: Optional[int] = None) -> list[PositionedHit]:
        """Chunks similar to the suffix, each paired with the chunk that precedes it."""
        return self._collect(query, query.suffix, Side.SUFFIX, k)

    def assemble(
        self,
        query: CompletionQuery,
        prefix_hits: Sequence[PositionedHit],
        suffix_hits: Sequence[PositionedHit],
        budget_chars: Optional[int] = None,
    ) -> AssembledContext:
        return assemble(query, prefix_hits, suffix_hits, budget_chars or self.config.budget_chars,
                        config=self.config)

    def build_context(self, query: CompletionQuery) -> AssembledContext:
        cfg = self.config
        prefix_hits = self.collect_prefix_hits(query) if cfg.include_prefix_hits else []
        suffix_hits = self.collect_suffix_hits(query) if cfg.include_suffix_hits else []
        return self.assemble(query, prefix_hits, suffix_hits)


def _hit_chunks(hit: PositionedHit, order: NeighborOrder) -> list[Chunk]:
    if hit.neighbor is None:
        return [hit.similar]
    if order is NeighborOrder.FILE_ORDER and hit.side is Side.SUFFIX:
        return [hit.neighbor, hit.similar]
    return [hit.similar, hit.neighbor]


def assemble(
    query: CompletionQuery,
    prefix_hits: Sequence[PositionedHit],
    suffix_hits: Sequence[PositionedHit],
    budget_chars: int = 32_000,
    config: ContextConfig = ContextConfig(),
) -> AssembledContext:
    """Render the four context parts in priority order within ``budget_chars``.

    A section that does not fit is dropped whole and later sections are still
    tried. Only the completion file is ever cut, and only when it alone
    exceeds the budget.
    """
    if budget_chars <= 0:
        raise ConfigError(f"budget_chars must be > 0, got {budget_chars}")
    sections: list[Section] = []
    used = 0

    def try_add(section: Section) -> bool:
        nonlocal used
        if used + len(section.text) > budget_chars:
            return False
        sections.append(section)
        used += len(section.text)
        return True

    completion_path = query.completion_file_path
    if config.include_completion_file:
        section = _whole_file_section(
            SectionLabel.COMPLETION_FILE, completion_path, query.completion_file_content
        )
        if not try_add(section):
            try_add(_truncated_completion(completion_path, query.completion_file_content, budget_chars))

    included_files = {completion_path}
    if config.include_recent_files:
        for path, content in query.recent_files:
            if path in included_files:
                continue
            if try_add(_whole_file_section(SectionLabel.RECENT_FILE, path, content)):
                included_files.add(path)

    seen: set[str] = set()
    for label, hits in ((SectionLabel.PREFIX_HITS, prefix_hits), (SectionLabel.SUFFIX_HITS, suffix_hits)):
        for hit in hits:
            for chunk in _hit_chunks(hit, config.neighbor_order):
                if chunk.id in seen or chunk.file_path in included_files:
                    continue
                seen.add(chunk.id)
                try_add(render_section(label, chunk.file_path, chunk.start_line, chunk.end_line,
                                       chunk.text, chunk.id))

    rendered = "".join(s.text for s in sections)
    return AssembledContext(tuple(sections), rendered, budget_chars)
