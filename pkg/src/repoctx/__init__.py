"""Repository context collection for fill-in-the-middle code completion."""

from .chunker import Chunk, ChunkConfig, chunk_file, chunk_repository
from .context import (
    AssembledContext,
    CompletionQuery,
    ContextConfig,
    ContextEngine,
    PositionedHit,
    RepoIndex,
    assemble,
)
from .fusion import FusionConfig, rrf_fuse
from .lexical import build_lexical, query_lexical, tokenize
from .ranking import RankedHit
from .semantic import HashingEmbedder, RemoteEmbedder, build_vector, embed_hashing, query_vector
from .store import ChunkStore, load, put_all, save

__version__ = "0.1.0"
