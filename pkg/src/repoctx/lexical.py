"""BM25 keyword retrieval over chunks with a code-aware tokenizer."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .chunker import Chunk
from .errors import ConfigError
from .ranking import RankedHit, rank_scores

# alphanumeric runs (underscore counts as a separator)
_WORD_RE = re.compile(r"[^\W_]+")
# camelCase / PascalCase / ACRONYMWord / digit-run pieces of one word
_PIECE_RE = re.compile(
    r"[A-Z]+(?=[A-Z][a-z])"
    r"|[A-Z]?[a-z]+"
    r"|[A-Z]+"
    r"|[0-9]+"
    r"|[^\W\d_A-Za-z]+"
)


def tokenize(text: str) -> list[str]:
    """Lowercase identifier pieces, e.g. ``getUserName(id)`` -> get, user, name, id."""
    tokens = []
    for word in _WORD_RE.findall(text):
        tokens.extend(piece.lower() for piece in _PIECE_RE.findall(word))
    return tokens


@dataclass
class LexicalIndex:
    postings: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)
    avg_doc_length: float = 0.0
    doc_count: int = 0
    k1: float = 1.2
    b: float = 0.75

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))


def build_lexical(chunks: Iterable[Chunk], k1: float = 1.2, b: float = 0.75) -> LexicalIndex:
    if k1 < 0 or not 0.0 <= b <= 1.0:
        raise ConfigError(f"invalid BM25 parameters k1={k1}, b={b}")
    index = LexicalIndex(k1=k1, b=b)
    for chunk in chunks:
        tokens = tokenize(chunk.text)
        index.doc_lengths[chunk.id] = len(tokens)
        for term, tf in Counter(tokens).items():
            index.postings.setdefault(term, []).append((chunk.id, tf))
    index.doc_count = len(index.doc_lengths)
    if index.doc_count:
        index.avg_doc_length = sum(index.doc_lengths.values()) / index.doc_count
    return index


def query_lexical(index: LexicalIndex, text: str, top_n: int) -> list[RankedHit]:
    """Okapi BM25 scores for ``text``; zero-score chunks are left out.

    Repeated query tokens contribute once per occurrence.
    """
    if top_n < 0:
        raise ConfigError(f"top_n must be >= 0, got {top_n}")
    if index.doc_count == 0:
        return []
    k1, b = index.k1, index.b
    avgdl = index.avg_doc_length
    scores: dict[str, float] = {}
    for term in tokenize(text):
        postings = index.postings.get(term)
        if not postings:
            continue
        idf = index.idf(term)
        for cid, tf in postings:
            # avgdl is 0 only when every chunk is empty, in which case no postings exist
            norm = k1 * (1.0 - b + b * index.doc_lengths[cid] / avgdl)
            scores[cid] = scores.get(cid, 0.0) + idf * tf * (k1 + 1.0) / (tf + norm)
    return rank_scores({cid: s for cid, s in scores.items() if s > 0.0}, top_n)
