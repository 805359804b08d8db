from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping


@dataclass(frozen=True)
class RankedHit:
    chunk_id: str
    score: float
    rank: int


def rank_scores(scores: Mapping[str, float], top_n: int) -> list[RankedHit]:
    """Sort by descending score, ascending chunk id; keep ``top_n`` and number from 1."""
    if top_n <= 0:
        return []
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))[:top_n]
    return [RankedHit(cid, score, rank) for rank, (cid, score) in enumerate(ordered, start=1)]
