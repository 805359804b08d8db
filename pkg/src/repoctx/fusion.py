"""Weighted reciprocal rank fusion of ranked hit lists."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError
from .ranking import RankedHit, rank_scores


@dataclass(frozen=True)
class FusionConfig:
    # order: (lexical, semantic)
    weights: tuple[float, ...] = (0.2, 0.8)
    rrf_k: float = 60.0
    top_n: int = 30

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if any(w < 0 for w in self.weights) or not any(w > 0 for w in self.weights):
            raise ConfigError(f"weights must be non-negative with one > 0, got {self.weights}")
        if self.rrf_k <= 0:
            raise ConfigError(f"rrf_k must be positive, got {self.rrf_k}")
        if self.top_n < 1:
            raise ConfigError(f"top_n must be >= 1, got {self.top_n}")


def rrf_fuse(lists: Sequence[Sequence[RankedHit]], config: FusionConfig = FusionConfig()) -> list[RankedHit]:
    """Score each chunk by the sum of ``weight / (rrf_k + rank)`` over the lists it appears in.

    Lists with weight 0 are ignored entirely, so their chunks are not
    carried into the output with a zero score.
    """
    if len(lists) != len(config.weights):
        raise ConfigError(f"got {len(lists)} ranked lists for {len(config.weights)} weights")
    fused: dict[str, float] = {}
    for weight, hits in zip(config.weights, lists):
        if weight == 0.0:
            continue
        for hit in hits:
            fused[hit.chunk_id] = fused.get(hit.chunk_id, 0.0) + weight / (config.rrf_k + hit.rank)
    return rank_scores(fused, config.top_n)
