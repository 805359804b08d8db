"""Run a dataset of completion points through a context strategy and aggregate metrics."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..chunker import DEFAULT_EXTENSIONS, ChunkConfig, chunk_repository
from ..context import ContextConfig, ContextEngine, NeighborOrder, RepoIndex
from ..fusion import FusionConfig
from ..semantic import Embedder, HashingEmbedder
from .metrics import chrf, context_recall
from .records import EvalRecord

logger = logging.getLogger(__name__)

METRICS = ("chrf", "context_recall", "context_size_chars", "wall_time_ms")


@dataclass(frozen=True)
class Strategy:
    """Every knob of the context pipeline that an ablation may flip."""

    name: str = "full"
    completion_file: bool = True
    recent_files: bool = True
    prefix_hits: bool = True
    suffix_hits: bool = True
    neighbors: bool = True
    neighbor_order: str = NeighborOrder.SIMILAR_FIRST.value
    w_lexical: float = 0.2
    w_semantic: float = 0.8
    rrf_k: float = 60.0
    fusion_top_n: int = 30
    k: int = 10
    chunk_lines: int = 20
    overlap_lines: int = 5
    budget_chars: int = 32_000

    def chunk_config(self) -> ChunkConfig:
        return ChunkConfig(self.chunk_lines, self.overlap_lines)

    def context_config(self) -> ContextConfig:
        return ContextConfig(
            k=self.k,
            budget_chars=self.budget_chars,
            fusion=FusionConfig((self.w_lexical, self.w_semantic), self.rrf_k, self.fusion_top_n),
            attach_neighbors=self.neighbors,
            include_completion_file=self.completion_file,
            include_recent_files=self.recent_files,
            include_prefix_hits=self.prefix_hits,
            include_suffix_hits=self.suffix_hits,
            neighbor_order=NeighborOrder(self.neighbor_order),
        )

    def validate(self) -> "Strategy":
        self.chunk_config()
        self.context_config()
        return self


@dataclass
class RecordResult:
    index: int
    context_recall: Optional[float] = None
    context_size_chars: Optional[int] = None
    wall_time_ms: Optional[float] = None
    chrf: Optional[float] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class EvalReport:
    strategy: Strategy
    records: list[RecordResult] = field(default_factory=list)

    def mean(self, metric: str) -> Optional[float]:
        values = [getattr(r, metric) for r in self.records if getattr(r, metric) is not None]
        return sum(values) / len(values) if values else None

    @property
    def means(self) -> dict[str, Optional[float]]:
        return {m: self.mean(m) for m in METRICS}

    @property
    def failed_count(self) -> int:
        return sum(r.failed for r in self.records)

    def summary(self, include_timing: bool = False) -> dict:
        means = self.means
        if not include_timing:
            means.pop("wall_time_ms")
        return {
            "strategy": asdict(self.strategy),
            "records": len(self.records),
            "failed": self.failed_count,
            "means": means,
        }

    def per_record(self, include_timing: bool = False) -> list[dict]:
        rows = []
        for r in self.records:
            row = asdict(r)
            if not include_timing:
                row.pop("wall_time_ms")
            rows.append(row)
        return rows


class IndexCache:
    """Builds one :class:`RepoIndex` per chunking configuration of a repository."""

    def __init__(
        self,
        repo_root: str | os.PathLike,
        embedder: Optional[Embedder] = None,
        extensions: Iterable[str] = DEFAULT_EXTENSIONS,
    ) -> None:
        self.repo_root = Path(repo_root)
        self.embedder = embedder or HashingEmbedder()
        self.extensions = frozenset(extensions)
        self._indexes: dict[ChunkConfig, RepoIndex] = {}

    def get(self, config: ChunkConfig) -> RepoIndex:
        if config not in self._indexes:
            chunks = chunk_repository(self.repo_root, self.extensions, config)
            self._indexes[config] = RepoIndex.from_chunks(chunks, self.embedder)
        return self._indexes[config]


def run_eval(
    dataset: Sequence[EvalRecord],
    strategy: Strategy,
    repo: IndexCache | str | os.PathLike,
) -> EvalReport:
    """Evaluate every record; a failing record is marked and the run continues."""
    cache = repo if isinstance(repo, IndexCache) else IndexCache(repo)
    strategy.validate()
    engine = ContextEngine(cache.get(strategy.chunk_config()), strategy.context_config())
    report = EvalReport(strategy)
    for i, record in enumerate(dataset):
        result = RecordResult(index=i)
        started = time.perf_counter()
        try:
            ctx = engine.build_context(record.query())
        except Exception as exc:  # noqa: BLE001 - any per-record failure is reported, not raised
            logger.warning("record %d failed: %s", i, exc)
            result.error = f"{type(exc).__name__}: {exc}"
            report.records.append(result)
            continue
        result.wall_time_ms = (time.perf_counter() - started) * 1000.0
        result.context_size_chars = ctx.size
        result.context_recall = context_recall(ctx.rendered, record.middle)
        if record.model_output is not None:
            result.chrf = chrf(record.middle, record.model_output)
        report.records.append(result)
    return report


def ablation_strategies(base: Strategy = Strategy()) -> list[Strategy]:
    """The default sweep: the full pipeline, one component removed at a time, and baselines."""
    return [
        replace(base, name="full"),
        replace(base, name="no_neighbors", neighbors=False),
        replace(base, name="no_completion_file", completion_file=False),
        replace(base, name="no_recent_files", recent_files=False),
        replace(base, name="no_prefix_hits", prefix_hits=False),
        replace(base, name="no_suffix_hits", suffix_hits=False),
        replace(base, name="neighbor_file_order", neighbor_order=NeighborOrder.FILE_ORDER.value),
        replace(base, name="lexical_only", w_lexical=1.0, w_semantic=0.0),
        replace(base, name="semantic_only", w_lexical=0.0, w_semantic=1.0),
        replace(base, name="completion_file_only", recent_files=False, prefix_hits=False,
                suffix_hits=False, k=0),
    ]


def run_ablation(
    dataset: Sequence[EvalRecord],
    repo: IndexCache | str | os.PathLike,
    strategies: Optional[Sequence[Strategy]] = None,
) -> list[EvalReport]:
    cache = repo if isinstance(repo, IndexCache) else IndexCache(repo)
    return [run_eval(dataset, s, cache) for s in (strategies or ablation_strategies())]


def write_report(report: EvalReport, path: str | os.PathLike, include_timing: bool = False) -> None:
    """Line-delimited metrics: one summary line, then one line per record."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps({"summary": report.summary(include_timing)}, sort_keys=True) + "\n")
        for row in report.per_record(include_timing):
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def write_ablation(reports: Sequence[EvalReport], path: str | os.PathLike,
                   include_timing: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for report in reports:
            fh.write(json.dumps(report.summary(include_timing), sort_keys=True) + "\n")


def format_table(reports: Sequence[EvalReport]) -> str:
    header = f"{'strategy':<22} {'n':>5} {'fail':>5} {'recall':>8} {'chrF':>7} {'size':>9} {'ms':>8}"
    lines = [header, "-" * len(header)]

    def fmt(value: Optional[float], spec: str) -> str:
        return "-" if value is None else format(value, spec)

    for r in reports:
        m = r.means
        lines.append(
            f"{r.strategy.name:<22} {len(r.records):>5} {r.failed_count:>5} "
            f"{fmt(m['context_recall'], '.4f'):>8} {fmt(m['chrf'], '.4f'):>7} "
            f"{fmt(m['context_size_chars'], '.0f'):>9} {fmt(m['wall_time_ms'], '.1f'):>8}"
        )
    return "\n".join(lines)
