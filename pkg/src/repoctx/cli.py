"""Command-line entry point.

Exit codes: 0 success, 1 usage or flag-validation error, 2 runtime error.
Every error is reported on stderr as ``error: <category>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import store as chunk_store
from .chunker import DEFAULT_EXTENSIONS, chunk_file, scan_repository
from .context import CompletionQuery, ContextEngine, NeighborOrder, PositionedHit, RepoIndex
from .errors import ConfigError, RepoCtxError
from .evaluation import (
    IndexCache,
    Strategy,
    ablation_strategies,
    format_table,
    generate_synthetic_repo,
    load_dataset,
    run_ablation,
    run_eval,
    save_dataset,
    write_ablation,
    write_report,
)
from .evaluation.records import EvalRecord
from .semantic import DEFAULT_DIMENSION, Embedder, HashingEmbedder, RemoteEmbedder

logger = logging.getLogger("repoctx")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message, self)


def _pipeline_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("pipeline")
    g.add_argument("--chunk-lines", type=int, default=20)
    g.add_argument("--overlap-lines", type=int, default=5)
    g.add_argument("--w-lexical", type=float, default=0.2)
    g.add_argument("--w-semantic", type=float, default=0.8)
    g.add_argument("--rrf-k", type=float, default=60.0)
    g.add_argument("--fusion-top-n", type=int, default=30)
    g.add_argument("--k", type=int, default=10, help="hits kept per query side")
    g.add_argument("--budget-chars", type=int, default=32_000)
    g.add_argument("--embedder", default="hashing", help="'hashing' or the base URL of an embedding service")
    g.add_argument("--dim", type=int, default=DEFAULT_DIMENSION, help="embedding dimension")
    g.add_argument("--ext", action="append", help="file extension to index (repeatable)")
    a = p.add_argument_group("ablation")
    a.add_argument("--no-completion-file", action="store_true")
    a.add_argument("--no-recent-files", action="store_true")
    a.add_argument("--no-prefix-hits", action="store_true")
    a.add_argument("--no-suffix-hits", action="store_true")
    a.add_argument("--no-neighbors", action="store_true")
    a.add_argument("--neighbor-order", choices=[o.value for o in NeighborOrder],
                   default=NeighborOrder.SIMILAR_FIRST.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _query_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("query")
    g.add_argument("--record", type=Path, help="JSON file with one dataset-format record")
    g.add_argument("--prefix")
    g.add_argument("--prefix-file", type=Path)
    g.add_argument("--suffix")
    g.add_argument("--suffix-file", type=Path)
    g.add_argument("--completion-file", type=Path, help="file being edited (content source)")
    g.add_argument("--completion-path", help="repository-relative path of the completion file")
    g.add_argument("--recent", type=Path, action="append", default=[], help="recently opened file (repeatable)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="repoctx", description="Repository context for fill-in-the-middle completion.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common, query = _pipeline_flags(), _query_flags()

    p = sub.add_parser("index", parents=[common], help="chunk a repository and write a chunk-store file")
    p.add_argument("repo", type=Path)
    p.add_argument("--store", type=Path, required=True)

    p = sub.add_parser("query", parents=[common, query], help="print fused hits for a prefix/suffix")
    p.add_argument("store", type=Path)

    p = sub.add_parser("assemble", parents=[common, query], help="print the rendered context")
    p.add_argument("store", type=Path)

    p = sub.add_parser("eval", parents=[common], help="evaluate a dataset against a repository")
    p.add_argument("repo", type=Path)
    p.add_argument("dataset", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--timings", action="store_true", help="include wall-clock times in the report file")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic repository and dataset")
    p.add_argument("out", type=Path)
    p.add_argument("--files", type=int, default=100)
    p.add_argument("--patterns", type=int, default=30)

    p = sub.add_parser("ablate", parents=[common], help="run the ablation sweep")
    p.add_argument("repo", type=Path)
    p.add_argument("dataset", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--timings", action="store_true")
    return parser


def strategy_from_args(args: argparse.Namespace) -> Strategy:
    return Strategy(
        completion_file=not args.no_completion_file,
        recent_files=not args.no_recent_files,
        prefix_hits=not args.no_prefix_hits,
        suffix_hits=not args.no_suffix_hits,
        neighbors=not args.no_neighbors,
        neighbor_order=args.neighbor_order,
        w_lexical=args.w_lexical,
        w_semantic=args.w_semantic,
        rrf_k=args.rrf_k,
        fusion_top_n=args.fusion_top_n,
        k=args.k,
        chunk_lines=args.chunk_lines,
        overlap_lines=args.overlap_lines,
        budget_chars=args.budget_chars,
    ).validate()


def make_embedder(args: argparse.Namespace) -> Embedder:
    if args.embedder == "hashing":
        return HashingEmbedder(args.dim)
    if args.embedder.startswith(("http://", "https://")):
        return RemoteEmbedder(args.embedder, dimension=args.dim)
    raise ConfigError(f"--embedder must be 'hashing' or an http(s) URL, got {args.embedder!r}")


def _extensions(args: argparse.Namespace) -> frozenset[str]:
    return frozenset(args.ext) if args.ext else DEFAULT_EXTENSIONS


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def query_from_args(args: argparse.Namespace) -> CompletionQuery:
    if args.record is not None:
        return EvalRecord.from_json(json.loads(_read(args.record))).query()
    prefix = _read(args.prefix_file) if args.prefix_file else (args.prefix or "")
    suffix = _read(args.suffix_file) if args.suffix_file else (args.suffix or "")
    content = _read(args.completion_file) if args.completion_file else prefix + suffix
    path = args.completion_path or (args.completion_file.as_posix() if args.completion_file else "")
    recent = tuple((p.as_posix(), _read(p)) for p in args.recent)
    return CompletionQuery(prefix, suffix, path, content, recent)


def _load_engine(args: argparse.Namespace, strategy: Strategy, embedder: Embedder) -> ContextEngine:
    store = chunk_store.load(args.store)
    return ContextEngine(RepoIndex(store, embedder), strategy.context_config())


def cmd_index(args: argparse.Namespace, strategy: Strategy, embedder: Embedder, out) -> None:
    files, skipped = scan_repository(args.repo, _extensions(args))
    chunks = []
    for rel, text in files:
        chunks.extend(chunk_file(rel, text, strategy.chunk_config()))
    store = chunk_store.put_all(chunks)
    args.store.parent.mkdir(parents=True, exist_ok=True)
    chunk_store.save(store, args.store)
    index = RepoIndex(store, embedder)
    out.write(
        f"files\t{len(files)}\nskipped\t{len(skipped)}\nchunks\t{len(store)}\n"
        f"terms\t{len(index.lexical.postings)}\navg_chunk_tokens\t{index.lexical.avg_doc_length:.2f}\n"
        f"dimension\t{index.vectors.dimension}\nstore\t{args.store}\n"
    )


def _hit_rows(hits: Sequence[PositionedHit]) -> list[str]:
    rows = []
    for h in hits:
        neighbor = h.neighbor.id if h.neighbor else "-"
        rows.append(f"{h.side.value}\t{h.rank}\t{h.fused_score:.6f}\t{h.similar.id}\t{neighbor}")
    return rows


def cmd_query(args: argparse.Namespace, strategy: Strategy, embedder: Embedder, out) -> None:
    engine = _load_engine(args, strategy, embedder)
    query = query_from_args(args)
    rows = ["side\trank\tscore\tchunk_id\tneighbor_id"]
    rows += _hit_rows(engine.collect_prefix_hits(query))
    rows += _hit_rows(engine.collect_suffix_hits(query))
    out.write("\n".join(rows) + "\n")


def cmd_assemble(args: argparse.Namespace, strategy: Strategy, embedder: Embedder, out) -> None:
    engine = _load_engine(args, strategy, embedder)
    out.write(engine.build_context(query_from_args(args)).rendered)


def cmd_eval(args: argparse.Namespace, strategy: Strategy, embedder: Embedder, out) -> None:
    dataset = load_dataset(args.dataset)
    cache = IndexCache(args.repo, embedder, _extensions(args))
    report = run_eval(dataset, strategy, cache)
    write_report(report, args.out, include_timing=args.timings)
    out.write(format_table([report]) + "\n")


def cmd_synth(args: argparse.Namespace, strategy: Strategy, embedder: Embedder, out) -> None:
    repo = args.out / "repo"
    records = generate_synthetic_repo(args.seed, args.files, args.patterns, repo)
    dataset = args.out / "dataset.jsonl"
    save_dataset(records, dataset)
    out.write(f"repo\t{repo}\ndataset\t{dataset}\nrecords\t{len(records)}\n")


def cmd_ablate(args: argparse.Namespace, strategy: Strategy, embedder: Embedder, out) -> None:
    dataset = load_dataset(args.dataset)
    cache = IndexCache(args.repo, embedder, _extensions(args))
    reports = run_ablation(dataset, cache, ablation_strategies(strategy))
    write_ablation(reports, args.out, include_timing=args.timings)
    out.write(format_table(reports) + "\n")


COMMANDS = {
    "index": cmd_index,
    "query": cmd_query,
    "assemble": cmd_assemble,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "ablate": cmd_ablate,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        message, sub = exc.args
        err.write(f"error: usage: {message}\n")
        err.write(sub.format_help())
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=err,
    )
    try:
        strategy = strategy_from_args(args)
        embedder = make_embedder(args)
        if args.command == "synth" and not 0 <= args.patterns < args.files:
            raise ConfigError("--patterns must be >= 0 and smaller than --files")
    except ConfigError as exc:
        err.write(f"error: config: {exc}\n")
        return 1

    try:
        COMMANDS[args.command](args, strategy, embedder, out)
    except RepoCtxError as exc:
        err.write(f"error: {exc.category}: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"error: io: {exc}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
