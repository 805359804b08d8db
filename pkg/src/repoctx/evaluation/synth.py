"""Seeded synthetic repositories with planted fill-in-the-middle completion points.

Layout of a generated repository::

    lib/mod_XXX.py        host files: filler functions plus pattern instances
    app/complete_XXX.py   one completion file per pattern, middle removed

Every pattern is a family of near-duplicate functions. All members share a
head/tail vocabulary; each member has its own identifiers and its own body
("middle"). Member 0 of family ``i`` lives in some host file, and
``app/complete_i.py`` holds a near copy of it (different numeric literals)
with the middle cut out. The held-out middle therefore occurs verbatim only
in the host file, right after the head lines the prefix resembles and
right before the tail lines the suffix resembles.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, replace
from pathlib import Path

from ..errors import ConfigError
from .records import EvalRecord

HEAD_LINES = 24
TAIL_LINES = 24
MIDDLE_LINES = (14, 22)
FAMILY_SIZE = 6
FILLER_FUNCS = (2, 4)
FILLER_LINES = (4, 9)

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


class _Vocab:
    """Draws pronounceable lowercase words, never repeating one."""

    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.used: set[str] = set()

    def word(self) -> str:
        while True:
            syllables = self.rng.randint(2, 4)
            w = "".join(self.rng.choice(_CONSONANTS) + self.rng.choice(_VOWELS) for _ in range(syllables))
            if w not in self.used:
                self.used.add(w)
                return w

    def words(self, count: int) -> list[str]:
        return [self.word() for _ in range(count)]


@dataclass
class _Member:
    name: str
    head: list[str]
    middle: list[str]
    tail: list[str]

    def lines(self) -> list[str]:
        return [f"def {self.name}(ctx, opts):", *self.head, *self.middle, *self.tail, ""]


def _block(rng: random.Random, family: list[str], member: list[str], count: int) -> tuple[list[tuple], list[str]]:
    """Statement shapes for one block plus rendered lines (shapes allow re-rendering with new literals)."""
    shapes = []
    for _ in range(count):
        left = [rng.choice(member), rng.choice(family)]
        right = rng.sample(family, 2)
        shapes.append((left, right, rng.randrange(100)))
    return shapes, [_render(shape) for shape in shapes]


def _render(shape: tuple, literal: int | None = None) -> str:
    (a, b), (c, d), lit = shape
    return f"    {a}_{b} = {c}_{d}({a}, {lit if literal is None else literal})"


def _middle_lines(vocab: _Vocab, count: int) -> list[str]:
    # fresh words on every line, so each line adds its own tokens to the middle
    lines = []
    for _ in range(count):
        a, b, c, d, e, f = vocab.words(6)
        lines.append(f"    {a}_{b} = {c}_{d}({e}_{f})")
    return lines


def _filler(rng: random.Random, vocab: _Vocab) -> list[str]:
    words = vocab.words(6)
    lines = [f"def {words[0]}_{words[1]}({words[2]}):"]
    for _ in range(rng.randint(*FILLER_LINES)):
        a, b, c = rng.sample(words, 3)
        lines.append(f"    {a} = {b}({c}, {rng.randrange(100)})")
    lines.append(f"    return {words[0]}")
    lines.append("")
    return lines


def generate_synthetic_repo(
    seed: int,
    file_count: int,
    pattern_count: int,
    out_dir: str | os.PathLike,
) -> list[EvalRecord]:
    """Write a repository under ``out_dir`` and return one record per pattern.

    ``file_count`` counts every file written; ``pattern_count`` of them are
    completion files and the rest host the pattern families.
    """
    if file_count < 1 or pattern_count < 0:
        raise ConfigError("file_count must be >= 1 and pattern_count >= 0")
    if pattern_count >= file_count:
        raise ConfigError(
            f"pattern_count ({pattern_count}) must be smaller than file_count ({file_count})"
        )
    rng = random.Random(seed)
    vocab = _Vocab(rng)
    root = Path(out_dir)
    host_count = file_count - pattern_count
    hosts: list[list[list[str]]] = [[] for _ in range(host_count)]  # per host: list of blocks

    plans = []
    for fam in range(pattern_count):
        family_words = vocab.words(10)
        members = []
        for _ in range(FAMILY_SIZE):
            member_words = vocab.words(4)
            head_shapes, head = _block(rng, family_words[:5], member_words, HEAD_LINES)
            tail_shapes, tail = _block(rng, family_words[5:], member_words, TAIL_LINES)
            middle = _middle_lines(vocab, rng.randint(*MIDDLE_LINES))
            name = f"{family_words[0]}_{member_words[0]}"
            members.append((_Member(name, head, middle, tail), head_shapes, tail_shapes))
        # members of one family go to distinct hosts where possible
        slots = rng.sample(range(host_count), min(FAMILY_SIZE, host_count))
        for j, (member, _, _) in enumerate(members):
            host = slots[j % len(slots)]
            hosts[host].append(member.lines())
        plans.append((members[0], slots[0]))

    for host in range(host_count):
        blocks = hosts[host] + [_filler(rng, vocab) for _ in range(rng.randint(*FILLER_FUNCS))]
        rng.shuffle(blocks)
        header = [f"import {vocab.word()}", ""]
        hosts[host] = [header] + blocks

    host_paths = [f"lib/mod_{i:03d}.py" for i in range(host_count)]
    host_texts = ["\n".join(line for block in blocks for line in block) + "\n" for blocks in hosts]

    records = []
    completion_files = []
    for fam, ((source, head_shapes, tail_shapes), host) in enumerate(plans):
        near_head = [_render(s, (s[2] + 1 + rng.randrange(99)) % 100) for s in head_shapes]
        near_tail = [_render(s, (s[2] + 1 + rng.randrange(99)) % 100) for s in tail_shapes]
        preamble = [f"import {vocab.word()}", ""] + _filler(rng, vocab)
        before = preamble + [f"def {source.name}(ctx, opts):"] + near_head
        after = near_tail + [""]
        prefix = "\n".join(before) + "\n"
        middle = "\n".join(source.middle) + "\n"
        suffix = "\n".join(after) + "\n"
        path = f"app/complete_{fam:03d}.py"
        completion_files.append((path, prefix + suffix))

        records.append(
            EvalRecord(
                prefix=prefix,
                suffix=suffix,
                completion_file_path=path,
                completion_file_content=prefix + suffix,
                recent_files=(),
                middle=middle,
            )
        )

    # recently opened files: other completion files, which never contain this middle
    for fam, record in enumerate(records):
        others = [j for j in range(pattern_count) if j != fam]
        recent = rng.sample(others, min(len(others), rng.randint(1, 2)))
        records[fam] = replace(record, recent_files=tuple(completion_files[j] for j in recent))

    for rel, text in list(zip(host_paths, host_texts)) + completion_files:
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    return records
