"""Evaluation records and the JSON-lines dataset format."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Optional

from ..context import DEFAULT_REPO_ID, CompletionQuery
from ..errors import StoreParseError


@dataclass(frozen=True)
class EvalRecord:
    prefix: str
    suffix: str
    completion_file_path: str
    completion_file_content: str
    recent_files: tuple[tuple[str, str], ...]
    middle: str
    model_output: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.middle:
            raise ValueError("ground-truth middle must be non-empty")
        object.__setattr__(self, "recent_files", tuple((p, c) for p, c in self.recent_files))

    def query(self, repo_id: str = DEFAULT_REPO_ID) -> CompletionQuery:
        return CompletionQuery(
            prefix=self.prefix,
            suffix=self.suffix,
            completion_file_path=self.completion_file_path,
            completion_file_content=self.completion_file_content,
            recent_files=self.recent_files,
            repo_id=repo_id,
        )

    def to_json(self) -> dict:
        row = {
            "prefix": self.prefix,
            "suffix": self.suffix,
            "completion_file_path": self.completion_file_path,
            "completion_file_content": self.completion_file_content,
            "recent_files": [{"path": p, "content": c} for p, c in self.recent_files],
            "middle": self.middle,
        }
        if self.model_output is not None:
            row["model_output"] = self.model_output
        return row

    @classmethod
    def from_json(cls, row: dict) -> "EvalRecord":
        return cls(
            prefix=row["prefix"],
            suffix=row["suffix"],
            completion_file_path=row["completion_file_path"],
            completion_file_content=row["completion_file_content"],
            recent_files=tuple((f["path"], f["content"]) for f in row.get("recent_files", [])),
            middle=row["middle"],
            model_output=row.get("model_output"),
        )


def save_dataset(records: Iterable[EvalRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def load_dataset(path: str | os.PathLike) -> list[EvalRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for index, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(EvalRecord.from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise StoreParseError(f"bad dataset record ({exc})", index) from None
    return records
