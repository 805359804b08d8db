"""Exception types shared across the package.

Each class carries a ``category`` used by the CLI for its one-line
``error: <category>: ...`` messages.
"""

from __future__ import annotations


class RepoCtxError(Exception):
    category = "runtime"


class ConfigError(RepoCtxError, ValueError):
    category = "config"


class IntegrityError(RepoCtxError):
    category = "integrity"


class ChunkLookupError(RepoCtxError, KeyError):
    category = "lookup"

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class StoreParseError(RepoCtxError, ValueError):
    category = "parse"

    def __init__(self, message: str, record_index: int) -> None:
        super().__init__(f"record {record_index}: {message}")
        self.record_index = record_index


class RemoteEmbedderError(RepoCtxError):
    category = "remote"

    def __init__(self, message: str, batch_index: int) -> None:
        super().__init__(f"batch {batch_index}: {message}")
        self.batch_index = batch_index
