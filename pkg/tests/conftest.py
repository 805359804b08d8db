from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def numbered_lines(count: int, tag: str = "line") -> str:
    return "".join(f"{tag} {i}\n" for i in range(1, count + 1))


@pytest.fixture
def file25() -> str:
    return numbered_lines(25)


@pytest.fixture
def small_repo(tmp_path: Path) -> Path:
    """b.kt has 25 lines and a.kt 10, plus files the default filter ignores."""
    (tmp_path / "b.kt").write_text(numbered_lines(25, "b"))
    (tmp_path / "a.kt").write_text(numbered_lines(10, "a"))
    (tmp_path / "notes.txt").write_text("ignored\n")
    return tmp_path


@pytest.fixture(scope="session")
def synthetic_repo(tmp_path_factory):
    from repoctx.evaluation.synth import generate_synthetic_repo

    root = tmp_path_factory.mktemp("synthetic") / "repo"
    records = generate_synthetic_repo(seed=5, file_count=40, pattern_count=12, out_dir=root)
    return root, records


@pytest.fixture(scope="session")
def synthetic_index(synthetic_repo):
    from repoctx.chunker import chunk_repository
    from repoctx.context import RepoIndex

    root, _ = synthetic_repo
    chunks = chunk_repository(root)
    return RepoIndex.from_chunks(chunks), chunks


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
