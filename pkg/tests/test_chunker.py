from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from conftest import numbered_lines
from repoctx.chunker import ChunkConfig, chunk_file, chunk_repository, scan_repository, split_lines
from repoctx.errors import ConfigError


def spans(chunks):
    return [(c.start_line, c.end_line) for c in chunks]


def test_25_lines_n10_m2(file25):
    chunks = chunk_file("f.kt", file25, ChunkConfig(10, 2))
    assert spans(chunks) == [(1, 10), (9, 18), (17, 25)]
    first, mid, last = chunks
    assert first.prev_id is None and first.next_id == mid.id
    assert mid.prev_id == first.id and mid.next_id == last.id
    assert last.prev_id == mid.id and last.next_id is None
    assert mid.text == "\n".join(f"line {i}" for i in range(9, 19))


def test_file_of_exactly_n_lines_is_one_chunk():
    (chunk,) = chunk_file("f.kt", numbered_lines(10), ChunkConfig(10, 2))
    assert (chunk.start_line, chunk.end_line) == (1, 10)
    assert chunk.prev_id is None and chunk.next_id is None


def test_one_line_past_n_admits_second_chunk():
    chunks = chunk_file("f.kt", numbered_lines(11), ChunkConfig(10, 2))
    assert spans(chunks) == [(1, 10), (9, 11)]


def test_empty_content_has_no_chunks():
    assert chunk_file("f.kt", "", ChunkConfig()) == []


@pytest.mark.parametrize("n,m", [(5, 5), (5, 6), (0, 0), (3, -1)])
def test_invalid_config(n, m):
    with pytest.raises(ConfigError):
        ChunkConfig(n, m)


def test_chunk_id_format(file25):
    ids = [c.id for c in chunk_file("src/f.kt", file25, ChunkConfig(10, 2))]
    assert ids == ["src/f.kt:1-10", "src/f.kt:9-18", "src/f.kt:17-25"]


def test_line_splitting_rules():
    assert split_lines("a\nb\n") == ["a", "b"]
    assert split_lines("a\nb") == ["a", "b"]
    assert split_lines("a\r\nb\r\n") == ["a", "b"]
    assert split_lines("a\n\n") == ["a", ""]
    assert split_lines("\n") == [""]


def test_crlf_text_is_normalized():
    (chunk,) = chunk_file("f.kt", "x\r\ny\r\n", ChunkConfig())
    assert chunk.text == "x\ny"


def test_repository_order_and_filter(small_repo):
    chunks = chunk_repository(small_repo, config=ChunkConfig(10, 2))
    assert [c.id for c in chunks] == ["a.kt:1-10", "b.kt:1-10", "b.kt:9-18", "b.kt:17-25"]


def test_repository_without_matches(tmp_path):
    (tmp_path / "readme.md").write_text("hi\n")
    assert chunk_repository(tmp_path) == []


def test_repository_is_deterministic(small_repo):
    assert chunk_repository(small_repo) == chunk_repository(small_repo)


def test_binary_and_undecodable_files_skipped(tmp_path):
    (tmp_path / "ok.py").write_text("x = 1\n")
    (tmp_path / "bin.py").write_bytes(b"abc\x00def")
    (tmp_path / "latin.py").write_bytes(b"caf\xe9\n")
    files, skipped = scan_repository(tmp_path)
    assert [p for p, _ in files] == ["ok.py"]
    assert sorted(skipped) == ["bin.py", "latin.py"]


def test_hidden_directories_not_scanned(tmp_path):
    (tmp_path / ".git").mkdir()
    (tmp_path / ".git" / "hook.py").write_text("x\n")
    (tmp_path / "pkg").mkdir()
    (tmp_path / "pkg" / "mod.py").write_text("y\n")
    assert [c.file_path for c in chunk_repository(tmp_path)] == ["pkg/mod.py"]


def test_missing_root_raises(tmp_path):
    with pytest.raises(OSError):
        chunk_repository(tmp_path / "nope")


def check_invariants(content: str, config: ChunkConfig) -> None:
    """Coverage, exact overlap, link integrity, reconstruction."""
    lines = split_lines(content)
    chunks = chunk_file("f.py", content, config)
    total = len(lines)
    if total == 0:
        assert chunks == []
        return
    covered = set()
    for c in chunks:
        assert 1 <= c.start_line <= c.end_line <= total
        assert c.text == "\n".join(lines[c.start_line - 1 : c.end_line])
        covered.update(range(c.start_line, c.end_line + 1))
    assert covered == set(range(1, total + 1))
    if total <= config.chunk_lines:
        assert len(chunks) == 1
    by_id = {c.id: c for c in chunks}
    assert chunks[0].prev_id is None and chunks[-1].next_id is None
    for a, b in zip(chunks, chunks[1:]):
        assert a.end_line - b.start_line + 1 == config.overlap_lines
        assert a.next_id == b.id and b.prev_id == a.id
        assert by_id[a.next_id].prev_id == a.id
    rebuilt = list(chunks[0].text.split("\n"))
    for c in chunks[1:]:
        rebuilt.extend(c.text.split("\n")[config.overlap_lines :])
    assert rebuilt == lines


@settings(max_examples=200, deadline=None)
@given(
    total=st.integers(min_value=0, max_value=120),
    n=st.integers(min_value=1, max_value=30),
    data=st.data(),
)
def test_chunk_invariants_property(total, n, data):
    m = data.draw(st.integers(min_value=0, max_value=n - 1))
    check_invariants(numbered_lines(total), ChunkConfig(n, m))


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet="ab \n\r", max_size=200))
def test_invariants_on_arbitrary_text(content):
    check_invariants(content, ChunkConfig(4, 1))
