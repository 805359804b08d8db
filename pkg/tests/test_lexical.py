from __future__ import annotations

import math
import random

import pytest

from oracles import brute_bm25
from repoctx.chunker import Chunk
from repoctx.lexical import build_lexical, query_lexical, tokenize


def doc(cid: str, text: str) -> Chunk:
    return Chunk(cid, cid, 1, 1, text)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("", []),
        ("getUserName(id)", ["get", "user", "name", "id"]),
        ("foo_bar foo_bar", ["foo", "bar", "foo", "bar"]),
        ("HTTPServer parseJSON2xml", ["http", "server", "parse", "json", "2", "xml"]),
        ("x = 42 + y1", ["x", "42", "y", "1"]),
        ("  ;;; ", []),
        ("fun `MyClass`.doIt()", ["fun", "my", "class", "do", "it"]),
    ],
)
def test_tokenize(text, expected):
    assert tokenize(text) == expected


def test_build_empty():
    index = build_lexical([])
    assert index.doc_count == 0 and index.avg_doc_length == 0.0
    assert query_lexical(index, "anything", 10) == []


def test_build_counts():
    index = build_lexical([doc("d1", "a b"), doc("d2", "a")])
    assert index.doc_lengths == {"d1": 2, "d2": 1}
    assert index.avg_doc_length == 1.5
    assert dict(index.postings["a"]) == {"d1": 1, "d2": 1}


def test_build_deterministic():
    chunks = [doc("d1", "alpha beta"), doc("d2", "beta gamma gamma")]
    assert build_lexical(chunks) == build_lexical(chunks)


def test_query_without_indexed_terms():
    index = build_lexical([doc("d1", "alpha")])
    assert query_lexical(index, "omega", 5) == []
    assert query_lexical(index, "", 5) == []


def test_add_query_hits_only_d1():
    index = build_lexical([doc("d1", "fn add a b"), doc("d2", "fn mul a b"), doc("d3", "import os")])
    hits = query_lexical(index, "add", 10)
    assert [(h.chunk_id, h.rank) for h in hits] == [("d1", 1)]
    # df=1, N=3, |d1|=4, avgdl=10/3
    idf = math.log(1 + (3 - 1 + 0.5) / (1 + 0.5))
    expected = idf * 2.2 / (1 + 1.2 * (0.25 + 0.75 * 4 / (10 / 3)))
    assert hits[0].score == pytest.approx(expected, abs=1e-12)


def test_ties_broken_by_id():
    index = build_lexical([doc("b", "same words"), doc("a", "same words"), doc("c", "other")])
    assert [h.chunk_id for h in query_lexical(index, "same", 10)] == ["a", "b"]


def test_top_n_truncates():
    index = build_lexical([doc(f"d{i}", "tok " * (i + 1)) for i in range(10)])
    hits = query_lexical(index, "tok", 3)
    assert [h.rank for h in hits] == [1, 2, 3]
    assert query_lexical(index, "tok", 0) == []


def random_corpus(rng: random.Random, max_docs: int = 200):
    vocab = [f"w{i}" for i in range(rng.randint(5, 60))]
    docs = {}
    for i in range(rng.randint(1, max_docs)):
        docs[f"c{i:03d}"] = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 40)))
    query = " ".join(rng.choice(vocab + ["zz"]) for _ in range(rng.randint(0, 30)))
    return docs, query


def assert_matches_oracle(docs: dict[str, str], query: str, top_n: int) -> None:
    index = build_lexical([doc(cid, text) for cid, text in docs.items()])
    got = query_lexical(index, query, top_n)
    want = brute_bm25({cid: tokenize(t) for cid, t in docs.items()}, tokenize(query))[:top_n]
    assert [h.chunk_id for h in got] == [cid for cid, _ in want]
    for hit, (_, score) in zip(got, want):
        assert abs(hit.score - score) <= 1e-9
    assert [h.rank for h in got] == list(range(1, len(got) + 1))


def test_oracle_equivalence_random():
    rng = random.Random(7)
    for _ in range(30):
        docs, query = random_corpus(rng)
        assert_matches_oracle(docs, query, rng.randint(1, 250))


def test_unrelated_document_preserves_single_term_order():
    rng = random.Random(11)
    for _ in range(30):
        vocab = ["t" + chr(97 + i) for i in range(12)]
        # equal lengths keep avgdl fixed when the unrelated document is added
        docs = [doc(f"d{i:02d}", " ".join(rng.choice(vocab) for _ in range(8))) for i in range(25)]
        term = rng.choice(vocab)
        before = query_lexical(build_lexical(docs), term, 100)
        extra = doc("zzz", " ".join(["unrelated"] * 8))
        after = query_lexical(build_lexical(docs + [extra]), term, 100)
        assert [h.chunk_id for h in before] == [h.chunk_id for h in after]
        if before:
            ratio = after[0].score / before[0].score
            assert all(math.isclose(a.score / b.score, ratio) for a, b in zip(after, before))


def test_self_hit_on_code_chunks(synthetic_index):
    index, chunks = synthetic_index
    for chunk in chunks[::7]:
        if tokenize(chunk.text):
            assert query_lexical(index.lexical, chunk.text, 1)[0].chunk_id == chunk.id
