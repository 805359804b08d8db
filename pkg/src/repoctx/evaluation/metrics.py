"""Completion-quality and context-quality metrics."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from ..lexical import tokenize


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf(reference: str, hypothesis: str, n_max: int = 6, beta: float = 2.0) -> float:
    """Character n-gram F-score with whitespace removed.

    Precision and recall are macro-averaged over the n-gram orders for which
    the reference has at least one n-gram. An order for which the hypothesis
    has no n-grams counts as precision 0. Arithmetic is exact until the
    final rounding, so rational scores come out as the nearest float.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    ref = "".join(reference.split())
    hyp = "".join(hypothesis.split())
    if not ref and not hyp:
        return 1.0
    if not ref or not hyp:
        return 0.0

    precisions, recalls = [], []
    for n in range(1, n_max + 1):
        ref_grams = _char_ngrams(ref, n)
        if not ref_grams:
            break
        hyp_grams = _char_ngrams(hyp, n)
        matches = sum((ref_grams & hyp_grams).values())
        hyp_total = sum(hyp_grams.values())
        precisions.append(Fraction(matches, hyp_total) if hyp_total else Fraction(0))
        recalls.append(Fraction(matches, sum(ref_grams.values())))

    precision = sum(precisions) / len(precisions)
    recall = sum(recalls) / len(recalls)
    if precision + recall == 0:
        return 0.0
    beta2 = Fraction(beta) ** 2
    return float((1 + beta2) * precision * recall / (beta2 * precision + recall))


def context_recall(context: str, middle: str) -> float:
    """Share of the middle's distinct tokens that also occur in the context."""
    wanted = set(tokenize(middle))
    if not wanted:
        return 1.0
    return len(wanted & set(tokenize(context))) / len(wanted)
