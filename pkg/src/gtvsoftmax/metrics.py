"""Corpus-level BLEU.

Every candidate is scored against the whole reference list (clip counts by
the per-n-gram maximum over references; brevity length is the closest
reference length, ties to the shorter). BLEU-n is the geometric mean of the
clipped modified k-gram precisions for k = 1..n times the brevity penalty
min(1, exp(1 - r/c)).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple


@dataclass(frozen=True)
class BleuReport:
    bleu_n: Dict[int, float]


def _ngram_counts(seq: Sequence[str], n: int) -> Counter:
    return Counter(tuple(seq[i : i + n]) for i in range(len(seq) - n + 1))


def modified_precision(
    candidates: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    n: int,
) -> Tuple[int, int]:
    """Corpus totals (clipped matches, candidate n-grams) for one order n."""
    ref_max: Counter = Counter()
    for ref in references:
        for gram, c in _ngram_counts(ref, n).items():
            if c > ref_max[gram]:
                ref_max[gram] = c
    hits = 0
    total = 0
    for cand in candidates:
        counts = _ngram_counts(cand, n)
        total += sum(counts.values())
        hits += sum(min(c, ref_max[g]) for g, c in counts.items())
    return hits, total


def _closest_ref_length(ref_lengths: List[int], cand_len: int) -> int:
    return min(ref_lengths, key=lambda r: (abs(r - cand_len), r))


def bleu(
    candidates: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    max_n: int = 5,
) -> BleuReport:
    """Corpus-level BLEU-n for n = 2..max_n against a shared reference pool."""
    candidates = [list(c) for c in candidates]
    references = [list(r) for r in references]
    if not candidates:
        raise ValueError("empty candidates")
    if not references:
        raise ValueError("empty references")
    if not (2 <= max_n <= 5):
        raise ValueError("max_n must be in [2, 5]")

    precisions = {}
    for n in range(1, max_n + 1):
        hits, total = modified_precision(candidates, references, n)
        precisions[n] = (hits, total)

    cand_len = sum(len(c) for c in candidates)
    ref_lengths = [len(r) for r in references]
    eff_ref_len = sum(_closest_ref_length(ref_lengths, len(c)) for c in candidates)
    if cand_len == 0:
        bp = 0.0
    else:
        bp = min(1.0, math.exp(1.0 - eff_ref_len / cand_len))

    scores: Dict[int, float] = {}
    for n in range(2, max_n + 1):
        log_sum = 0.0
        degenerate = False
        for k in range(1, n + 1):
            hits, total = precisions[k]
            if hits == 0 or total == 0:
                degenerate = True
                break
            log_sum += math.log(hits / total)
        scores[n] = 0.0 if degenerate else bp * math.exp(log_sum / n)
    return BleuReport(bleu_n=scores)
