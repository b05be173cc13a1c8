"""Backoff n-gram language model used as the desk-scale logits source.

Stands in for a neural LM's last layer: it maps a context to a full
vocabulary-sized score vector. Scores are stupid backoff (raw MLE at the
longest context that saw the token, discounted 0.4 per backed-off level)
with an add-k floor at the unigram level so every logit is finite.
Sentences are padded with begin markers and terminated with an
end-of-sentence token; the end token occupies the last vocabulary slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .graph import Vocabulary

EOS_TOKEN = "</s>"  # cannot collide: whitespace_lower strips it to "s"
BOS_ID = -1  # context-only sentinel, never predicted
BACKOFF = 0.4
ADD_K = 0.01


@dataclass(frozen=True, eq=False)
class NGramLM:
    """Counts of all k-grams (k <= order) keyed by context id tuples."""

    order: int
    vocab: Vocabulary  # graph words + EOS_TOKEN last
    counts: Dict[Tuple[int, ...], Dict[int, int]]
    totals: Dict[Tuple[int, ...], int]

    @property
    def eos_id(self) -> int:
        return len(self.vocab) - 1


def train_ngram(
    sentences: Sequence[Sequence[str]],
    order: int = 3,
    vocab: Optional[Vocabulary] = None,
) -> NGramLM:
    """Count every k-gram (k <= order) with sentence-boundary markers.

    When ``vocab`` is given (typically the concurrence graph's), sentences
    must stay inside it and the LM vocabulary is vocab + the end marker;
    otherwise the vocabulary is built from the corpus in sorted order, which
    matches what graph ingestion produces for the same corpus.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    sentences = [list(s) for s in sentences if len(s)]
    if not sentences:
        raise ValueError("empty corpus")
    if vocab is None:
        words = sorted({tok for sent in sentences for tok in sent})
    else:
        words = list(vocab.words)
        known = set(words)
        for sent in sentences:
            for tok in sent:
                if tok not in known:
                    raise ValueError(f"out-of-vocabulary token: {tok!r}")
    if EOS_TOKEN in words:
        raise ValueError(f"corpus contains the reserved end marker {EOS_TOKEN!r}")
    lm_vocab = Vocabulary.from_words(words + [EOS_TOKEN])
    eos_id = len(lm_vocab) - 1

    counts: Dict[Tuple[int, ...], Dict[int, int]] = {}
    totals: Dict[Tuple[int, ...], int] = {}
    for sent in sentences:
        ids = [lm_vocab.index[tok] for tok in sent] + [eos_id]
        padded = [BOS_ID] * (order - 1) + ids
        for pos in range(order - 1, len(padded)):
            nxt = padded[pos]
            for k in range(order):
                ctx = tuple(padded[pos - k : pos])
                table = counts.setdefault(ctx, {})
                table[nxt] = table.get(nxt, 0) + 1
                totals[ctx] = totals.get(ctx, 0) + 1
    return NGramLM(order=order, vocab=lm_vocab, counts=counts, totals=totals)


def _scores(lm: NGramLM, context: Sequence[int]) -> np.ndarray:
    """Stupid-backoff score for every next token given a context suffix."""
    v = len(lm.vocab)
    for cid in context:
        if not (0 <= cid < v):
            raise ValueError(f"out-of-vocabulary context id: {cid}")
    uni = lm.counts.get((), {})
    total = lm.totals.get((), 0)
    scores = np.full(v, ADD_K, dtype=np.float64)
    for tok, c in uni.items():
        scores[tok] += c
    scores /= total + ADD_K * v

    padded = [BOS_ID] * (lm.order - 1) + list(context)
    for k in range(1, lm.order):
        ctx = tuple(padded[len(padded) - k :])
        if ctx not in lm.counts:
            break  # longer suffixes cannot be seen either
        scores *= BACKOFF
        table = lm.counts[ctx]
        ctx_total = lm.totals[ctx]
        for tok, c in table.items():
            scores[tok] = c / ctx_total
    return scores


def logits_for(lm: NGramLM, context: Sequence[int]) -> np.ndarray:
    """Log backoff scores for every token given the sentence prefix so far."""
    return np.log(_scores(lm, context))


def perplexity(lm: NGramLM, sentences: Sequence[Sequence[str]]) -> float:
    """exp of the negative mean log-probability per token (end marker included).

    Backoff scores are normalized per context so this is a proper
    probability; the add-k floor keeps unseen tokens finite.
    """
    sentences = [list(s) for s in sentences if len(s)]
    if not sentences:
        raise ValueError("empty input")
    log_prob = 0.0
    n_tokens = 0
    for sent in sentences:
        for tok in sent:
            if tok not in lm.vocab.index:
                raise ValueError(f"out-of-vocabulary token: {tok!r}")
        ids = [lm.vocab.index[tok] for tok in sent] + [lm.eos_id]
        for pos in range(len(ids)):
            scores = _scores(lm, ids[:pos])
            log_prob += math.log(scores[ids[pos]] / float(np.sum(scores)))
            n_tokens += 1
    return math.exp(-log_prob / n_tokens)
