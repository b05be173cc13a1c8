"""Decoding loop: n-gram logits -> (plain | graph) softmax -> next token.

Exercises the same decode-time interface a neural LM would: per step, a
logits vector over the vocabulary is turned into a distribution, then the
next token is chosen greedily or by seeded sampling. In graph mode the
distribution comes from the projected-gradient solver; with lam = 0 it
reduces to plain softmax, so the two modes decode identically under greedy
selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import NormalizedAdjacency
from .ngram import NGramLM, logits_for
from .solver import SolverConfig, graph_softmax, softmax

MODES = ("greedy", "sample")
SOFTMAX_KINDS = ("plain", "graph")


@dataclass(frozen=True)
class DecodeConfig:
    max_len: int = 150  # cap on generated tokens per continuation
    mode: str = "greedy"
    seed: int = 0
    softmax_kind: str = "plain"
    solver_cfg: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.softmax_kind not in SOFTMAX_KINDS:
            raise ValueError(f"softmax_kind must be one of {SOFTMAX_KINDS}")


def _padded_adjacency(adj: NormalizedAdjacency, n_lm: int) -> NormalizedAdjacency:
    """Grow the adjacency with zero rows/cols for LM-only slots (the end marker)."""
    if adj.n == n_lm:
        return adj
    if adj.n > n_lm:
        raise ValueError(f"dimension mismatch: graph has {adj.n}, LM has {n_lm}")
    m = sp.csr_matrix(
        (adj.matrix.data, adj.matrix.indices, np.concatenate([
            adj.matrix.indptr,
            np.full(n_lm - adj.n, adj.matrix.indptr[-1], dtype=adj.matrix.indptr.dtype),
        ])),
        shape=(n_lm, n_lm),
    )
    return NormalizedAdjacency(matrix=m, epsilon=adj.epsilon)


def decode(
    lm: NGramLM,
    adj: Optional[NormalizedAdjacency],
    prompt: Sequence[int],
    cfg: DecodeConfig,
) -> List[int]:
    """Generate a continuation; returns prompt + generated ids (end marker cut).

    Stops after ``cfg.max_len`` generated tokens or at the end-of-sentence
    marker. Deterministic for a fixed seed: the sampler owns its own RNG.
    The adjacency may be one short of the LM vocabulary (the end-marker
    slot); it is zero-padded, which leaves the marker graph-isolated.
    """
    prompt = [int(t) for t in prompt]
    if not prompt:
        raise ValueError("empty prompt")
    v = len(lm.vocab)
    for tid in prompt:
        if not (0 <= tid < v):
            raise ValueError(f"invalid prompt token id: {tid}")
    use_graph = cfg.softmax_kind == "graph"
    if use_graph:
        if adj is None:
            raise ValueError("graph softmax requested but no adjacency given")
        adj = _padded_adjacency(adj, v)
    rng = np.random.default_rng(cfg.seed)
    seq = list(prompt)
    for _ in range(cfg.max_len):
        z = logits_for(lm, seq)
        if use_graph:
            x = graph_softmax(z, adj, cfg.solver_cfg).x
        else:
            x = softmax(z)
        if cfg.mode == "greedy":
            tok = int(np.argmax(x))
        else:
            p = x / np.sum(x)
            tok = int(rng.choice(v, p=p))
        if tok == lm.eos_id:
            break
        seq.append(tok)
    return seq
