"""Word-concurrence graphs.

A corpus is summarized as a weighted directed graph: nodes are vocabulary
words, an edge (i -> j) carries the number of times the 2-gram (w_i, w_j)
occurs inside a sentence. Row-normalizing the count matrix with a small
smoothing constant yields a strictly substochastic adjacency whose spectral
radius stays below 1, which is what the solver's regularizer needs.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import backend

GRAPH_MAGIC = "GTVGRAPH"
GRAPH_VERSION = "v1"

TokenizeMode = str  # "whitespace_lower" | "pretokenized_ids"


class GraphFormatError(ValueError):
    """Raised when a graph file does not follow the GTVGRAPH v1 layout."""


@dataclass(frozen=True)
class Vocabulary:
    """Bidirectional word <-> index map; index order is the matrix order."""

    words: Tuple[str, ...]
    index: Dict[str, int] = field(repr=False)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        words = tuple(words)
        index = {w: i for i, w in enumerate(words)}
        if len(index) != len(words):
            raise ValueError("duplicate vocabulary entry")
        return cls(words=words, index=index)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return token in self.index


@dataclass(frozen=True, eq=False)
class ConcurrenceGraph:
    """Sparse directed 2-gram counts over a vocabulary.

    ``counts`` maps source id -> {destination id -> count}; only strictly
    positive counts are stored. Instances are treated as immutable:
    ingestion returns new graphs instead of mutating.
    """

    vocab: Vocabulary
    counts: Dict[int, Dict[int, int]]

    @property
    def n(self) -> int:
        return len(self.vocab)

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.counts.values())

    def total_count(self) -> int:
        return sum(c for row in self.counts.values() for c in row.values())

    def edges(self) -> List[Tuple[int, int, int]]:
        """All (src, dst, count) triples, src ascending then dst ascending."""
        out = []
        for src in sorted(self.counts):
            row = self.counts[src]
            for dst in sorted(row):
                out.append((src, dst, row[dst]))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcurrenceGraph):
            return NotImplemented
        return self.vocab.words == other.vocab.words and self.counts == other.counts


@dataclass(frozen=True, eq=False)
class NormalizedAdjacency:
    """Row-normalized adjacency D^-1 A with smoothing epsilon.

    Row i sums to deg(i) / (deg(i) + epsilon) < 1, so the spectral radius is
    strictly below 1 and (I - A~) is nonsingular. ``matrix`` is CSR with
    int32 indices and float64 data; treat it as read-only.
    """

    matrix: sp.csr_matrix
    epsilon: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str, mode: TokenizeMode = "whitespace_lower") -> List[str]:
    """Split ``text`` into tokens.

    whitespace_lower: split on Unicode whitespace, lowercase, strip leading
    and trailing punctuation from each token; tokens that strip to nothing
    are dropped. pretokenized_ids: whitespace-separated integer ids kept
    verbatim as strings, so an external tokenizer's output can be reused.
    """
    if mode == "whitespace_lower":
        out = []
        for raw in text.split():
            tok = _strip_punct(raw.lower())
            if tok:
                out.append(tok)
        return out
    if mode == "pretokenized_ids":
        out = []
        for raw in text.split():
            try:
                int(raw)
            except ValueError:
                raise ValueError(f"malformed token id: {raw!r}") from None
            out.append(raw)
        return out
    raise ValueError(f"unknown tokenize mode: {mode!r}")


def ingest_corpus(
    sentences: Sequence[Sequence[str]],
    existing: Optional[ConcurrenceGraph] = None,
) -> ConcurrenceGraph:
    """Count within-sentence 2-grams into a (new) concurrence graph.

    Every adjacent token pair inside a sentence increments one edge; pairs
    never span sentence boundaries. The vocabulary is every token seen,
    kept in sorted order so the result is independent of sentence order
    and of how the corpus was split across ingest calls.
    """
    sentences = [list(s) for s in sentences]
    if not sentences:
        raise ValueError("empty corpus")

    pair_counts: Dict[Tuple[str, str], int] = {}
    tokens = set()
    if existing is not None:
        tokens.update(existing.vocab.words)
        words = existing.vocab.words
        for src, row in existing.counts.items():
            for dst, c in row.items():
                pair_counts[(words[src], words[dst])] = c
    for sentence in sentences:
        if not sentence:
            continue  # empty sentences are skipped silently
        tokens.update(sentence)
        for a, b in zip(sentence, sentence[1:]):
            pair_counts[(a, b)] = pair_counts.get((a, b), 0) + 1
    if not tokens:
        raise ValueError("empty corpus")

    vocab = Vocabulary.from_words(sorted(tokens))
    counts: Dict[int, Dict[int, int]] = {}
    for (a, b), c in pair_counts.items():
        counts.setdefault(vocab.index[a], {})[vocab.index[b]] = c
    return ConcurrenceGraph(vocab=vocab, counts=counts)


def normalize(graph: ConcurrenceGraph, epsilon: float = 1e-6) -> NormalizedAdjacency:
    """Row-normalize counts: entry (i, j) = counts[i][j] / (outdeg(i) + epsilon).

    The sparsity pattern is preserved; rows without outgoing edges stay
    all-zero. epsilon must be positive so isolated rows never divide by zero.
    """
    if not (epsilon > 0):
        raise ValueError("epsilon must be > 0")
    n = graph.n
    rows, cols, vals = [], [], []
    for src, dst, count in graph.edges():
        rows.append(src)
        cols.append(dst)
        vals.append(count)
    data = np.asarray(vals, dtype=np.float64)
    if data.size:
        degrees = np.zeros(n, dtype=np.float64)
        np.add.at(degrees, rows, data)
        data = data / (degrees[rows] + epsilon)
    matrix = sp.csr_matrix(
        (data, (np.asarray(rows, dtype=np.int32), np.asarray(cols, dtype=np.int32))),
        shape=(n, n),
    )
    matrix.indptr = matrix.indptr.astype(np.int32, copy=False)
    matrix.indices = matrix.indices.astype(np.int32, copy=False)
    return NormalizedAdjacency(matrix=matrix, epsilon=float(epsilon))


def estimate_spectral_radius(adj: NormalizedAdjacency, iters: int = 100) -> float:
    """Power-iteration estimate of the spectral radius of the adjacency.

    Runs max-norm power iteration from the all-ones vector and returns the
    geometric mean of the per-step growth ratios, which converges to the
    spectral radius and never exceeds the maximum row sum (entries are
    nonnegative, so |A~| = A~).
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    n = adj.n
    if n == 0:
        return 0.0
    v = np.ones(n, dtype=np.float64)
    log_sum = 0.0
    for _ in range(iters):
        w = backend.matvec(adj.matrix, v)
        m = float(np.max(w)) if n else 0.0
        if m <= 0.0:
            return 0.0
        log_sum += math.log(m)
        v = w / m
    return math.exp(log_sum / iters)


def save_graph(graph: ConcurrenceGraph, path) -> None:
    """Write the GTVGRAPH v1 text format (see load_graph for the layout)."""
    edges = graph.edges()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{GRAPH_MAGIC} {GRAPH_VERSION} {graph.n} {len(edges)}\n")
        for word in graph.vocab.words:
            if not word or any(ch in word for ch in ("\n", "\r")):
                raise ValueError(f"token not representable in graph file: {word!r}")
            fh.write(word + "\n")
        for src, dst, count in edges:
            fh.write(f"{src} {dst} {count}\n")


def load_graph(path) -> ConcurrenceGraph:
    """Read a GTVGRAPH v1 file.

    Layout: header ``GTVGRAPH v1 <N> <nnz>``, then N vocabulary tokens one
    per line in index order, then nnz ``<src> <dst> <count>`` lines with
    src ascending and dst ascending within a row. UTF-8 throughout.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphFormatError("empty graph file")
    header = lines[0].split(" ")
    if len(header) != 4 or header[0] != GRAPH_MAGIC:
        raise GraphFormatError(f"bad graph header: {lines[0]!r}")
    if header[1] != GRAPH_VERSION:
        raise GraphFormatError(f"unsupported graph version: {header[1]!r}")
    try:
        n, nnz = int(header[2]), int(header[3])
    except ValueError:
        raise GraphFormatError(f"bad graph header: {lines[0]!r}") from None
    if n < 0 or nnz < 0:
        raise GraphFormatError(f"bad graph header: {lines[0]!r}")
    if len(lines) != 1 + n + nnz:
        raise GraphFormatError(
            f"truncated graph file: expected {1 + n + nnz} lines, found {len(lines)}"
        )
    words = lines[1 : 1 + n]
    if len(set(words)) != len(words):
        raise GraphFormatError("duplicate vocabulary entry")
    vocab = Vocabulary.from_words(words)
    counts: Dict[int, Dict[int, int]] = {}
    for lineno, line in enumerate(lines[1 + n :], start=2 + n):
        parts = line.split(" ")
        if len(parts) != 3:
            raise GraphFormatError(f"bad edge line {lineno}: {line!r}")
        try:
            src, dst, count = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise GraphFormatError(f"bad edge line {lineno}: {line!r}") from None
        if not (0 <= src < n and 0 <= dst < n):
            raise GraphFormatError(f"edge id out of range on line {lineno}: {line!r}")
        if count <= 0:
            raise GraphFormatError(f"non-positive count on line {lineno}: {line!r}")
        row = counts.setdefault(src, {})
        if dst in row:
            raise GraphFormatError(f"duplicate edge on line {lineno}: {line!r}")
        row[dst] = count
    return ConcurrenceGraph(vocab=vocab, counts=counts)
