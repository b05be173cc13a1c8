import numpy as np
import pytest
import scipy.sparse as sp

from gtvsoftmax import NormalizedAdjacency, ingest_corpus, normalize

SAMPLE_SENTENCES = [
    "I try to apply the method suggested in his paper.",
    "I try to learn the method suggested by him.",
    "I will use the method suggested in this book.",
]

SAMPLE_TOKENS = [
    ["i", "try", "to", "apply", "the", "method", "suggested", "in", "his", "paper"],
    ["i", "try", "to", "learn", "the", "method", "suggested", "by", "him"],
    ["i", "will", "use", "the", "method", "suggested", "in", "this", "book"],
]


@pytest.fixture
def sample_graph():
    return ingest_corpus(SAMPLE_TOKENS)


@pytest.fixture
def sample_adj(sample_graph):
    return normalize(sample_graph, 1e-6)


def random_adjacency(rng, n, per_row=4, epsilon=1e-6) -> NormalizedAdjacency:
    """Random epsilon-normalized substochastic CSR matrix for solver tests."""
    rows = np.repeat(np.arange(n), per_row)
    cols = rng.integers(0, n, size=n * per_row)
    counts = rng.integers(1, 10, size=n * per_row).astype(np.float64)
    m = sp.csr_matrix((counts, (rows, cols)), shape=(n, n))
    m.sum_duplicates()
    degrees = np.asarray(m.sum(axis=1)).ravel()
    row_of = np.repeat(np.arange(n), np.diff(m.indptr))
    data = m.data / (degrees[row_of] + epsilon)
    matrix = sp.csr_matrix(
        (data, m.indices.astype(np.int32), m.indptr.astype(np.int32)), shape=(n, n)
    )
    return NormalizedAdjacency(matrix=matrix, epsilon=epsilon)


def interior_point(rng, n) -> np.ndarray:
    """Random strictly interior simplex point, coordinates >= 1/(3n)."""
    u = rng.uniform(0.5, 1.5, size=n)
    return u / u.sum()
