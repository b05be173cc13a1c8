"""Graph total-variation regularized softmax.

Builds weighted directed word-concurrence graphs from a corpus, solves the
entropy + graph-TV objective on the probability simplex by projected
gradient descent, and ships a desk-scale decode/eval harness around it.
"""

from .backend import ACTIVE as backend_name
from .graph import (
    ConcurrenceGraph,
    NormalizedAdjacency,
    Vocabulary,
    estimate_spectral_radius,
    ingest_corpus,
    load_graph,
    normalize,
    save_graph,
    tokenize,
)
from .metrics import BleuReport, bleu, modified_precision
from .ngram import NGramLM, logits_for, perplexity, train_ngram
from .decode import DecodeConfig, decode
from .simplex import project_simplex, project_simplex_oracle
from .solver import (
    SolverConfig,
    SolveResult,
    gradient,
    graph_softmax,
    graph_tv,
    logsumexp,
    objective,
    objective_hessian,
    softmax,
    top_k,
)

__version__ = "0.1.0"

__all__ = [
    "BleuReport",
    "ConcurrenceGraph",
    "DecodeConfig",
    "NGramLM",
    "NormalizedAdjacency",
    "SolveResult",
    "SolverConfig",
    "Vocabulary",
    "backend_name",
    "bleu",
    "decode",
    "estimate_spectral_radius",
    "gradient",
    "graph_softmax",
    "graph_tv",
    "ingest_corpus",
    "load_graph",
    "logits_for",
    "logsumexp",
    "modified_precision",
    "normalize",
    "objective",
    "objective_hessian",
    "perplexity",
    "project_simplex",
    "project_simplex_oracle",
    "save_graph",
    "softmax",
    "tokenize",
    "top_k",
    "train_ngram",
]
