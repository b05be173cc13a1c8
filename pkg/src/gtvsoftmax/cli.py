"""Command-line front end.

Subcommands: build-graph (corpus -> GTVGRAPH file), graph-info (validate and
report), solve (logits file -> side-by-side plain/graph top-k + trace),
decode (prompted continuation), eval (BLEU and/or perplexity).

Exit codes: 0 success, 2 I/O or malformed file, 3 empty input,
4 dimension/flag mismatch, 5 degenerate prompt.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence

import numpy as np

from .decode import DecodeConfig, decode
from .graph import (
    GraphFormatError,
    Vocabulary,
    ingest_corpus,
    load_graph,
    normalize,
    save_graph,
    tokenize,
)
from .metrics import bleu
from .ngram import EOS_TOKEN, perplexity, train_ngram
from .solver import SolverConfig, graph_softmax, softmax, top_k

EXIT_OK = 0
EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_MISMATCH = 4
EXIT_PROMPT = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_lines(path) -> List[str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _read_corpus(path, mode: str) -> List[List[str]]:
    sentences = []
    for line in _read_lines(path):
        toks = tokenize(line, mode) if line.strip() else []
        if toks:
            sentences.append(toks)
    if not sentences:
        raise CliError(EXIT_EMPTY, f"empty corpus: {path}")
    return sentences


def _load_graph(path):
    try:
        return load_graph(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except GraphFormatError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc


def _read_logits(path, n: int) -> List[np.ndarray]:
    instances = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            vec = np.array([float(v) for v in line.split()], dtype=np.float64)
        except ValueError as exc:
            raise CliError(EXIT_IO, f"bad logits on line {lineno}: {exc}") from exc
        if not np.isfinite(vec).all():
            raise CliError(EXIT_IO, f"non-finite logits on line {lineno}")
        if vec.shape[0] != n:
            raise CliError(
                EXIT_MISMATCH,
                f"dimension mismatch: logits line {lineno} has {vec.shape[0]} values, graph has {n}",
            )
        instances.append(vec)
    if not instances:
        raise CliError(EXIT_EMPTY, f"empty logits file: {path}")
    return instances


def cmd_build_graph(args) -> int:
    if args.epsilon <= 0:
        raise CliError(EXIT_MISMATCH, "--epsilon must be > 0")
    sentences = _read_corpus(args.corpus, args.tokenizer)
    graph = ingest_corpus(sentences)
    try:
        save_graph(graph, args.out)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    if not args.quiet:
        print(f"N={graph.n} nnz={graph.nnz}")
    return EXIT_OK


def cmd_graph_info(args) -> int:
    if args.epsilon <= 0:
        raise CliError(EXIT_MISMATCH, "--epsilon must be > 0")
    graph = _load_graph(args.graph)
    adj = normalize(graph, args.epsilon)
    max_row = float(adj.matrix.sum(axis=1).max()) if graph.nnz else 0.0
    print(f"N={graph.n} nnz={graph.nnz} epsilon={args.epsilon!r} max_row_sum={max_row!r}")
    return EXIT_OK


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(
            lam=args.lam,
            alpha=args.alpha,
            max_iters=args.max_iters,
            tol=args.tol,
        )
    except ValueError as exc:
        raise CliError(EXIT_MISMATCH, str(exc)) from exc


def cmd_solve(args) -> int:
    if args.epsilon <= 0:
        raise CliError(EXIT_MISMATCH, "--epsilon must be > 0")
    graph = _load_graph(args.graph)
    adj = normalize(graph, args.epsilon)
    instances = _read_logits(args.logits, graph.n)
    if not (1 <= args.topk <= graph.n):
        raise CliError(EXIT_MISMATCH, f"--topk must be in [1, {graph.n}], got {args.topk}")
    cfg = _solver_config(args)

    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    out_x_fh = open(args.out_x, "w", encoding="utf-8") if args.out_x else None
    try:
        for idx, z in enumerate(instances):
            plain = softmax(z)
            result = graph_softmax(z, adj, cfg)
            plain_top = top_k(plain, graph.vocab, args.topk)
            graph_top = top_k(result.x, graph.vocab, args.topk)
            if not args.quiet:
                print(f"instance {idx} iterations={result.iterations} "
                      f"converged={str(result.converged).lower()} "
                      f"final_gap={result.trace[-1]!r}")
                print("rank plain_token plain_prob graph_token graph_prob")
                for rank, ((pt, pp), (gt, gp)) in enumerate(zip(plain_top, graph_top), 1):
                    print(f"{rank} {pt} {pp:.6f} {gt} {gp:.6f}")
            if trace_fh is not None:
                trace_fh.write(f"# solve {idx}\n")
                for it, (gap, obj) in enumerate(
                    zip(result.trace, result.objective_trace), start=1
                ):
                    trace_fh.write(f"{it} {gap!r} {obj!r}\n")
            if out_x_fh is not None:
                out_x_fh.write(" ".join(repr(v) for v in result.x.tolist()) + "\n")
    finally:
        if trace_fh is not None:
            trace_fh.close()
        if out_x_fh is not None:
            out_x_fh.close()
    return EXIT_OK


def cmd_decode(args) -> int:
    if args.epsilon <= 0:
        raise CliError(EXIT_MISMATCH, "--epsilon must be > 0")
    graph = _load_graph(args.graph)
    sentences = _read_corpus(args.corpus, args.tokenizer)
    try:
        lm = train_ngram(sentences, order=args.order, vocab=graph.vocab)
    except ValueError as exc:
        raise CliError(EXIT_MISMATCH, str(exc)) from exc
    adj = normalize(graph, args.epsilon)

    prompt_ids = []
    for tok in tokenize(args.prompt, args.tokenizer):
        if tok in lm.vocab.index and tok != EOS_TOKEN:
            prompt_ids.append(lm.vocab.index[tok])
        else:
            print(f"warning: dropping out-of-vocabulary token {tok!r}", file=sys.stderr)
    if not prompt_ids:
        raise CliError(EXIT_PROMPT, "prompt has no in-vocabulary tokens")

    cfg = DecodeConfig(
        max_len=args.max_len,
        mode=args.mode,
        seed=args.seed,
        softmax_kind=args.softmax,
        solver_cfg=SolverConfig(lam=args.lam),
    )
    seq = decode(lm, adj, prompt_ids, cfg)
    continuation = seq[len(prompt_ids):]
    print(" ".join(lm.vocab.words[t] for t in continuation))
    return EXIT_OK


def _read_token_lines(path) -> List[List[str]]:
    rows = [line.split() for line in _read_lines(path)]
    rows = [r for r in rows if r]
    if not rows:
        raise CliError(EXIT_EMPTY, f"empty file: {path}")
    return rows


def cmd_eval(args) -> int:
    did_anything = False
    if args.candidates or args.references:
        if not (args.candidates and args.references):
            raise CliError(EXIT_MISMATCH, "--candidates and --references go together")
        if not (2 <= args.max_n <= 5):
            raise CliError(EXIT_MISMATCH, "--max-n must be in [2, 5]")
        cands = _read_token_lines(args.candidates)
        refs = _read_token_lines(args.references)
        report = bleu(cands, refs, max_n=args.max_n)
        for n in range(2, args.max_n + 1):
            print(f"bleu-{n} {report.bleu_n[n]:.6f}")
        did_anything = True
    if args.lm_corpus or args.eval:
        if not (args.lm_corpus and args.eval):
            raise CliError(EXIT_MISMATCH, "--lm-corpus and --eval go together")
        train_sents = _read_corpus(args.lm_corpus, args.tokenizer)
        eval_sents = _read_corpus(args.eval, args.tokenizer)
        words = sorted({t for s in train_sents + eval_sents for t in s})
        lm = train_ngram(train_sents, order=args.order, vocab=Vocabulary.from_words(words))
        print(f"perplexity {perplexity(lm, eval_sents):.6f}")
        did_anything = True
    if not did_anything:
        raise CliError(EXIT_MISMATCH, "nothing to evaluate: pass BLEU or perplexity inputs")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtvsoftmax",
        description="Graph total-variation regularized softmax toolkit",
    )
    parser.add_argument("--seed", dest="global_seed", type=int, default=0,
                        help="global RNG seed (default 0)")
    parser.add_argument("--quiet", action="store_true", help="suppress informational output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="build a 2-gram concurrence graph from a corpus")
    p.add_argument("--corpus", required=True, help="UTF-8 text, one sentence per line")
    p.add_argument("--out", required=True, help="output GTVGRAPH v1 path")
    p.add_argument("--epsilon", type=float, default=1e-6,
                   help="normalization smoothing (default 1e-6)")
    p.add_argument("--tokenizer", choices=["whitespace_lower", "pretokenized_ids"],
                   default="whitespace_lower", help="tokenizer mode (default whitespace_lower)")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("graph-info", help="validate a graph file and print its dimensions")
    p.add_argument("--graph", required=True, help="GTVGRAPH v1 path")
    p.add_argument("--epsilon", type=float, default=1e-6,
                   help="normalization smoothing (default 1e-6)")
    p.set_defaults(func=cmd_graph_info)

    p = sub.add_parser("solve", help="solve plain vs graph softmax for logits instances")
    p.add_argument("--graph", required=True, help="GTVGRAPH v1 path")
    p.add_argument("--logits", required=True,
                   help="one instance per line, whitespace-separated reals of length N")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="TV penalty weight (default 1.0)")
    p.add_argument("--alpha", type=float, default=1e-4, help="learning rate (default 1e-4)")
    p.add_argument("--max-iters", type=int, default=20, help="iteration cap (default 20)")
    p.add_argument("--tol", type=float, default=1e-4,
                   help="convergence threshold on the step gap (default 1e-4)")
    p.add_argument("--epsilon", type=float, default=1e-6,
                   help="normalization smoothing (default 1e-6)")
    p.add_argument("--trace", default=None,
                   help="write per-iteration `iter gap objective` records here")
    p.add_argument("--out-x", default=None,
                   help="write each solved distribution as one line of reals")
    p.add_argument("--topk", type=int, default=10, help="tokens to print per column (default 10)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decode", help="generate a continuation for a prompt")
    p.add_argument("--graph", required=True, help="GTVGRAPH v1 path")
    p.add_argument("--corpus", required=True, help="corpus for the n-gram LM (same as the graph's)")
    p.add_argument("--prompt", required=True, help="prompt text")
    p.add_argument("--mode", choices=["greedy", "sample"], default="greedy",
                   help="token selection (default greedy)")
    p.add_argument("--softmax", choices=["plain", "graph"], default="graph",
                   help="distribution used per step (default graph)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="TV penalty weight (default 1.0)")
    p.add_argument("--max-len", type=int, default=150,
                   help="maximum generated tokens (default 150)")
    p.add_argument("--seed", type=int, default=None,
                   help="sampling seed (defaults to the global --seed)")
    p.add_argument("--order", type=int, default=3, help="n-gram order (default 3)")
    p.add_argument("--epsilon", type=float, default=1e-6,
                   help="normalization smoothing (default 1e-6)")
    p.add_argument("--tokenizer", choices=["whitespace_lower", "pretokenized_ids"],
                   default="whitespace_lower", help="tokenizer mode (default whitespace_lower)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="BLEU and/or perplexity")
    p.add_argument("--candidates", default=None, help="one tokenized sentence per line")
    p.add_argument("--references", default=None, help="one tokenized sentence per line")
    p.add_argument("--max-n", type=int, default=5, help="highest BLEU order (default 5)")
    p.add_argument("--lm-corpus", default=None, help="training corpus for perplexity")
    p.add_argument("--eval", default=None, help="text to score under the LM")
    p.add_argument("--order", type=int, default=3, help="n-gram order (default 3)")
    p.add_argument("--tokenizer", choices=["whitespace_lower", "pretokenized_ids"],
                   default="whitespace_lower", help="tokenizer mode (default whitespace_lower)")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = args.global_seed
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
