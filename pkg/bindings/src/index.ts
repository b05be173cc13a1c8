/**
 * Node bindings for the gtvsoftmax solver.
 *
 * Exposes exactly two decode-time operations: loading a concurrence graph
 * (GTVGRAPH v1 file) and running the graph-regularized softmax on a logits
 * vector, so the layer can replace the final softmax in an external LM's
 * decode loop. Everything runs through the solver CLI, so results are the
 * solver's own doubles: the CLI serializes with shortest round-trip
 * precision and parsing that back yields bit-identical IEEE-754 values.
 *
 * The CLI is resolved from the GTVSOFTMAX_CLI environment variable
 * (whitespace-separated command, e.g. "python3 -m gtvsoftmax.cli") or
 * defaults to `gtvsoftmax` on PATH.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface BoundGraph {
  /** Path of the loaded GTVGRAPH v1 file. */
  readonly path: string;
  /** Vocabulary size; matches the file header and every solve's dimension. */
  readonly n: number;
  /** Stored edge count. */
  readonly nnz: number;
  /** Row-normalization smoothing applied at solve time. */
  readonly epsilon: number;
}

export interface SolveOptions {
  /** TV penalty weight (default 1.0). */
  lambda?: number;
  /** Gradient step size (default 1e-4). */
  alpha?: number;
  /** Iteration cap (default 20). */
  maxIters?: number;
  /** Convergence threshold on the step gap (default 1e-4). */
  tol?: number;
}

export interface SolveResult {
  /** The solved distribution: nonnegative, sums to 1. */
  probs: number[];
  iterations: number;
  converged: boolean;
}

function cliCommand(): string[] {
  const env = process.env.GTVSOFTMAX_CLI;
  if (env && env.trim().length > 0) {
    return env.trim().split(/\s+/);
  }
  return ["gtvsoftmax"];
}

function runCli(args: string[]): string {
  const [cmd, ...prefix] = cliCommand();
  const proc = spawnSync(cmd, [...prefix, ...args], { encoding: "utf-8" });
  if (proc.error) {
    throw new Error(`failed to run solver CLI: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    const message = proc.stderr.trim().replace(/^error:\s*/, "");
    throw new Error(message || `solver CLI exited with status ${proc.status}`);
  }
  return proc.stdout;
}

/**
 * Validate and load a GTVGRAPH v1 file.
 *
 * The graph is normalized with the given smoothing epsilon (default 1e-6)
 * whenever it is solved against. Malformed files raise with the solver's
 * own error message.
 */
export function loadGraph(path: string, epsilon: number = 1e-6): BoundGraph {
  const out = runCli([
    "graph-info",
    "--graph", path,
    "--epsilon", String(epsilon),
  ]);
  const match = out.match(/N=(\d+) nnz=(\d+)/);
  if (!match) {
    throw new Error(`unexpected graph-info output: ${out.trim()}`);
  }
  return Object.freeze({
    path,
    n: Number(match[1]),
    nnz: Number(match[2]),
    epsilon,
  });
}

function parseFloats(text: string): number[] {
  const parts = text.trim().split(/\s+/);
  const values = parts.map(Number);
  if (values.some((v) => Number.isNaN(v))) {
    throw new Error(`unparseable solver output: ${text.slice(0, 80)}`);
  }
  return values;
}

/**
 * Run the graph-regularized softmax on one logits vector.
 *
 * Returns the solver's distribution bit-for-bit (shortest round-trip
 * serialization both ways), plus the iteration count and convergence flag
 * derived from the solver's trace.
 */
export function graphSoftmax(
  graph: BoundGraph,
  logits: readonly number[],
  options: SolveOptions = {},
): SolveResult {
  if (logits.length !== graph.n) {
    throw new Error(
      `length mismatch: logits has ${logits.length} values, graph has ${graph.n}`,
    );
  }
  for (const v of logits) {
    if (!Number.isFinite(v)) {
      throw new Error("logits must be finite");
    }
  }
  const lambda = options.lambda ?? 1.0;
  const alpha = options.alpha ?? 1e-4;
  const maxIters = options.maxIters ?? 20;
  const tol = options.tol ?? 1e-4;

  const workdir = mkdtempSync(join(tmpdir(), "gtvsm-"));
  try {
    const logitsPath = join(workdir, "logits.txt");
    const outPath = join(workdir, "x.txt");
    const tracePath = join(workdir, "trace.txt");
    writeFileSync(logitsPath, logits.map((v) => String(v)).join(" ") + "\n");
    runCli([
      "--quiet",
      "solve",
      "--graph", graph.path,
      "--logits", logitsPath,
      "--epsilon", String(graph.epsilon),
      "--lambda", String(lambda),
      "--alpha", String(alpha),
      "--max-iters", String(maxIters),
      "--tol", String(tol),
      "--out-x", outPath,
      "--trace", tracePath,
      "--topk", "1",
    ]);
    const probs = parseFloats(readFileSync(outPath, "utf-8"));
    const gaps = readFileSync(tracePath, "utf-8")
      .split("\n")
      .filter((line) => line.length > 0 && !line.startsWith("#"))
      .map((line) => Number(line.split(/\s+/)[1]));
    return {
      probs,
      iterations: gaps.length,
      converged: gaps.length > 0 && gaps[gaps.length - 1] < tol,
    };
  } finally {
    rmSync(workdir, { recursive: true, force: true });
  }
}
