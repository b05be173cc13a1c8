"""Euclidean projection onto the probability simplex.

The projection argmin_{x in simplex} ||x - a||_2 has the closed form
x_i = max(a_i + gamma, 0), where gamma is found from a descending sort of
``a`` and a single prefix-sum scan (Duchi et al. 2008). A brute-force grid
oracle is provided for tests only; it shares no code with the fast path.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import backend

ORACLE_MAX_DIM = 8
ORACLE_MAX_GRID = 200


def project_simplex(a: np.ndarray) -> np.ndarray:
    """Project ``a`` onto {x : x >= 0, sum(x) = 1} in O(N log N).

    The result sums to 1 by construction of the shift gamma; ties in the
    sort cannot affect it because the scan only reads sorted values.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 1 or a.shape[0] < 1:
        raise ValueError("expected a 1-D vector with at least one component")
    if not np.isfinite(a).all():
        raise ValueError("non-finite input")
    return backend.project_simplex(a)


def _composition_count(n: int, total: int) -> int:
    return math.comb(total + n - 1, n - 1)


def _fill_compositions(out: np.ndarray, total: int) -> None:
    """Fill ``out`` (rows x n) with all compositions of ``total`` into n parts."""
    n = out.shape[1]
    if n == 1:
        out[:, 0] = total
        return
    if n == 2:
        firsts = np.arange(total + 1, dtype=np.float64)
        out[:, 0] = firsts
        out[:, 1] = total - firsts
        return
    pos = 0
    for first in range(total + 1):
        size = _composition_count(n - 1, total - first)
        out[pos : pos + size, 0] = first
        _fill_compositions(out[pos : pos + size, 1:], total - first)
        pos += size


@lru_cache(maxsize=8)
def _grid(n: int, grid: int):
    points = np.empty((_composition_count(n, grid), n), dtype=np.float64)
    _fill_compositions(points, grid)
    points /= grid
    # the scan runs in float32 (half the memory traffic over millions of
    # points); a float64 re-score of the shortlist makes the result exact
    points32_t = np.ascontiguousarray(points.T, dtype=np.float32)
    sq_norms32 = np.einsum("ij,ij->i", points, points).astype(np.float32)
    return points, points32_t, sq_norms32


def project_simplex_oracle(a: np.ndarray, grid: int = 100) -> np.ndarray:
    """Exhaustive-search projection over the grid discretization of the simplex.

    Checks every nonnegative integer composition of ``grid`` into N parts
    (scaled by 1/grid) and returns the closest point to ``a``. Test-scale
    only; accuracy is bounded by the grid resolution 1/grid.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.shape[0] < 1:
        raise ValueError("expected a 1-D vector with at least one component")
    if a.shape[0] > ORACLE_MAX_DIM or grid > ORACLE_MAX_GRID:
        raise ValueError("oracle scale exceeded")
    if grid < 1:
        raise ValueError("grid must be >= 1")
    points, points32_t, sq_norms32 = _grid(a.shape[0], grid)
    # argmin ||p - a||^2 = argmin ||p||^2 - 2 p.a   (||a||^2 is constant).
    # Screen in float32 with a margin far above the float32 error bound,
    # then re-score the survivors exactly.
    scores32 = sq_norms32 - 2.0 * (a.astype(np.float32) @ points32_t)
    margin = np.float32((1.0 + 2.0 * float(np.abs(a).sum())) * 1e-5)
    shortlist = np.nonzero(scores32 <= scores32.min() + margin)[0]
    cand = points[shortlist]
    exact = np.einsum("ij,ij->i", cand, cand) - 2.0 * (cand @ a)
    return points[int(shortlist[int(np.argmin(exact))])].copy()
