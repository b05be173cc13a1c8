"""Kernel dispatch: compiled Cython kernels when built, scipy/numpy otherwise.

The two backends are arithmetic-identical (same operation order everywhere),
so solver output does not depend on which one is active. Set
``GTVSOFTMAX_PURE=1`` to force the fallback even when the extension is built.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _kernels
except ImportError:
    _kernels = None

HAVE_COMPILED = _kernels is not None
_FORCE_PURE = os.environ.get("GTVSOFTMAX_PURE", "0") not in ("", "0")
ACTIVE = "compiled" if HAVE_COMPILED and not _FORCE_PURE else "pure"


def pure_matvec(matrix, x: np.ndarray) -> np.ndarray:
    """A @ x via scipy's CSR kernel (sequential per-row accumulation)."""
    return matrix.dot(x)


def pure_rmatvec(matrix, x: np.ndarray) -> np.ndarray:
    """A.T @ x via scipy's CSC view of the same arrays (storage-order scatter)."""
    return matrix.T.dot(x)


def pure_project_simplex(a: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex, numpy path."""
    n = a.shape[0]
    b = np.sort(a)[::-1]
    css = np.cumsum(b)
    cond = b + (1.0 - css) / np.arange(1, n + 1) > 0.0
    hits = np.nonzero(cond)[0]
    if hits.size:
        k = int(hits[-1]) + 1
        css_k = css[k - 1]
    else:
        # float rounding edge at huge |a|; exact arithmetic gives k >= 1
        k = 1
        css_k = b[0]
    gamma = (1.0 - css_k) / k
    return np.maximum(a + gamma, 0.0)


def _compiled_ok(matrix) -> bool:
    return (
        _kernels is not None
        and matrix.indptr.dtype == np.int32
        and matrix.indices.dtype == np.int32
        and matrix.data.dtype == np.float64
    )


if ACTIVE == "compiled":

    def matvec(matrix, x: np.ndarray) -> np.ndarray:
        if _compiled_ok(matrix):
            return _kernels.csr_matvec(matrix.indptr, matrix.indices, matrix.data, x)
        return pure_matvec(matrix, x)

    def rmatvec(matrix, x: np.ndarray) -> np.ndarray:
        if _compiled_ok(matrix):
            return _kernels.csr_rmatvec(
                matrix.indptr, matrix.indices, matrix.data, x, matrix.shape[1]
            )
        return pure_rmatvec(matrix, x)

    def project_simplex(a: np.ndarray) -> np.ndarray:
        return _kernels.project_simplex(a)

else:
    matvec = pure_matvec
    rmatvec = pure_rmatvec
    project_simplex = pure_project_simplex


def compiled_kernels():
    """Handle to the raw extension module, or None when not built."""
    return _kernels
