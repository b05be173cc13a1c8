# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the solver's hot paths.

Covers the CSR matrix-vector product, its transpose, and the Euclidean
projection onto the probability simplex. Arithmetic is kept
operation-for-operation identical to the scipy/numpy fallback in
``backend.py`` so that both backends produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def csr_matvec(const int[::1] indptr, const int[::1] indices,
               const double[::1] data, const double[::1] x):
    """out = A @ x for A in CSR layout; each row accumulates left to right."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, jj
    cdef double s
    with nogil:
        for i in range(n):
            s = 0.0
            for jj in range(indptr[i], indptr[i + 1]):
                s += data[jj] * x[indices[jj]]
            out[i] = s
    return out_arr


def csr_rmatvec(const int[::1] indptr, const int[::1] indices,
                const double[::1] data, const double[::1] x,
                Py_ssize_t ncols):
    """out = A.T @ x for A in CSR layout; scatters in storage order."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.zeros(ncols, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, jj
    cdef double xi
    with nogil:
        for i in range(n):
            xi = x[i]
            for jj in range(indptr[i], indptr[i + 1]):
                out[indices[jj]] += data[jj] * xi
    return out_arr


def project_simplex(const double[::1] a):
    """Euclidean projection of ``a`` onto {x : x >= 0, sum(x) = 1}.

    The descending order comes from numpy's sort (read back to front), the
    same sort the pure path uses; the prefix-sum scan for the active-set
    size, the shift, and the clip are fused here without temporaries.
    """
    cdef Py_ssize_t n = a.shape[0]
    asc_arr = np.sort(np.asarray(a))  # ascending; scanned back to front
    cdef const double[::1] asc = asc_arr
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, k = 0
    cdef double run = 0.0, css_k = 0.0, b_j, gamma, v
    with nogil:
        for j in range(n):
            b_j = asc[n - 1 - j]
            run += b_j
            if b_j + (1.0 - run) / (<double> (j + 1)) > 0.0:
                k = j + 1
                css_k = run
        # Exact arithmetic guarantees k >= 1 (j=1 gives b_1 + 1 - b_1 = 1);
        # guard the float rounding edge at huge |a|.
        if k == 0:
            k = 1
            css_k = asc[n - 1]
        gamma = (1.0 - css_k) / (<double> k)
        for j in range(n):
            v = a[j] + gamma
            out[j] = v if v > 0.0 else 0.0
    return out_arr
