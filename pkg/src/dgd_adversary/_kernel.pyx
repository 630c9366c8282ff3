# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation loop for the perturbed consensus-gradient iteration.

Mixing walks only the nonzero weights of each row (W is sparse for
non-complete graphs); skipped terms are exact zeros, so results match a
dense row sum taken in the same column order.
"""
import numpy as np

from libc.math cimport fabs, isfinite


def propagate(W, const double[:, :, ::1] A, const double[:, ::1] b, double alpha,
              const double[:, :, ::1] E, double[:, :, ::1] out, double limit):
    """Fill ``out[1:]`` from ``out[0]``; same contract as ``_kernel_py.propagate``."""
    dense = np.asarray(W, dtype=np.float64)
    rows, cols = np.nonzero(dense)
    cdef long[::1] indptr = np.searchsorted(rows, np.arange(dense.shape[0] + 1)).astype(np.int_)
    cdef long[::1] indices = np.ascontiguousarray(cols, dtype=np.int_)
    cdef double[::1] data = np.ascontiguousarray(dense[rows, cols])
    cdef Py_ssize_t K = E.shape[0]
    cdef Py_ssize_t n = dense.shape[0]
    cdef Py_ssize_t p = out.shape[2]
    cdef Py_ssize_t k, i, jj, q, r
    cdef double mix, grad, v
    cdef int bad_k = -1, bad_i = -1
    with nogil:
        for k in range(K):
            for i in range(n):
                for q in range(p):
                    mix = 0.0
                    for jj in range(indptr[i], indptr[i + 1]):
                        mix = mix + data[jj] * out[k, indices[jj], q]
                    grad = 0.0
                    for r in range(p):
                        grad = grad + A[i, q, r] * (out[k, i, r] - b[i, r])
                    v = (mix - alpha * grad) + E[k, i, q]
                    out[k + 1, i, q] = v
                    if bad_k < 0 and (not isfinite(v) or fabs(v) > limit):
                        bad_k = k + 1
                        bad_i = i
            if bad_k >= 0:
                break
    return bad_k, bad_i
