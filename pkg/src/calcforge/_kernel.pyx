# cython: language_level=3, boundscheck=False, wraparound=False
"""Cyclic group-ring matrix product on int64 numerators."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def cyclic_matmul(cnp.int64_t[:, :, ::1] A, cnp.int64_t[:, :, ::1] B):
    cdef Py_ssize_t N = A.shape[0], I = A.shape[1], K = A.shape[2], J = B.shape[2]
    cdef Py_ssize_t a, b, c, i, k, j
    cdef cnp.int64_t x
    out = np.zeros((N, I, J), dtype=np.int64)
    cdef cnp.int64_t[:, :, ::1] C = out
    for a in range(N):
        for i in range(I):
            for k in range(K):
                x = A[a, i, k]
                if x == 0:
                    continue
                for b in range(N):
                    c = a + b
                    if c >= N:
                        c -= N
                    for j in range(J):
                        C[c, i, j] += x * B[b, k, j]
    return out
