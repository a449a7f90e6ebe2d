"""Selects the compiled group-ring kernel when available, else numpy."""
from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("CALCFORGE_PURE"):
        raise ImportError("pure mode requested")
    from . import _kernel  # type: ignore[attr-defined]
    KERNEL = "cython"
except ImportError:
    _kernel = None
    KERNEL = "numpy"


def cyclic_matmul_numpy(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """C[c] = sum_{a+b = c mod N} A[a] @ B[b] for A (N,I,K), B (N,K,J)."""
    N, I, _ = A.shape
    J = B.shape[2]
    C = np.zeros((N, I, J), dtype=np.result_type(A.dtype, B.dtype))
    for a in range(N):
        Aa = A[a]
        if not Aa.any():
            continue
        C += np.roll(np.matmul(Aa[None], B), a, axis=0)
    return C


def cyclic_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if _kernel is not None and A.dtype == np.int64 and B.dtype == np.int64:
        return _kernel.cyclic_matmul(np.ascontiguousarray(A), np.ascontiguousarray(B))
    return cyclic_matmul_numpy(A, B)


def cyclic_tensordot(a: np.ndarray, b: np.ndarray, ax_a, ax_b, N: int, matmul=None) -> np.ndarray:
    """Group-ring tensordot over leg axes (absolute axis numbers, axis 0 is the ring axis)."""
    fa = [i for i in range(1, a.ndim) if i not in ax_a]
    fb = [i for i in range(1, b.ndim) if i not in ax_b]
    sa = [a.shape[i] for i in fa]
    sb = [b.shape[i] for i in fb]
    I = int(np.prod(sa)) if sa else 1
    J = int(np.prod(sb)) if sb else 1
    K = int(np.prod([a.shape[i] for i in ax_a])) if ax_a else 1
    A = np.transpose(a, [0, *fa, *ax_a]).reshape(N, I, K)
    B = np.transpose(b, [0, *ax_b, *fb]).reshape(N, K, J)
    C = (matmul or cyclic_matmul)(A, B)
    return C.reshape(N, *sa, *sb)
