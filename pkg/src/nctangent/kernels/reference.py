"""Pure numpy kernels (fallback backend).

Semantics contract shared with the compiled backend: all inputs are
C-contiguous complex128 stacks of square matrices, all sums accumulate in
ascending index order (so repeated runs are bit-identical), and within one
accumulation step the product order follows the noncommutative expression
being evaluated.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def apply_operator(blocks: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """(T U)^i = sum_j T[i, j] @ U[j]."""
    m, _, n, _ = blocks.shape
    out = np.zeros((m, n, n), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            out[i] += blocks[i, j] @ stack[j]
    return out


def compose_operators(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(A B)[i, j] = sum_k A[i, k] @ B[k, j]."""
    m, _, n, _ = a.shape
    out = np.zeros((m, m, n, n), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            for k in range(m):
                out[i, j] += a[i, k] @ b[k, j]
    return out


def derive_stack(x: np.ndarray, stack: np.ndarray, scale: complex) -> np.ndarray:
    """out[i, p] = scale * (X[i] @ B[p] - B[p] @ X[i]) for every direction i."""
    m = x.shape[0]
    p, n, _ = stack.shape
    out = np.empty((m, p, n, n), dtype=np.complex128)
    for i in range(m):
        for q in range(p):
            out[i, q] = scale * (x[i] @ stack[q]) - scale * (stack[q] @ x[i])
    return out


def pairing(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """sum_i U[i]* @ V[i], the module metric of two component stacks."""
    m, n, _ = u.shape
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(m):
        out += u[i].conj().T @ v[i]
    return out


def curvature_blocks(dd: np.ndarray) -> np.ndarray:
    """R[i, j, k, l] = sum_mid dD[i, k, mid] @ dD[j, mid, l] - dD[j, k, mid] @ dD[i, mid, l]."""
    m = dd.shape[0]
    n = dd.shape[-1]
    out = np.zeros((m, m, m, m, n, n), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    acc = out[i, j, k, l]
                    for mid in range(m):
                        acc += dd[i, k, mid] @ dd[j, mid, l]
                        acc -= dd[j, k, mid] @ dd[i, mid, l]
    return out


def double_contraction(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """sum_{i,j,k,l} P[j, l] @ P[i, k] @ R[i, j, k, l], factors multiplied left to right."""
    m = p.shape[0]
    n = p.shape[-1]
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    out += (p[j, l] @ p[i, k]) @ r[i, j, k, l]
    return out
