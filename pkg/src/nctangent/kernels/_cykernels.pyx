"""Compiled kernels: dense complex block contractions through direct BLAS calls.

Shares the semantics contract of ``kernels/reference.py``: ascending
accumulation order, literal noncommutative product order.  Each matrix product
is one ``zgemm`` call on the row-major buffers (operands swapped, the usual
column-major transposition trick), so there is no Python overhead inside the
index loops.
"""

import numpy as np

from scipy.linalg.cython_blas cimport zgemm

ctypedef double complex zdouble

BACKEND = "cython"

cdef char TRANS_N = b'N'[0]
cdef char TRANS_C = b'C'[0]
cdef zdouble Z_ONE = 1.0
cdef zdouble Z_MINUS_ONE = -1.0
cdef zdouble Z_ZERO = 0.0


cdef inline void _gemm(zdouble alpha, const zdouble* a, const zdouble* b,
                       zdouble beta, zdouble* c, int n) noexcept nogil:
    # row-major C := alpha * A @ B + beta * C
    zgemm(&TRANS_N, &TRANS_N, &n, &n, &n, &alpha,
          <zdouble*> b, &n, <zdouble*> a, &n, &beta, c, &n)


cdef inline void _gemm_adj(zdouble alpha, const zdouble* a, const zdouble* b,
                           zdouble beta, zdouble* c, int n) noexcept nogil:
    # row-major C := alpha * adjoint(A) @ B + beta * C
    zgemm(&TRANS_N, &TRANS_C, &n, &n, &n, &alpha,
          <zdouble*> b, &n, <zdouble*> a, &n, &beta, c, &n)


def apply_operator(double complex[:, :, :, ::1] blocks, double complex[:, :, ::1] stack):
    """(T U)^i = sum_j T[i, j] @ U[j]."""
    cdef Py_ssize_t m = blocks.shape[0]
    cdef int n = <int> blocks.shape[2]
    out_arr = np.zeros((m, n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(m):
            for j in range(m):
                _gemm(Z_ONE, &blocks[i, j, 0, 0], &stack[j, 0, 0],
                      Z_ONE, &out[i, 0, 0], n)
    return out_arr


def compose_operators(double complex[:, :, :, ::1] a, double complex[:, :, :, ::1] b):
    """(A B)[i, j] = sum_k A[i, k] @ B[k, j]."""
    cdef Py_ssize_t m = a.shape[0]
    cdef int n = <int> a.shape[2]
    out_arr = np.zeros((m, m, n, n), dtype=np.complex128)
    cdef double complex[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    with nogil:
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    _gemm(Z_ONE, &a[i, k, 0, 0], &b[k, j, 0, 0],
                          Z_ONE, &out[i, j, 0, 0], n)
    return out_arr


def derive_stack(double complex[:, :, ::1] x, double complex[:, :, ::1] stack,
                 double complex scale):
    """out[i, p] = scale * (X[i] @ B[p] - B[p] @ X[i]) for every direction i."""
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t p = stack.shape[0]
    cdef int n = <int> x.shape[1]
    out_arr = np.empty((m, p, n, n), dtype=np.complex128)
    cdef double complex[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, q
    with nogil:
        for i in range(m):
            for q in range(p):
                _gemm(scale, &x[i, 0, 0], &stack[q, 0, 0],
                      Z_ZERO, &out[i, q, 0, 0], n)
                _gemm(-scale, &stack[q, 0, 0], &x[i, 0, 0],
                      Z_ONE, &out[i, q, 0, 0], n)
    return out_arr


def pairing(double complex[:, :, ::1] u, double complex[:, :, ::1] v):
    """sum_i U[i]* @ V[i], the module metric of two component stacks."""
    cdef Py_ssize_t m = u.shape[0]
    cdef int n = <int> u.shape[1]
    out_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            _gemm_adj(Z_ONE, &u[i, 0, 0], &v[i, 0, 0], Z_ONE, &out[0, 0], n)
    return out_arr


def curvature_blocks(double complex[:, :, :, :, ::1] dd):
    """R[i, j, k, l] = sum_mid dD[i, k, mid] @ dD[j, mid, l] - dD[j, k, mid] @ dD[i, mid, l]."""
    cdef Py_ssize_t m = dd.shape[0]
    cdef int n = <int> dd.shape[3]
    out_arr = np.zeros((m, m, m, m, n, n), dtype=np.complex128)
    cdef double complex[:, :, :, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, l, mid
    with nogil:
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        for mid in range(m):
                            _gemm(Z_ONE, &dd[i, k, mid, 0, 0], &dd[j, mid, l, 0, 0],
                                  Z_ONE, &out[i, j, k, l, 0, 0], n)
                            _gemm(Z_MINUS_ONE, &dd[j, k, mid, 0, 0], &dd[i, mid, l, 0, 0],
                                  Z_ONE, &out[i, j, k, l, 0, 0], n)
    return out_arr


def double_contraction(double complex[:, :, :, ::1] p, double complex[:, :, :, :, :, ::1] r):
    """sum_{i,j,k,l} P[j, l] @ P[i, k] @ R[i, j, k, l], factors multiplied left to right."""
    cdef Py_ssize_t m = p.shape[0]
    cdef int n = <int> p.shape[2]
    out_arr = np.zeros((n, n), dtype=np.complex128)
    tmp_arr = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t i, j, k, l
    with nogil:
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        _gemm(Z_ONE, &p[j, l, 0, 0], &p[i, k, 0, 0],
                              Z_ZERO, &tmp[0, 0], n)
                        _gemm(Z_ONE, &tmp[0, 0], &r[i, j, k, l, 0, 0],
                              Z_ONE, &out[0, 0], n)
    return out_arr
