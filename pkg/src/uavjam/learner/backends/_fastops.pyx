# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense-net kernels: BLAS-backed matrix products plus fused
elementwise/reduction loops.  Mirrors numpy_ops exactly (same signatures,
same math); the backend selector falls back to numpy_ops when this
extension is unavailable."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

NAME = "ext"

cdef char _N = b'N'
cdef char _T = b'T'
cdef double _ONE = 1.0
cdef double _ZERO = 0.0


# ---------------------------------------------------------------------------
# Matrix products.  Arrays are C-contiguous (row-major); a row-major (r, c)
# array is the column-major matrix of its transpose with leading dimension c,
# so each product is issued to dgemm in transposed form.
# ---------------------------------------------------------------------------

def gemm(double[:, ::1] a, double[:, ::1] b):
    """a @ b for a (m, k) and b (k, n)."""
    cdef int m = a.shape[0], k = a.shape[1], n = b.shape[1]
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    if m == 0 or n == 0:
        return out
    if k == 0:
        out[...] = 0.0
        return out
    dgemm(&_N, &_N, &n, &m, &k, &_ONE, &b[0, 0], &n, &a[0, 0], &k,
          &_ZERO, &c[0, 0], &n)
    return out


def gemm_tn(double[:, ::1] a, double[:, ::1] b):
    """a.T @ b for a (m, k) and b (m, n): result (k, n)."""
    cdef int m = a.shape[0], k = a.shape[1], n = b.shape[1]
    out = np.empty((k, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    if k == 0 or n == 0:
        return out
    if m == 0:
        out[...] = 0.0
        return out
    dgemm(&_N, &_T, &n, &k, &m, &_ONE, &b[0, 0], &n, &a[0, 0], &k,
          &_ZERO, &c[0, 0], &n)
    return out


def gemm_nt(double[:, ::1] a, double[:, ::1] b):
    """a @ b.T for a (m, k) and b (n, k): result (m, n)."""
    cdef int m = a.shape[0], k = a.shape[1], n = b.shape[0]
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    if m == 0 or n == 0:
        return out
    if k == 0:
        out[...] = 0.0
        return out
    dgemm(&_T, &_N, &n, &m, &k, &_ONE, &b[0, 0], &k, &a[0, 0], &k,
          &_ZERO, &c[0, 0], &n)
    return out


# ---------------------------------------------------------------------------
# Elementwise and reduction kernels.
# ---------------------------------------------------------------------------

def add_bias(double[:, ::1] x, double[::1] b):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], i, j
    out = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(n):
        for j in range(d):
            o[i, j] = x[i, j] + b[j]
    return out


def relu(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], i, j
    out = np.empty((n, d), dtype=np.float64)
    mask = np.empty((n, d), dtype=np.uint8)
    cdef double[:, ::1] o = out
    cdef unsigned char[:, ::1] m = mask
    for i in range(n):
        for j in range(d):
            if x[i, j] > 0.0:
                o[i, j] = x[i, j]
                m[i, j] = 1
            else:
                o[i, j] = 0.0
                m[i, j] = 0
    return out, mask


def relu_grad(double[:, ::1] dout, unsigned char[:, ::1] mask):
    cdef Py_ssize_t n = dout.shape[0], d = dout.shape[1], i, j
    out = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(n):
        for j in range(d):
            o[i, j] = dout[i, j] if mask[i, j] else 0.0
    return out


def bn_train(double[:, ::1] x, double[::1] gamma, double[::1] beta,
             double eps):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], i, j
    out = np.empty((n, d), dtype=np.float64)
    xhat = np.empty((n, d), dtype=np.float64)
    mean = np.zeros(d, dtype=np.float64)
    inv_std = np.empty(d, dtype=np.float64)
    cdef double[:, ::1] o = out, xh = xhat
    cdef double[::1] mu = mean, isd = inv_std
    cdef double acc, dev
    for j in range(d):
        acc = 0.0
        for i in range(n):
            acc += x[i, j]
        mu[j] = acc / n
    for j in range(d):
        acc = 0.0
        for i in range(n):
            dev = x[i, j] - mu[j]
            acc += dev * dev
        isd[j] = 1.0 / sqrt(acc / n + eps)
    for i in range(n):
        for j in range(d):
            xh[i, j] = (x[i, j] - mu[j]) * isd[j]
            o[i, j] = gamma[j] * xh[i, j] + beta[j]
    return out, xhat, mean, inv_std


def bn_eval(double[:, ::1] x, double[::1] gamma, double[::1] beta,
            double[::1] mean, double[::1] var, double eps):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], i, j
    out = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[::1] scale = np.empty(d, dtype=np.float64)
    for j in range(d):
        scale[j] = gamma[j] / sqrt(var[j] + eps)
    for i in range(n):
        for j in range(d):
            o[i, j] = scale[j] * (x[i, j] - mean[j]) + beta[j]
    return out


def bn_grad(double[:, ::1] dout, double[:, ::1] xhat, double[::1] inv_std,
            double[::1] gamma):
    cdef Py_ssize_t n = dout.shape[0], d = dout.shape[1], i, j
    dx = np.empty((n, d), dtype=np.float64)
    dgamma = np.zeros(d, dtype=np.float64)
    dbeta = np.zeros(d, dtype=np.float64)
    cdef double[:, ::1] dxm = dx
    cdef double[::1] dg = dgamma, db = dbeta
    cdef double coef
    for i in range(n):
        for j in range(d):
            db[j] += dout[i, j]
            dg[j] += dout[i, j] * xhat[i, j]
    for j in range(d):
        coef = gamma[j] * inv_std[j] / n
        for i in range(n):
            dxm[i, j] = coef * (n * dout[i, j] - db[j] - xhat[i, j] * dg[j])
    return dx, dgamma, dbeta


def adam(double[::1] p, double[::1] g, double[::1] m, double[::1] v,
         double lr, double beta1, double beta2, double eps, int t):
    cdef Py_ssize_t n = p.shape[0], i
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    for i in range(n):
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i]
        p[i] -= lr * (m[i] / c1) / (sqrt(v[i] / c2) + eps)
