# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Same contracts as coclearn._kernels.reference; plain C loops over typed
memoryviews. At the batch sizes this package trains with (tens to a few
hundred rows) these fused loops avoid most of the per-call NumPy overhead.
"""

import numpy as np

from libc.math cimport exp, sqrt, tanh


def matmul(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], k = a.shape[1], m = b.shape[1]
    cdef Py_ssize_t i, j, p
    out = np.zeros((n, m))
    cdef double[:, ::1] o = out
    cdef double aik
    for i in range(n):
        for p in range(k):
            aik = a[i, p]
            for j in range(m):
                o[i, j] += aik * b[p, j]
    return out


def affine(double[:, ::1] x, double[:, ::1] w, double[::1] b):
    cdef Py_ssize_t n = x.shape[0], k = x.shape[1], m = w.shape[1]
    cdef Py_ssize_t i, j, p
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef double xik
    for i in range(n):
        for j in range(m):
            o[i, j] = b[j]
        for p in range(k):
            xik = x[i, p]
            for j in range(m):
                o[i, j] += xik * w[p, j]
    return out


def affine_grads(double[:, ::1] x, double[:, ::1] w, double[:, ::1] gy):
    cdef Py_ssize_t n = x.shape[0], k = x.shape[1], m = w.shape[1]
    cdef Py_ssize_t i, j, p
    gx_arr = np.zeros((n, k))
    gw_arr = np.zeros((k, m))
    gb_arr = np.zeros(m)
    cdef double[:, ::1] gx = gx_arr
    cdef double[:, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef double g
    for i in range(n):
        for j in range(m):
            g = gy[i, j]
            gb[j] += g
            for p in range(k):
                gx[i, p] += g * w[p, j]
                gw[p, j] += g * x[i, p]
    return gx_arr, gw_arr, gb_arr


def tanh_fwd(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    for i in range(n):
        for j in range(m):
            o[i, j] = tanh(x[i, j])
    return out


def tanh_bwd(double[:, ::1] y, double[:, ::1] gy):
    cdef Py_ssize_t n = y.shape[0], m = y.shape[1]
    cdef Py_ssize_t i, j
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    for i in range(n):
        for j in range(m):
            o[i, j] = gy[i, j] * (1.0 - y[i, j] * y[i, j])
    return out


def softmax_rows(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef double hi, s
    for i in range(n):
        hi = x[i, 0]
        for j in range(1, m):
            if x[i, j] > hi:
                hi = x[i, j]
        s = 0.0
        for j in range(m):
            o[i, j] = exp(x[i, j] - hi)
            s += o[i, j]
        for j in range(m):
            o[i, j] /= s
    return out


def l2_normalize_rows(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j
    z_arr = np.empty((n, m))
    norms_arr = np.empty(n)
    cdef double[:, ::1] z = z_arr
    cdef double[::1] norms = norms_arr
    cdef double s
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += x[i, j] * x[i, j]
        s = sqrt(s)
        norms[i] = s
        if s > 0.0:
            for j in range(m):
                z[i, j] = x[i, j] / s
        else:
            for j in range(m):
                z[i, j] = 0.0
    return z_arr, norms_arr


def l2_normalize_bwd(double[:, ::1] z, double[::1] norms, double[:, ::1] gz):
    cdef Py_ssize_t n = z.shape[0], m = z.shape[1]
    cdef Py_ssize_t i, j
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef double inner
    for i in range(n):
        inner = 0.0
        for j in range(m):
            inner += gz[i, j] * z[i, j]
        for j in range(m):
            o[i, j] = (gz[i, j] - inner * z[i, j]) / norms[i]
    return out


def pairwise_sq_dists(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], d = a.shape[1]
    cdef Py_ssize_t i, j, p
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef double s, diff
    for i in range(n):
        for j in range(m):
            s = 0.0
            for p in range(d):
                diff = a[i, p] - b[j, p]
                s += diff * diff
            o[i, j] = s
    return out


def adam_step(double[::1] p, double[::1] g, double[::1] m, double[::1] v,
              double lr, double beta1, double beta2, double eps, long t):
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t i
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef double mhat, vhat
    for i in range(n):
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i]
        mhat = m[i] / c1
        vhat = v[i] / c2
        p[i] -= lr * mhat / (sqrt(vhat) + eps)
