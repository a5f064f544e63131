"""Pure-NumPy implementations of the hot training kernels.

This is the fallback backend and the semantic reference for the compiled
extension: both must agree on every kernel up to floating-point summation
order. All inputs are C-contiguous float64 arrays (the dispatch layer in
``coclearn._kernels`` guarantees this).
"""

import numpy as np


def matmul(a, b):
    return a @ b


def affine(x, w, b):
    return x @ w + b


def affine_grads(x, w, gy):
    gx = gy @ w.T
    gw = x.T @ gy
    gb = gy.sum(axis=0)
    return gx, gw, gb


def tanh_fwd(x):
    return np.tanh(x)


def tanh_bwd(y, gy):
    return gy * (1.0 - y * y)


def softmax_rows(x):
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def l2_normalize_rows(x):
    norms = np.sqrt((x * x).sum(axis=1))
    return x / norms[:, None], norms


def l2_normalize_bwd(z, norms, gz):
    # d/de of z = e/|e|: project gz off the z direction, then rescale.
    inner = (gz * z).sum(axis=1, keepdims=True)
    return (gz - inner * z) / norms[:, None]


def pairwise_sq_dists(a, b):
    diff = a[:, None, :] - b[None, :, :]
    return (diff * diff).sum(axis=2)


def adam_step(p, g, m, v, lr, beta1, beta2, eps, t):
    # In-place update of p, m, v (flat float64 views); t is the 1-based step.
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    mhat = m / (1.0 - beta1**t)
    vhat = v / (1.0 - beta2**t)
    p -= lr * mhat / (np.sqrt(vhat) + eps)
