"""Kernel backend selection.

Two interchangeable backends implement the dense per-iteration kernels:

* ``compiled`` — the Cython extension ``_speedups``, built at install time;
* ``python``  — the pure-NumPy reference in ``reference.py``.

Selection happens at import via the ``COCLEARN_BACKEND`` environment variable
(``auto`` | ``compiled`` | ``python``; default ``auto`` prefers the compiled
extension when it imported cleanly). ``set_backend`` swaps backends at runtime,
which the cross-checking tests and the benchmark use.

Backends agree on every kernel up to floating-point summation order; results
are bit-reproducible within one backend but not across backends. Anything that
must be byte-identical across runs (reports, checkpoints) therefore assumes a
fixed backend.
"""

import os

import numpy as np

from coclearn.errors import NumericError, ShapeError

from . import reference

try:
    from . import _speedups
except ImportError:
    _speedups = None

_BACKENDS = {"python": reference}
if _speedups is not None:
    _BACKENDS["compiled"] = _speedups


def _initial_backend() -> str:
    requested = os.environ.get("COCLEARN_BACKEND", "auto")
    if requested == "auto":
        return "compiled" if _speedups is not None else "python"
    if requested not in _BACKENDS:
        available = ", ".join(sorted(_BACKENDS))
        raise ImportError(
            f"COCLEARN_BACKEND={requested!r} is not available (have: {available})"
        )
    return requested


_active = _initial_backend()


def active_backend() -> str:
    """Name of the backend currently serving kernel calls."""
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> str:
    """Switch backends; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        available = ", ".join(sorted(_BACKENDS))
        raise ValueError(f"unknown backend {name!r} (have: {available})")
    previous = _active
    _active = name
    return previous


def _arr(x, name, ndim):
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.ndim != ndim:
        raise ShapeError(f"{name} must be {ndim}-d, got shape {a.shape}")
    return a


def matmul(a, b):
    a = _arr(a, "a", 2)
    b = _arr(b, "b", 2)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shapes do not chain: {a.shape} x {b.shape}")
    return _BACKENDS[_active].matmul(a, b)


def affine(x, w, b):
    x = _arr(x, "x", 2)
    w = _arr(w, "w", 2)
    b = _arr(b, "b", 1)
    if x.shape[1] != w.shape[0] or w.shape[1] != b.shape[0]:
        raise ShapeError(
            f"affine shapes do not chain: x{x.shape} w{w.shape} b{b.shape}"
        )
    return _BACKENDS[_active].affine(x, w, b)


def affine_grads(x, w, gy):
    x = _arr(x, "x", 2)
    w = _arr(w, "w", 2)
    gy = _arr(gy, "gy", 2)
    if gy.shape != (x.shape[0], w.shape[1]):
        raise ShapeError(f"gy shape {gy.shape} does not match x{x.shape} w{w.shape}")
    return _BACKENDS[_active].affine_grads(x, w, gy)


def tanh_fwd(x):
    return _BACKENDS[_active].tanh_fwd(_arr(x, "x", 2))


def tanh_bwd(y, gy):
    y = _arr(y, "y", 2)
    gy = _arr(gy, "gy", 2)
    if y.shape != gy.shape:
        raise ShapeError(f"tanh_bwd shapes differ: {y.shape} vs {gy.shape}")
    return _BACKENDS[_active].tanh_bwd(y, gy)


def softmax_rows(x):
    x = _arr(x, "x", 2)
    if x.shape[1] == 0:
        raise ShapeError("softmax over zero classes")
    return _BACKENDS[_active].softmax_rows(x)


def l2_normalize_rows(x):
    x = _arr(x, "x", 2)
    z, norms = _BACKENDS[_active].l2_normalize_rows(x)
    if norms.min(initial=np.inf) < 1e-12:
        raise NumericError("cannot L2-normalize a (near-)zero row")
    return z, norms


def l2_normalize_bwd(z, norms, gz):
    z = _arr(z, "z", 2)
    norms = _arr(norms, "norms", 1)
    gz = _arr(gz, "gz", 2)
    if z.shape != gz.shape or norms.shape[0] != z.shape[0]:
        raise ShapeError("l2_normalize_bwd shape mismatch")
    return _BACKENDS[_active].l2_normalize_bwd(z, norms, gz)


def pairwise_sq_dists(a, b):
    a = _arr(a, "a", 2)
    b = _arr(b, "b", 2)
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return _BACKENDS[_active].pairwise_sq_dists(a, b)


def adam_step(p, g, m, v, lr, beta1, beta2, eps, t):
    # p, m, v are updated in place; caller passes flat contiguous views.
    for name, arr in (("p", p), ("g", g), ("m", m), ("v", v)):
        if arr.ndim != 1 or arr.dtype != np.float64 or not arr.flags.c_contiguous:
            raise ShapeError(f"adam_step: {name} must be a flat contiguous float64 array")
        if arr.shape != p.shape:
            raise ShapeError("adam_step: array lengths differ")
    _BACKENDS[_active].adam_step(p, g, m, v, lr, beta1, beta2, eps, t)
