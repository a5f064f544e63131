"""Dense float64 numerics and the finite-difference gradient oracle.

Arrays are NumPy float64 throughout; the hot kernels live behind
``coclearn._kernels`` (compiled extension with a pure-NumPy fallback). There
is no autodiff engine: every loss in this package ships a hand-derived
analytic gradient, and ``finite_diff_grad`` / ``gradient_rel_error`` are the
oracle used to validate each of them.
"""

from collections.abc import Callable

import numpy as np

from coclearn import _kernels as K
from coclearn.errors import NumericError, ShapeError


def as_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Validate data as a finite float64 matrix, optionally checking its shape."""
    a = np.asarray(data, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={a.ndim}")
    if rows is not None and a.shape[0] != rows:
        raise ShapeError(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ShapeError(f"expected {cols} cols, got {a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix contains NaN or Inf")
    return np.ascontiguousarray(a)


def matmul(a, b) -> np.ndarray:
    """Matrix product with shape validation."""
    return K.matmul(as_matrix(a), as_matrix(b))


def softmax(v) -> np.ndarray:
    """Stable softmax of a vector (max-subtraction before exponentiation)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ShapeError(f"softmax expects a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NumericError("softmax input contains NaN or Inf")
    return K.softmax_rows(v[None, :])[0]


def finite_diff_grad(
    f: Callable[[np.ndarray], float], x, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient of a scalar function of a flat vector.

    grad[i] = (f(x + h e_i) - f(x - h e_i)) / (2 h)
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"finite_diff_grad expects a flat vector, got {x.shape}")
    grad = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        fp = float(f(xp))
        fm = float(f(xm))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericError(f"non-finite function value while probing coordinate {i}")
        grad[i] = (fp - fm) / (2.0 * h)
    return grad


def gradient_rel_error(analytic, numeric) -> float:
    """||g_a - g_n|| / max(||g_a||, ||g_n||), the gradient-check discrepancy."""
    ga = np.asarray(analytic, dtype=np.float64).ravel()
    gn = np.asarray(numeric, dtype=np.float64).ravel()
    if ga.shape != gn.shape:
        raise ShapeError(f"gradient shapes differ: {ga.shape} vs {gn.shape}")
    scale = max(float(np.linalg.norm(ga)), float(np.linalg.norm(gn)), 1e-12)
    return float(np.linalg.norm(ga - gn)) / scale


def check_gradient(
    f: Callable[[np.ndarray], float],
    analytic_grad,
    x,
    h: float = 1e-5,
) -> float:
    """Relative error between an analytic gradient and the central-difference one."""
    return gradient_rel_error(analytic_grad, finite_diff_grad(f, x, h=h))
