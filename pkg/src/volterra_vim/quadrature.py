"""Composite trapezoidal rule on uniform grids.

Sums run strictly left to right (no pairwise or compensated summation) so
results are reproducible term by term.
"""

import math

import numpy as np

__all__ = ["trapezoid", "cumulative_trapezoid", "trapezoid_rows"]


def _check(values, h):
    s = np.asarray(values, dtype=np.float64)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("need a one-dimensional sample vector with at least one entry")
    if not (math.isfinite(h) and h > 0):
        raise ValueError(f"step must be finite and positive, got {h!r}")
    return s


def trapezoid(values, h: float) -> float:
    """``h * (s_0/2 + s_1 + ... + s_{m-1} + s_m/2)``; 0 for a single sample."""
    s = _check(values, h)
    m = s.size - 1
    if m == 0:
        return 0.0
    acc = s[0] / 2
    for j in range(1, m):
        acc += s[j]
    acc += s[m] / 2
    return float(h * acc)


def cumulative_trapezoid(values, h: float) -> np.ndarray:
    """Prefix integrals: ``c_0 = 0``, ``c_j = c_{j-1} + h*(s_{j-1} + s_j)/2``."""
    s = _check(values, h)
    out = np.zeros_like(s)
    if s.size > 1:
        # np.cumsum accumulates sequentially
        out[1:] = np.cumsum(h * (s[:-1] + s[1:]) / 2)
    return out


def trapezoid_rows(weights: np.ndarray, h: float) -> np.ndarray:
    """Row-wise trapezoid of a lower-triangular weight matrix.

    Entry ``i`` of the result is the trapezoid rule applied to
    ``weights[i, 0..i]``, with the same summation order as :func:`trapezoid`.
    Entries above the diagonal are ignored (they may be non-finite).
    """
    w = np.asarray(weights, dtype=np.float64)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ValueError("weights must be square")
    out = np.zeros(n)
    if n < 2:
        return out
    a = np.where(np.tri(n, dtype=bool), w, 0.0)
    diag = np.arange(n)
    a[:, 0] = a[:, 0] / 2
    a[diag[1:], diag[1:]] = a[diag[1:], diag[1:]] / 2
    acc = np.cumsum(a, axis=1)[diag, diag]
    out[1:] = h * acc[1:]
    return out
