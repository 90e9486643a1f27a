"""Thin linear-algebra helpers shared across the pipeline.

All SVD factorizations in the package go through :func:`full_svd` so that the
total factorization count of a pipeline run can be audited (the algorithm is
non-iterative: a fixed, small number of SVDs per run).
"""

import math

import numpy as np


def full_svd(a: np.ndarray):
    """Thin SVD ``a = U @ diag(s) @ Vt`` with ``min(d, n)`` components.

    Parameters
    ----------
    a : ndarray of shape (d, n)

    Returns
    -------
    u : ndarray of shape (d, min(d, n))
    s : ndarray of shape (min(d, n),), non-increasing
    vt : ndarray of shape (min(d, n), n)
    """
    return np.linalg.svd(a, full_matrices=False)


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values of ``a`` in non-increasing order (no factorization)."""
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def spectral_norm(a: np.ndarray) -> float:
    """Operator (L2) norm of ``a``; 0.0 for an empty matrix."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def fix_signs(u: np.ndarray, vt: np.ndarray):
    """Resolve SVD sign ambiguity for stable, comparable outputs.

    The entry of largest magnitude in each row of ``vt`` is made positive;
    the matching column of ``u`` is negated in tandem, leaving the product
    unchanged. Ties resolve to the first index.
    """
    u = u.copy()
    vt = vt.copy()
    for i in range(vt.shape[0]):
        j = int(np.argmax(np.abs(vt[i])))
        if vt[i, j] < 0:
            vt[i] = -vt[i]
            u[:, i] = -u[:, i]
    return u, vt


def order_statistic(values: np.ndarray, q: float) -> float:
    """The ``q``-quantile of ``values`` as an order statistic (inverted CDF).

    Always returns an element of ``values``, so quantile summaries of a
    resampled distribution are actual observed samples.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile must be in [0, 1], got {q}")
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("cannot take a quantile of an empty sample")
    # q arrives through arithmetic like 1 - 0.95, so q * size can sit a few
    # ulp above an exact integer; nudge the ceiling onto the integer side
    idx = min(v.size - 1, max(0, math.ceil(q * v.size - 1e-9) - 1))
    return float(v[idx])
