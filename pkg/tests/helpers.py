"""Shared test utilities: small constructions the suite uses repeatedly."""

import numpy as np

from nijive import DataBlock, SignalEstimate


def orthonormal(rng, n: int, r: int) -> np.ndarray:
    """Random n x r matrix with orthonormal columns."""
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return q[:, :r]


def low_rank_block(rng, d: int, n: int, strengths, name: str = "b") -> DataBlock:
    """Exact low-rank block with the given singular values."""
    strengths = np.asarray(strengths, dtype=float)
    r = strengths.size
    u = orthonormal(rng, d, r)
    v = orthonormal(rng, n, r)
    return DataBlock(name=name, values=(u * strengths) @ v.T)


def score_only_estimate(score_basis: np.ndarray, block_index: int = 0) -> SignalEstimate:
    """Minimal estimate carrying just a score basis, for stacking tests.

    The left factors are placeholders; anything touching them will blow up
    loudly rather than silently pass.
    """
    n, r = score_basis.shape
    return SignalEstimate(
        block_index=block_index,
        rank=r,
        left_basis=np.full((r, r), np.nan),
        singular_values=np.ones(r),
        score_basis=score_basis,
        threshold=1.0,
        full_spectrum=np.ones(r),
        left_complement=np.zeros((r, 0)),
        score_complement=np.zeros((n, 0)),
    )


def constant_sample_bound(value: float, n_samples: int = 100, block_index: int = 0):
    """PerturbationBound whose every resample equals ``value``."""
    from nijive import PerturbationBound

    samples = np.full(n_samples, float(value))
    return PerturbationBound(
        block_index=block_index,
        sin_theta_samples=samples,
        point_estimate_quantile=0.5,
        sin_theta_hat=float(value),
        ci=(float(value), float(value)),
    )
