"""Resampled perturbation-angle bounds.

The angle between a block's true signal row space and its rank-r estimate is
bounded by ``max(|E V|, |E^T U|) / sigma_min`` with E the unobserved noise.
The two numerator norms are estimated by resampling: project the data onto
randomly chosen directions from the orthogonal complement of the retained
subspace, where the signal vanishes and only noise energy remains. Under
isotropic noise those projections are distributed like projections of E
itself, so their operator norms sample the numerator.

Each replicate pairs one row-space draw with one column-space draw and takes
the max; quantiles of the resulting sin-theta samples feed the segmentation
thresholds.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .blocks import DataBlock, PipelineConfig
from .extraction import SignalEstimate
from .linalg import order_statistic, spectral_norm


@dataclass(frozen=True)
class PerturbationBound:
    """Resampled distribution of the sin-theta bound for one block."""

    block_index: int
    sin_theta_samples: np.ndarray
    point_estimate_quantile: float
    sin_theta_hat: float
    ci: tuple[float, float]

    @property
    def n_resamples(self) -> int:
        return int(self.sin_theta_samples.size)

    def summary(self) -> dict:
        """Diagnostics fragment for this block."""
        s = self.sin_theta_samples
        return {
            "sin_theta_median": self.sin_theta_hat,
            "sin_theta_ci": [self.ci[0], self.ci[1]],
            "samples_summary": {
                "min": float(s.min()),
                "median": float(order_statistic(s, 0.5)),
                "max": float(s.max()),
            },
            "n_resamples": self.n_resamples,
        }


def _check_complement(basis: np.ndarray, rank: int, side: str, *, warn: bool) -> bool:
    """Whether draws from ``basis`` must use replacement; errors when empty."""
    width = basis.shape[1]
    if width == 0:
        raise ValueError(
            f"cannot resample: the {side} complement is empty "
            f"(retained rank equals min(d, n))"
        )
    if width >= rank:
        return False
    if warn:
        warnings.warn(
            f"{side} complement has only {width} directions for rank {rank}; "
            f"resampling with replacement",
            stacklevel=3,
        )
    return True


def _draw_energy(
    data: np.ndarray,
    basis: np.ndarray,
    rank: int,
    rng: np.random.Generator,
    replace: bool,
) -> float:
    cols = rng.choice(basis.shape[1], size=rank, replace=replace)
    return spectral_norm(data @ basis[:, cols])


def resample_row_energy(
    block: DataBlock, estimate: SignalEstimate, rng: np.random.Generator
) -> float:
    """One resampled estimate of the row-space noise energy ``|E V|``.

    Draws ``rank`` directions from the score-space complement and returns the
    spectral norm of the data projected onto them.
    """
    if estimate.rank < 1:
        raise ValueError("estimate has rank 0; nothing was retained")
    replace = _check_complement(
        estimate.score_complement, estimate.rank, "score-space", warn=True
    )
    return _draw_energy(block.values, estimate.score_complement, estimate.rank, rng, replace)


def resample_column_energy(
    block: DataBlock, estimate: SignalEstimate, rng: np.random.Generator
) -> float:
    """One resampled estimate of the column-space noise energy ``|E^T U|``."""
    if estimate.rank < 1:
        raise ValueError("estimate has rank 0; nothing was retained")
    replace = _check_complement(
        estimate.left_complement, estimate.rank, "column-space", warn=True
    )
    return _draw_energy(block.values.T, estimate.left_complement, estimate.rank, rng, replace)


def estimate_wedin_bound(
    block: DataBlock,
    estimate: SignalEstimate,
    config: PipelineConfig,
    rng: np.random.SeedSequence | int,
) -> PerturbationBound:
    """Resample the sin-theta bound distribution for one block.

    Parameters
    ----------
    block, estimate : the data and its rank-r factors from the same SVD.
    config : supplies ``n_resamples``, the point-estimate quantile, and the
        CI quantiles.
    rng : seed sequence (or plain seed) for the replicate substreams.

    Returns
    -------
    PerturbationBound
        Samples are ``max(row draw, column draw) / sigma_min`` clipped to
        [0, 1], one per replicate.

    Notes
    -----
    Each replicate draws from its own child stream of ``rng``, so the sample
    vector does not depend on evaluation order.
    """
    if not isinstance(rng, np.random.SeedSequence):
        rng = np.random.SeedSequence(rng)
    rank = estimate.rank
    if rank < 1:
        raise ValueError("estimate has rank 0; nothing was retained")
    row_replace = _check_complement(estimate.score_complement, rank, "score-space", warn=True)
    col_replace = _check_complement(estimate.left_complement, rank, "column-space", warn=True)

    sigma_min = estimate.sigma_min
    values = block.values
    samples = np.empty(config.n_resamples)
    for i, child in enumerate(rng.spawn(config.n_resamples)):
        gen = np.random.default_rng(child)
        row = _draw_energy(values, estimate.score_complement, rank, gen, row_replace)
        col = _draw_energy(values.T, estimate.left_complement, rank, gen, col_replace)
        samples[i] = max(row, col) / sigma_min
    np.clip(samples, 0.0, 1.0, out=samples)

    q = config.threshold_quantile
    lo, hi = config.ci_quantiles
    return PerturbationBound(
        block_index=estimate.block_index,
        sin_theta_samples=samples,
        point_estimate_quantile=q,
        sin_theta_hat=float(order_statistic(samples, q)),
        ci=(float(order_statistic(samples, lo)), float(order_statistic(samples, hi))),
    )
