"""Joint-rank selection from the stacked score bases.

Stacking the transposed score bases of all K blocks into one matrix M turns
multi-block agreement into a spectral question: a direction lying in every
block's score space gives M a singular value of sqrt(K), while a direction
present in only one block gives 1. For K = 2 the squared singular values also
encode the principal angles between the two score spaces through
``cos(phi_i) = sigma_i^2 - 1``.

Two selection rules are supported. The two-block rule thresholds the angles
at a resampled bound on ``theta_1 + theta_2``; the multi-block rule keeps
squared singular values above ``K - sum_k sin^2(theta_k)``. Both thresholds
are quantiles over per-replicate combinations of the per-block perturbation
samples.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .blocks import Criterion, PipelineConfig
from .extraction import SignalEstimate
from .linalg import full_svd, order_statistic
from .wedin import PerturbationBound

# noiseless shared directions compute sigma^2 = K - O(1e-15) while the
# threshold can be exactly K; the margin keeps the inclusive rule meaningful
SV_SELECTION_MARGIN = 1e-9
# same story in angle form: an exactly shared direction computes as ~1e-6 deg
# against a possibly exact 0 deg threshold
ANGLE_SELECTION_MARGIN_DEG = 1e-4


@dataclass(frozen=True)
class StackedScores:
    """Vertical stack M of transposed score bases with its SVD."""

    matrix: np.ndarray
    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors_t: np.ndarray
    block_row_ranges: tuple[tuple[int, int], ...]

    @property
    def n_blocks(self) -> int:
        return len(self.block_row_ranges)

    @property
    def block_ranks(self) -> tuple[int, ...]:
        return tuple(stop - start for start, stop in self.block_row_ranges)


@dataclass(frozen=True)
class SegmentationDiagnostics:
    criterion: Criterion
    squared_singular_values: np.ndarray
    principal_angles_deg: np.ndarray | None
    threshold: float
    threshold_ci: tuple[float, float]
    provisional_joint_rank: int

    def to_fragment(self) -> dict:
        angles = self.principal_angles_deg
        return {
            "criterion": self.criterion.value,
            "squared_singular_values": [float(v) for v in self.squared_singular_values],
            "principal_angles_deg": None if angles is None else [float(a) for a in angles],
            "threshold": self.threshold,
            "threshold_ci": [self.threshold_ci[0], self.threshold_ci[1]],
            "provisional_joint_rank": self.provisional_joint_rank,
        }


def stack_scores(estimates: list[SignalEstimate]) -> StackedScores:
    """Assemble M from the blocks' score bases and factorize it."""
    if len(estimates) < 2:
        raise ValueError("stacking needs at least two blocks")
    n = estimates[0].score_basis.shape[0]
    for e in estimates[1:]:
        if e.score_basis.shape[0] != n:
            raise ValueError(
                f"score bases disagree on n: block {estimates[0].block_index} has "
                f"{n} objects, block {e.block_index} has {e.score_basis.shape[0]}"
            )
    matrix = np.vstack([e.score_basis.T for e in estimates])
    u, s, vt = full_svd(matrix)
    ranges = []
    start = 0
    for e in estimates:
        ranges.append((start, start + e.rank))
        start += e.rank
    return StackedScores(
        matrix=matrix,
        left_vectors=u,
        singular_values=s,
        right_vectors_t=vt,
        block_row_ranges=tuple(ranges),
    )


def principal_angles(stacked: StackedScores) -> np.ndarray:
    """Principal angles (degrees, ascending) between two score spaces.

    Uses the identity ``cos(phi_i) = sigma_i^2 - 1`` on the stacked SVD; only
    the first ``min(r_1, r_2)`` components describe angles, the rest belong
    to the orthogonal complements.
    """
    if stacked.n_blocks != 2:
        raise ValueError(
            f"principal angles from the stack are defined for exactly 2 blocks, "
            f"got {stacked.n_blocks}"
        )
    m = min(stacked.block_ranks)
    # round-off can push sigma^2 - 1 a few ulp outside [-1, 1]
    cosines = np.clip(stacked.singular_values[:m] ** 2 - 1.0, -1.0, 1.0)
    return np.degrees(np.arccos(cosines))


def _sample_matrix(bounds: list[PerturbationBound]) -> np.ndarray:
    counts = {b.n_resamples for b in bounds}
    if len(counts) != 1:
        raise ValueError(f"blocks have differing replicate counts: {sorted(counts)}")
    return np.vstack([b.sin_theta_samples for b in bounds])


def two_block_angle_threshold(
    bounds: list[PerturbationBound], config: PipelineConfig
) -> tuple[float, tuple[float, float]]:
    """Angle threshold (degrees) with CI from the paired replicate sums.

    Replicate r combines both blocks' r-th samples: the threshold sample is
    ``min(theta_1 + theta_2, 90 deg)``. Angles below the configured quantile
    of these sums cannot be told apart from noise rotation.
    """
    if len(bounds) != 2:
        raise ValueError(f"the angle rule needs exactly 2 blocks, got {len(bounds)}")
    samples = _sample_matrix(bounds)
    phi = np.minimum(np.arcsin(samples[0]) + np.arcsin(samples[1]), np.pi / 2)
    threshold = float(np.degrees(order_statistic(phi, config.threshold_quantile)))
    lo, hi = config.ci_quantiles
    ci = (
        float(np.degrees(order_statistic(phi, lo))),
        float(np.degrees(order_statistic(phi, hi))),
    )
    if threshold >= 90.0:
        warnings.warn(
            "angle threshold saturated at 90 deg; no component can be excluded",
            stacklevel=2,
        )
    return threshold, ci


def multi_block_sv_threshold(
    bounds: list[PerturbationBound], config: PipelineConfig
) -> tuple[float, tuple[float, float]]:
    """Squared-singular-value threshold ``K - sum_k sin^2(theta_k)`` with CI.

    Replicates are paired across blocks. Note the inversion: noisier samples
    give a lower, more permissive threshold, so the point estimate takes the
    ``1 - threshold_quantile`` order statistic of the per-replicate values
    and the CI endpoints take the ``1 - ci_quantiles`` ones. With the default
    (0.05, 0.95) the CI pair is therefore descending, the finite ends of the
    one-sided intervals ``[t, +inf)``.
    """
    samples = _sample_matrix(bounds)
    k = samples.shape[0]
    t = k - (samples**2).sum(axis=0)
    threshold = float(order_statistic(t, 1.0 - config.threshold_quantile))
    lo, hi = config.ci_quantiles
    ci = (
        float(order_statistic(t, 1.0 - lo)),
        float(order_statistic(t, 1.0 - hi)),
    )
    return threshold, ci


def select_joint_rank(
    stacked: StackedScores,
    criterion: Criterion,
    threshold: float,
    threshold_ci: tuple[float, float],
) -> SegmentationDiagnostics:
    """Count the components passing the criterion and package diagnostics.

    The angle rule keeps ``phi_i < threshold`` (strict), the singular-value
    rule keeps ``sigma_i^2 >= threshold`` (inclusive); both comparisons carry
    a tiny margin so exactly-shared directions survive round-off, and the
    selected count never exceeds the smallest block rank. Angles are reported
    whenever K = 2 regardless of the active criterion.
    """
    criterion = Criterion(criterion)
    sq = stacked.singular_values**2
    angles = principal_angles(stacked) if stacked.n_blocks == 2 else None
    max_rank = min(stacked.block_ranks)
    if criterion is Criterion.TWO_BLOCK_ANGLE:
        if angles is None:
            raise ValueError("the two-block angle rule requires exactly 2 blocks")
        rank = int(np.sum(angles < threshold + ANGLE_SELECTION_MARGIN_DEG))
    else:
        rank = int(np.sum(sq >= threshold - SV_SELECTION_MARGIN))
    rank = min(rank, max_rank)
    return SegmentationDiagnostics(
        criterion=criterion,
        squared_singular_values=sq,
        principal_angles_deg=angles,
        threshold=threshold,
        threshold_ci=threshold_ci,
        provisional_joint_rank=rank,
    )
