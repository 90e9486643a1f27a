"""Per-block truncated SVD: initial signal estimates and rank thresholds.

The first pipeline stage keeps, for each block, the leading ``r_k`` singular
triplets of ``X_k`` as the signal estimate. The smallest retained singular
value becomes the block's threshold ``tau_k``, reused later both to prune
joint candidates and to cut individual components. The trailing singular
vectors are kept alongside as the orthonormal complement bases needed for
noise resampling, so no second factorization is required.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .blocks import DataBlock
from .linalg import fix_signs, full_svd

# relative spectral gap below which the rank cut is flagged as ill-determined
_TIE_RTOL = 1e-8


@dataclass(frozen=True)
class SignalEstimate:
    """Rank-``r`` SVD factors of one block plus its singular-value threshold.

    ``left_basis`` (d x r) and ``score_basis`` (n x r) have orthonormal
    columns; ``threshold`` equals ``singular_values[-1]``. The complement
    bases hold the remaining ``min(d, n) - r`` singular vectors of the same
    factorization.
    """

    block_index: int
    rank: int
    left_basis: np.ndarray
    singular_values: np.ndarray
    score_basis: np.ndarray
    threshold: float
    full_spectrum: np.ndarray
    left_complement: np.ndarray
    score_complement: np.ndarray

    @property
    def sigma_min(self) -> float:
        """Smallest retained singular value (the Wedin-bound denominator)."""
        return self.threshold


def initial_svd(block: DataBlock, rank: int, *, block_index: int = 0) -> SignalEstimate:
    """Best rank-``rank`` approximation factors of one block.

    Parameters
    ----------
    block : DataBlock
    rank : int
        Number of components to retain; ``1 <= rank <= min(d, n)``.
    block_index : int
        Position of the block within the multi-block input.

    Returns
    -------
    SignalEstimate

    Raises
    ------
    ValueError
        If ``rank`` is out of range or exceeds the numerical rank.
    """
    d, n = block.values.shape
    limit = min(d, n)
    if not 1 <= rank <= limit:
        raise ValueError(
            f"block {block.name!r}: rank {rank} out of range [1, {limit}]"
        )
    u, s, vt = full_svd(block.values)
    if s[rank - 1] <= 0.0:
        raise ValueError(
            f"block {block.name!r}: rank {rank} exceeds numerical rank "
            f"(singular value {rank} is zero)"
        )
    if rank < limit and s[rank - 1] - s[rank] < _TIE_RTOL * s[0]:
        warnings.warn(
            f"block {block.name!r}: singular values {rank} and {rank + 1} are nearly "
            f"tied ({s[rank - 1]:.6g} vs {s[rank]:.6g}); the retained subspace is "
            f"ill-determined at this rank cut",
            stacklevel=2,
        )
    u_r, vt_r = fix_signs(u[:, :rank], vt[:rank])
    return SignalEstimate(
        block_index=block_index,
        rank=rank,
        left_basis=u_r,
        singular_values=s[:rank].copy(),
        score_basis=vt_r.T,
        threshold=float(s[rank - 1]),
        full_spectrum=s.copy(),
        left_complement=u[:, rank:].copy(),
        score_complement=vt[rank:].T.copy(),
    )


def reconstruct(estimate: SignalEstimate) -> np.ndarray:
    """The low-rank signal matrix ``U diag(s) V^T`` of an estimate."""
    return (estimate.left_basis * estimate.singular_values) @ estimate.score_basis.T


def suggest_rank_largest_gap(spectrum: np.ndarray) -> int:
    """Heuristic rank suggestion: position of the largest relative spectral gap.

    This is a convenience only. Rank selection is a judgment call made from
    the scree spectrum; treat the suggestion as a starting point, not a rule.
    """
    s = np.asarray(spectrum, dtype=float)
    if s.size < 2 or s[0] <= 0.0:
        return max(1, s.size)
    floor = 1e-12 * s[0]
    ratios = s[:-1] / np.maximum(s[1:], floor)
    return int(np.argmax(ratios)) + 1
