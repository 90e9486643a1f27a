"""Final segmentation: prune joint candidates, project, split each block.

Candidate joint directions coming out of the stacked SVD are validated
against every block: a direction the pipeline calls joint must carry at
least threshold-level energy ``|X_k v| >= tau_k`` in all blocks, otherwise
it is dropped and logged. The survivors span the joint score space; each
block is then split as

    X_k = X_k P_J  +  rank-cut SVD of X_k (I - P_J)  +  remainder

giving the joint, individual, and residual parts. The residual is defined by
subtraction so the three parts always sum back to the data exactly.

Score representations for downstream analysis: CNS (the shared orthonormal
joint scores), per-block BSS (scores scaled by the block's own singular
values), INS (normalized individual scores), and per-feature CNS loadings
(standardized regression coefficients of each block on each common score).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .blocks import MultiBlock
from .extraction import SignalEstimate
from .linalg import fix_signs, full_svd

# pruning keeps |X v| >= tau while an exactly-threshold direction computes
# either side of tau at machine precision; the relative margin decides it
PRUNE_MARGIN = 1e-9
# the individual cut is strict (sigma > tau), so a component exactly at tau
# must land on the excluded side regardless of round-off
INDIVIDUAL_CUT_MARGIN = 1e-9


@dataclass(frozen=True)
class DroppedComponent:
    """A joint candidate removed in validation; indices are 0-based."""

    component: int
    failing_blocks: tuple[int, ...]


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD triplet of one low-rank part."""

    left: np.ndarray
    singular_values: np.ndarray
    scores_t: np.ndarray


@dataclass(frozen=True)
class JiveDecomposition:
    joint_basis: np.ndarray
    joint: tuple[np.ndarray, ...]
    individual: tuple[np.ndarray, ...]
    residual: tuple[np.ndarray, ...]
    joint_rank: int
    individual_ranks: tuple[int, ...]
    individual_factors: tuple[SvdFactors, ...]
    dropped_components: tuple[DroppedComponent, ...]
    thresholds: tuple[float, ...]

    def to_fragment(self) -> dict:
        return {
            "joint_rank": self.joint_rank,
            "individual_ranks": list(self.individual_ranks),
            "dropped_components": [
                {"component": d.component, "failing_blocks": list(d.failing_blocks)}
                for d in self.dropped_components
            ],
            "thresholds": [float(t) for t in self.thresholds],
        }


@dataclass(frozen=True)
class Representations:
    """Post-decomposition score matrices, one entry per block where listed."""

    cns: np.ndarray
    joint_factors: tuple[SvdFactors, ...]
    bss_joint: tuple[np.ndarray, ...]
    cns_loadings: tuple[np.ndarray, ...]
    individual_factors: tuple[SvdFactors, ...]
    bss_individual: tuple[np.ndarray, ...]
    ins: tuple[np.ndarray, ...]


def prune_joint_components(
    blocks: MultiBlock,
    estimates: list[SignalEstimate],
    candidate_basis: np.ndarray,
) -> tuple[np.ndarray, tuple[DroppedComponent, ...]]:
    """Remove candidate directions below any block's threshold.

    Parameters
    ----------
    candidate_basis : (n, r) array
        Orthonormal columns, the leading right singular vectors of the
        stacked score matrix.

    Returns
    -------
    (surviving basis, dropped components)
        An empty survivor set is valid; callers decide how to react.
    """
    kept: list[int] = []
    dropped: list[DroppedComponent] = []
    for j in range(candidate_basis.shape[1]):
        v = candidate_basis[:, j]
        failing = tuple(
            k
            for k, (block, est) in enumerate(zip(blocks, estimates))
            if np.linalg.norm(block.values @ v) < est.threshold * (1.0 - PRUNE_MARGIN)
        )
        if failing:
            dropped.append(DroppedComponent(component=j, failing_blocks=failing))
        else:
            kept.append(j)
    return candidate_basis[:, kept].copy(), tuple(dropped)


def final_decomposition(
    blocks: MultiBlock,
    estimates: list[SignalEstimate],
    joint_basis: np.ndarray,
    dropped: tuple[DroppedComponent, ...] = (),
) -> JiveDecomposition:
    """Split every block into joint, individual, and residual parts.

    The joint part is the projection onto the (possibly empty) joint score
    space. The individual part keeps the SVD components of the projected-out
    remainder whose singular values exceed the block's threshold strictly.
    Whatever is left over is the residual, formed by subtraction so the three
    parts reconstruct the data to the last bit.
    """
    r_j = joint_basis.shape[1]
    if r_j == 0:
        warnings.warn(
            "no joint components survived validation; the joint parts are zero",
            stacklevel=2,
        )
    joint = []
    individual = []
    residual = []
    ranks = []
    factors = []
    for block, est in zip(blocks, estimates):
        x = block.values
        if r_j:
            j_k = (x @ joint_basis) @ joint_basis.T
        else:
            j_k = np.zeros_like(x)
        x_perp = x - j_k
        u, s, vt = full_svd(x_perp)
        cut = est.threshold * (1.0 + INDIVIDUAL_CUT_MARGIN)
        r_i = int(np.sum(s > cut))
        u_i, vt_i = fix_signs(u[:, :r_i], vt[:r_i])
        s_i = s[:r_i].copy()
        i_k = (u_i * s_i) @ vt_i
        joint.append(j_k)
        individual.append(i_k)
        residual.append(x - j_k - i_k)
        ranks.append(r_i)
        factors.append(SvdFactors(left=u_i, singular_values=s_i, scores_t=vt_i))
    return JiveDecomposition(
        joint_basis=joint_basis.copy(),
        joint=tuple(joint),
        individual=tuple(individual),
        residual=tuple(residual),
        joint_rank=r_j,
        individual_ranks=tuple(ranks),
        individual_factors=tuple(factors),
        dropped_components=dropped,
        thresholds=tuple(float(e.threshold) for e in estimates),
    )


def _empty_factors(d: int, n: int) -> SvdFactors:
    return SvdFactors(
        left=np.zeros((d, 0)),
        singular_values=np.zeros(0),
        scores_t=np.zeros((0, n)),
    )


def compute_representations(dec: JiveDecomposition, blocks: MultiBlock) -> Representations:
    """Score matrices and loadings derived from a finished decomposition.

    The joint part of each block is factorized at rank ``joint_rank``; the
    individual factors are reused from the decomposition (the individual part
    was built from them, so they are its exact SVD). CNS loading columns are
    the per-feature regression coefficients ``J_k v_j`` scaled to unit norm;
    pruning guarantees these are nonzero for every surviving component.
    """
    r_j = dec.joint_rank
    cns = dec.joint_basis.T.copy()
    joint_factors = []
    bss_joint = []
    cns_loadings = []
    bss_individual = []
    ins = []
    for k, block in enumerate(blocks):
        d, n = block.values.shape
        if r_j:
            u, s, vt = full_svd(dec.joint[k])
            u_j, vt_j = fix_signs(u[:, :r_j], vt[:r_j])
            jf = SvdFactors(left=u_j, singular_values=s[:r_j].copy(), scores_t=vt_j)
            coef = dec.joint[k] @ dec.joint_basis
            norms = np.linalg.norm(coef, axis=0)
            loadings = coef / np.where(norms > 0.0, norms, 1.0)
        else:
            jf = _empty_factors(d, n)
            loadings = np.zeros((d, 0))
        joint_factors.append(jf)
        bss_joint.append(jf.singular_values[:, None] * jf.scores_t)
        cns_loadings.append(loadings)
        fi = dec.individual_factors[k]
        bss_individual.append(fi.singular_values[:, None] * fi.scores_t)
        ins.append(fi.scores_t.copy())
    return Representations(
        cns=cns,
        joint_factors=tuple(joint_factors),
        bss_joint=tuple(bss_joint),
        cns_loadings=tuple(cns_loadings),
        individual_factors=tuple(dec.individual_factors),
        bss_individual=tuple(bss_individual),
        ins=tuple(ins),
    )
