"""End-to-end orchestration of the three-stage decomposition.

Stages: per-block rank-r SVD, resampled perturbation bounds, stacked-basis
segmentation with the configured criterion, candidate pruning, and the final
per-block split plus score representations. Pure in-memory; file handling
lives in the CLI.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import blocks as blockmod
from .blocks import Criterion, MultiBlock, PipelineConfig
from .decomposition import (
    JiveDecomposition,
    Representations,
    compute_representations,
    final_decomposition,
    prune_joint_components,
)
from .extraction import SignalEstimate, initial_svd
from .segmentation import (
    SegmentationDiagnostics,
    StackedScores,
    multi_block_sv_threshold,
    select_joint_rank,
    stack_scores,
    two_block_angle_threshold,
)
from .wedin import PerturbationBound, estimate_wedin_bound


@dataclass(frozen=True)
class PipelineResult:
    blocks: MultiBlock
    config: PipelineConfig
    estimates: tuple[SignalEstimate, ...]
    bounds: tuple[PerturbationBound, ...]
    stacked: StackedScores
    segmentation: SegmentationDiagnostics
    decomposition: JiveDecomposition
    representations: Representations
    diagnostics: dict


def run_pipeline(blocks: MultiBlock, config: PipelineConfig) -> PipelineResult:
    """Run all stages on in-memory blocks.

    Deterministic given the config seed: block k's resampling replicates use
    the k-th child stream of the master seed.
    """
    config.validate_against(blocks)
    timing: dict[str, float] = {}
    if config.center_rows:
        blocks = blockmod.center_rows(blocks)

    t0 = time.perf_counter()
    estimates = tuple(
        initial_svd(block, rank, block_index=k)
        for k, (block, rank) in enumerate(zip(blocks, config.initial_ranks))
    )
    t1 = time.perf_counter()
    timing["extraction_ms"] = (t1 - t0) * 1e3

    block_seeds = np.random.SeedSequence(config.rng_seed).spawn(blocks.K)
    bounds = tuple(
        estimate_wedin_bound(block, est, config, seed)
        for block, est, seed in zip(blocks, estimates, block_seeds)
    )
    t2 = time.perf_counter()
    timing["resampling_ms"] = (t2 - t1) * 1e3

    stacked = stack_scores(list(estimates))
    if config.criterion is Criterion.TWO_BLOCK_ANGLE:
        threshold, ci = two_block_angle_threshold(list(bounds), config)
    else:
        threshold, ci = multi_block_sv_threshold(list(bounds), config)
    segmentation = select_joint_rank(stacked, config.criterion, threshold, ci)
    t3 = time.perf_counter()
    timing["segmentation_ms"] = (t3 - t2) * 1e3

    candidates = stacked.right_vectors_t[: segmentation.provisional_joint_rank].T
    joint_basis, dropped = prune_joint_components(blocks, list(estimates), candidates)
    decomposition = final_decomposition(blocks, list(estimates), joint_basis, dropped)
    t4 = time.perf_counter()
    timing["decomposition_ms"] = (t4 - t3) * 1e3

    representations = compute_representations(decomposition, blocks)
    t5 = time.perf_counter()
    timing["representations_ms"] = (t5 - t4) * 1e3
    timing["total_ms"] = (t5 - t0) * 1e3

    diagnostics = {
        "config": config.to_dict(),
        "scree": {
            block.name: [float(s) for s in est.full_spectrum]
            for block, est in zip(blocks, estimates)
        },
        "wedin": {
            block.name: bound.summary() for block, bound in zip(blocks, bounds)
        },
        "segmentation": segmentation.to_fragment(),
        "decomposition": decomposition.to_fragment(),
        "timing": timing,
    }
    return PipelineResult(
        blocks=blocks,
        config=config,
        estimates=estimates,
        bounds=bounds,
        stacked=stacked,
        segmentation=segmentation,
        decomposition=decomposition,
        representations=representations,
        diagnostics=diagnostics,
    )
