"""Non-iterative segmentation of joint and individual variation across data blocks.

Given K matrices sharing their n columns, the pipeline estimates each
block's low-rank signal, measures how close the blocks' score subspaces are
against a resampled noise-perturbation bound, and splits every block into a
joint part (shared score subspace), an individual part, and a residual. The
whole procedure is three rounds of linear algebra with no iteration.

Typical library use::

    from nijive import MultiBlock, PipelineConfig, run_pipeline

    result = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3)))
    result.decomposition.joint[0]       # first block's joint part
    result.representations.cns          # shared normalized scores
"""

from .blocks import (
    Criterion,
    DataBlock,
    MultiBlock,
    PipelineConfig,
    center_rows,
    load_block,
    load_blocks,
    load_config,
    save_block,
    save_matrix,
)
from .decomposition import (
    DroppedComponent,
    JiveDecomposition,
    Representations,
    compute_representations,
    final_decomposition,
    prune_joint_components,
)
from .extraction import SignalEstimate, initial_svd, reconstruct, suggest_rank_largest_gap
from .pipeline import PipelineResult, run_pipeline
from .segmentation import (
    SegmentationDiagnostics,
    StackedScores,
    multi_block_sv_threshold,
    principal_angles,
    select_joint_rank,
    stack_scores,
    two_block_angle_threshold,
)
from .synthetic import (
    GroundTruth,
    ToySpec,
    cross_product_angle_oracle,
    generate_random_instance,
    generate_toy,
    intersection_oracle,
)
from .wedin import (
    PerturbationBound,
    estimate_wedin_bound,
    resample_column_energy,
    resample_row_energy,
)

__version__ = "0.1.0"

__all__ = [
    "Criterion",
    "DataBlock",
    "DroppedComponent",
    "GroundTruth",
    "JiveDecomposition",
    "MultiBlock",
    "PerturbationBound",
    "PipelineConfig",
    "PipelineResult",
    "Representations",
    "SegmentationDiagnostics",
    "SignalEstimate",
    "StackedScores",
    "ToySpec",
    "center_rows",
    "compute_representations",
    "cross_product_angle_oracle",
    "estimate_wedin_bound",
    "final_decomposition",
    "generate_random_instance",
    "generate_toy",
    "initial_svd",
    "intersection_oracle",
    "load_block",
    "load_blocks",
    "load_config",
    "multi_block_sv_threshold",
    "principal_angles",
    "prune_joint_components",
    "reconstruct",
    "resample_column_energy",
    "resample_row_energy",
    "run_pipeline",
    "save_block",
    "save_matrix",
    "select_joint_rank",
    "stack_scores",
    "suggest_rank_largest_gap",
    "two_block_angle_threshold",
]
