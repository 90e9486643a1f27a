"""Seeded test-data generators and independent geometry oracles.

Two generators: a fixed two-block benchmark with known published-scale
diagnostics, and a parametric K-block instance builder for property tests.
Both return the exact planted signal parts so recovery can be checked
against ground truth rather than against the pipeline's own output.

The oracles at the bottom compute reference answers by definitions that do
not share code with the pipeline: row-space intersection via a stacked SVD
threshold, and principal angles via the SVD of the cross-product of bases.
They call numpy directly on purpose.
"""

from dataclasses import dataclass

import numpy as np

from .blocks import DataBlock, MultiBlock


@dataclass(frozen=True)
class GroundTruth:
    """Planted signal parts; blocks satisfy X_k = joint + individual + noise."""

    joint: tuple[np.ndarray, ...]
    individual: tuple[np.ndarray, ...]
    noise: tuple[np.ndarray, ...]
    joint_scores: np.ndarray
    individual_scores: tuple[np.ndarray, ...]

    @property
    def signal(self) -> tuple[np.ndarray, ...]:
        return tuple(j + i for j, i in zip(self.joint, self.individual))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _orthogonalize(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """Remove components along unit vectors in ``basis``, then normalize."""
    w = v.astype(float).copy()
    for b in basis:
        w -= (w @ b) * b
    norm = np.linalg.norm(w)
    if norm < 1e-8 * max(np.linalg.norm(v), 1.0):
        raise ValueError("vector is numerically inside the span it should leave")
    return w / norm


@dataclass(frozen=True)
class ToySpec:
    """Geometry and amplitudes of the fixed two-block benchmark.

    The first block is square and loud, the second tall and quiet, with the
    second block's signal about three orders of magnitude weaker; the two
    individual score subspaces meet at ``individual_angle_deg`` exactly.
    Strength tuples are ordered (joint, individual...) per block.
    """

    n: int = 100
    d_x: int = 100
    d_y: int = 10_000
    individual_angle_deg: float = 48.0
    x_strengths: tuple[float, float] = (3.6e5, 3.2e5)
    y_strengths: tuple[float, float, float] = (380.0, 335.0, 318.0)
    x_noise_scale: float = 5000.0
    y_noise_scale: float = 1.0


def _toy_scores(spec: ToySpec) -> tuple[np.ndarray, ...]:
    """Deterministic score vectors: j, p (x-individual), q1, q2 (y-individual).

    All have zero mean and unit norm; p is orthogonal to j; q1 sits at
    exactly the configured angle to p inside span(p, w); q2 is orthogonal to
    everything else.
    """
    n = spec.n
    half = n // 2
    quarter = n // 4
    j = np.ones(n)
    j[half:] = -1.0
    j = _unit(j)

    p = -np.ones(n)
    p[:quarter] = 1.0
    p[half : half + quarter] = 1.0
    p = _unit(p)

    third = n // 3
    t = np.zeros(n)
    t[:third] = 1.0
    t[n - third :] = -1.0
    w = _orthogonalize(t, [j, p])

    alpha = np.radians(spec.individual_angle_deg)
    q1 = np.cos(alpha) * p + np.sin(alpha) * w

    e = np.ones(n)
    e[1::2] = -1.0
    q2 = _orthogonalize(e, [j, p, w])
    return j, p, q1, q2


def _indicator_loading(d: int, rows: slice, sign_split: int | None = None) -> np.ndarray:
    u = np.zeros(d)
    u[rows] = 1.0
    if sign_split is not None:
        u[sign_split : rows.stop] = -1.0
    return _unit(u)


def generate_toy(seed: int, spec: ToySpec = ToySpec()) -> tuple[MultiBlock, GroundTruth]:
    """The fixed benchmark: one shared component, 1 + 2 individual ones.

    Deterministic given ``seed``; the seed only drives the noise draws, the
    signal is the same every time. Block x is 100 x 100 with noise four
    orders of magnitude louder than block y's, which is 10000 x 100.
    """
    j, p, q1, q2 = _toy_scores(spec)
    n, d_x, d_y = spec.n, spec.d_x, spec.d_y

    ux_joint = _indicator_loading(d_x, slice(0, d_x // 2))
    ux_ind = _indicator_loading(d_x, slice(d_x // 2, d_x))
    sx_j, sx_i = spec.x_strengths
    joint_x = sx_j * np.outer(ux_joint, j)
    ind_x = sx_i * np.outer(ux_ind, p)

    half_y = d_y // 2
    uy_ind1 = _indicator_loading(d_y, slice(0, half_y))
    uy_ind2 = _indicator_loading(d_y, slice(half_y, d_y))
    uy_joint = _indicator_loading(d_y, slice(d_y - d_y // 5, d_y), sign_split=d_y - d_y // 10)
    sy_j, sy_i1, sy_i2 = spec.y_strengths
    joint_y = sy_j * np.outer(uy_joint, j)
    ind_y = sy_i1 * np.outer(uy_ind1, q1) + sy_i2 * np.outer(uy_ind2, q2)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    noise_x = spec.x_noise_scale * rng.standard_normal((d_x, n))
    noise_y = spec.y_noise_scale * rng.standard_normal((d_y, n))

    blocks = MultiBlock(
        blocks=(
            DataBlock(name="x", values=joint_x + ind_x + noise_x),
            DataBlock(name="y", values=joint_y + ind_y + noise_y),
        )
    )
    truth = GroundTruth(
        joint=(joint_x, joint_y),
        individual=(ind_x, ind_y),
        noise=(noise_x, noise_y),
        joint_scores=j[:, None],
        individual_scores=(p[:, None], np.column_stack([q1, q2])),
    )
    return blocks, truth


def generate_random_instance(
    d_list: list[int],
    n: int,
    joint_rank: int,
    individual_ranks: list[int],
    *,
    individual_angle_deg: float = 60.0,
    noise_scale: float = 0.0,
    seed: int = 0,
    joint_strengths: np.ndarray | None = None,
    individual_strengths: list[np.ndarray] | None = None,
) -> tuple[MultiBlock, GroundTruth]:
    """Random K-block instance with planted joint and individual structure.

    The K individual score subspaces are built from one base subspace: block
    1 uses the base itself, every later block tilts the base by
    ``individual_angle_deg`` toward fresh directions, so the smallest angle
    between any two individual subspaces equals the requested one (later
    blocks sit at least that far apart from each other too). The angle must
    be positive, otherwise the individual spaces would intersect and the
    planted decomposition would not be the identifiable one.

    Default strengths put every individual component strictly above every
    joint component, so each block's rank threshold lands on a joint
    direction. With ``noise_scale = 0`` the instance is exactly recoverable.

    Raises
    ------
    ValueError
        If the requested subspaces cannot fit in n dimensions, a block is
        too small for its total rank, or the angle is out of (0, 90].
    """
    k_blocks = len(d_list)
    if k_blocks < 2:
        raise ValueError("need at least 2 blocks")
    if len(individual_ranks) != k_blocks:
        raise ValueError("one individual rank per block required")
    if joint_rank < 0 or any(r < 0 for r in individual_ranks):
        raise ValueError("ranks must be non-negative")
    if not 0.0 < individual_angle_deg <= 90.0:
        raise ValueError(
            f"individual angle must be in (0, 90] degrees, got {individual_angle_deg}"
        )
    r_max = max(individual_ranks, default=0)
    total_dims = joint_rank + r_max + sum(individual_ranks[1:])
    if total_dims > n:
        raise ValueError(
            f"cannot fit joint rank {joint_rank} plus individual subspaces "
            f"in {n} dimensions ({total_dims} needed)"
        )
    for k, (d, r_i) in enumerate(zip(d_list, individual_ranks)):
        if joint_rank + r_i > min(d, n):
            raise ValueError(
                f"block {k}: total rank {joint_rank + r_i} exceeds min(d, n) = {min(d, n)}"
            )

    if joint_strengths is None:
        joint_strengths = np.linspace(1.5, 1.0, joint_rank)
    joint_strengths = np.asarray(joint_strengths, dtype=float)
    if individual_strengths is None:
        individual_strengths = [np.linspace(3.0, 2.0, r) for r in individual_ranks]
    individual_strengths = [np.asarray(s, dtype=float) for s in individual_strengths]

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    q, _ = np.linalg.qr(rng.standard_normal((n, total_dims)))
    v_joint = q[:, :joint_rank]
    base = q[:, joint_rank : joint_rank + r_max]
    fresh_start = joint_rank + r_max

    alpha = np.radians(individual_angle_deg)
    ind_scores = []
    for k, r_i in enumerate(individual_ranks):
        if k == 0:
            ind_scores.append(base[:, :r_i].copy())
        else:
            fresh = q[:, fresh_start : fresh_start + r_i]
            fresh_start += r_i
            ind_scores.append(np.cos(alpha) * base[:, :r_i] + np.sin(alpha) * fresh)

    joint = []
    individual = []
    noise = []
    blocks = []
    for k, d in enumerate(d_list):
        r_i = individual_ranks[k]
        load, _ = np.linalg.qr(rng.standard_normal((d, joint_rank + r_i)))
        j_k = (load[:, :joint_rank] * joint_strengths) @ v_joint.T
        i_k = (load[:, joint_rank:] * individual_strengths[k]) @ ind_scores[k].T
        e_k = noise_scale * rng.standard_normal((d, n))
        joint.append(j_k)
        individual.append(i_k)
        noise.append(e_k)
        blocks.append(DataBlock(name=f"block_{k}", values=j_k + i_k + e_k))
    return (
        MultiBlock(blocks=tuple(blocks)),
        GroundTruth(
            joint=tuple(joint),
            individual=tuple(individual),
            noise=tuple(noise),
            joint_scores=v_joint,
            individual_scores=tuple(ind_scores),
        ),
    )


def intersection_oracle(bases: list[np.ndarray]) -> np.ndarray:
    """Orthonormal basis of the intersection of the bases' column spans.

    Stacks the transposed bases and keeps right singular vectors whose
    squared singular value reaches the number of bases (up to 1e-9): a
    direction lying in every span contributes unit energy per basis. Exact
    for exactly-orthonormal inputs; that is its job as an oracle.
    """
    k = len(bases)
    if k == 0:
        raise ValueError("need at least one basis")
    n = bases[0].shape[0]
    stacked = np.vstack([b.T for b in bases])
    if stacked.shape[0] == 0:
        return np.zeros((n, 0))
    _, s, vt = np.linalg.svd(stacked, full_matrices=False)
    keep = s**2 >= k - 1e-9
    return vt[keep].T.copy()


def cross_product_angle_oracle(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Principal angles (radians, ascending) between two column spans.

    Classical definition: arccos of the singular values of ``V1^T V2`` for
    column-orthonormal inputs. Kept free of any shared plumbing with the
    stacked-matrix angle computation it cross-checks.
    """
    cross = v1.T @ v2
    if 0 in cross.shape:
        return np.zeros(0)
    s = np.linalg.svd(cross, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))
