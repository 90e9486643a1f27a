import dataclasses

import numpy as np
import pytest

import nijive.decomposition
import nijive.extraction
import nijive.segmentation
from nijive import (
    Criterion,
    DataBlock,
    MultiBlock,
    PipelineConfig,
    generate_random_instance,
    run_pipeline,
)
from nijive.linalg import full_svd


DIAG_KEYS = {"config", "scree", "wedin", "segmentation", "decomposition", "timing"}


def small_instance(seed=0, noise=0.1):
    # joint well above the individual strengths: under noise the pruning
    # comparison then has a wide margin instead of sitting at the threshold
    return generate_random_instance(
        [12, 15], 18, joint_rank=1, individual_ranks=[1, 2],
        noise_scale=noise, seed=seed,
        joint_strengths=np.array([8.0]),
        individual_strengths=[np.array([4.0]), np.array([4.0, 3.0])],
    )


class TestDiagnostics:
    def test_top_level_keys(self):
        blocks, _ = small_instance()
        res = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=50))
        assert set(res.diagnostics) == DIAG_KEYS

    def test_scree_and_wedin_keyed_by_block_name(self):
        blocks, _ = small_instance()
        res = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=50))
        assert set(res.diagnostics["scree"]) == {"block_0", "block_1"}
        assert len(res.diagnostics["scree"]["block_0"]) == 12
        assert set(res.diagnostics["wedin"]) == {"block_0", "block_1"}
        for fragment in res.diagnostics["wedin"].values():
            assert fragment["n_resamples"] == 50

    def test_timing_fields(self):
        blocks, _ = small_instance()
        res = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=50))
        timing = res.diagnostics["timing"]
        stages = {
            "extraction_ms", "resampling_ms", "segmentation_ms",
            "decomposition_ms", "representations_ms", "total_ms",
        }
        assert set(timing) == stages
        assert all(v >= 0 for v in timing.values())
        parts = sum(v for k, v in timing.items() if k != "total_ms")
        assert timing["total_ms"] == pytest.approx(parts, rel=0.05)

    def test_diagnostics_json_serializable(self):
        import json

        blocks, _ = small_instance()
        res = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=50))
        out = json.dumps(res.diagnostics)
        assert json.loads(out)["decomposition"]["joint_rank"] == res.decomposition.joint_rank


class TestDeterminism:
    def test_identical_runs_match_exactly(self):
        blocks, _ = small_instance(noise=0.2)
        cfg = PipelineConfig(initial_ranks=(2, 3), n_resamples=80, rng_seed=11)
        a = run_pipeline(blocks, cfg)
        b = run_pipeline(blocks, cfg)
        np.testing.assert_array_equal(a.decomposition.joint_basis, b.decomposition.joint_basis)
        for k in range(2):
            np.testing.assert_array_equal(a.decomposition.joint[k], b.decomposition.joint[k])
            np.testing.assert_array_equal(a.bounds[k].samples, b.bounds[k].samples)
        diag_a = {k: v for k, v in a.diagnostics.items() if k != "timing"}
        diag_b = {k: v for k, v in b.diagnostics.items() if k != "timing"}
        assert diag_a == diag_b

    def test_seed_changes_bounds_not_signal(self):
        blocks, _ = small_instance(noise=0.2)
        a = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=80, rng_seed=0))
        b = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=80, rng_seed=1))
        assert not np.array_equal(a.bounds[0].samples, b.bounds[0].samples)
        # step 1 is seed-free
        np.testing.assert_array_equal(
            a.estimates[0].score_basis, b.estimates[0].score_basis
        )


class TestCentering:
    def test_center_flag_centers_blocks_before_fit(self):
        blocks, _ = small_instance(noise=0.1)
        shifted = MultiBlock(
            blocks=tuple(
                DataBlock(name=b.name, values=b.values + 7.0) for b in blocks
            )
        )
        cfg = PipelineConfig(initial_ranks=(2, 3), n_resamples=50, center_rows=True)
        res_plain = run_pipeline(blocks, cfg)
        res_shift = run_pipeline(shifted, cfg)
        # row means are removed, so the constant offset cannot matter
        for k in range(2):
            np.testing.assert_allclose(
                res_shift.decomposition.joint[k], res_plain.decomposition.joint[k], atol=1e-8
            )
            means = res_shift.blocks[k].values.mean(axis=1)
            np.testing.assert_allclose(means, 0.0, atol=1e-10)

    def test_default_leaves_data_untouched(self):
        blocks, _ = small_instance()
        res = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=50))
        np.testing.assert_array_equal(res.blocks[0].values, blocks[0].values)


class TestValidation:
    def test_rank_exceeding_block_names_the_block(self):
        blocks, _ = small_instance()
        with pytest.raises(ValueError, match="block_0"):
            run_pipeline(blocks, PipelineConfig(initial_ranks=(13, 3)))

    def test_rank_count_mismatch(self):
        blocks, _ = small_instance()
        with pytest.raises(ValueError, match="initial_ranks"):
            run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3, 2)))

    def test_angle_criterion_needs_two_blocks(self):
        blocks, _ = generate_random_instance(
            [10, 11, 12], 20, joint_rank=1, individual_ranks=[1, 1, 1], seed=6
        )
        cfg = PipelineConfig(
            initial_ranks=(2, 2, 2), criterion=Criterion.TWO_BLOCK_ANGLE
        )
        with pytest.raises(ValueError, match="exactly 2"):
            run_pipeline(blocks, cfg)


class TestSvdBudget:
    def test_full_svd_call_count_is_linear_in_blocks(self, monkeypatch):
        # the whole pipeline must stay within 4K + 1 factorizations of
        # data-sized matrices; the implementation uses 3K + 1 by reusing
        # the complement factors for the individual representations
        calls = []

        def counting_svd(a):
            calls.append(a.shape)
            return full_svd(a)

        for mod in (nijive.extraction, nijive.segmentation, nijive.decomposition):
            monkeypatch.setattr(mod, "full_svd", counting_svd)

        for k_blocks in (2, 3, 4):
            calls.clear()
            blocks, _ = generate_random_instance(
                [10 + 2 * k for k in range(k_blocks)], 16,
                joint_rank=1, individual_ranks=[1] * k_blocks,
                noise_scale=0.05, seed=k_blocks,
                joint_strengths=np.array([8.0]),
                individual_strengths=[np.array([4.0])] * k_blocks,
            )
            cfg = PipelineConfig(initial_ranks=(2,) * k_blocks, n_resamples=30)
            run_pipeline(blocks, cfg)
            assert len(calls) == 3 * k_blocks + 1
            assert len(calls) <= 4 * k_blocks + 1

    def test_resampling_adds_no_factorizations(self, monkeypatch):
        # replicate count must not change how many SVDs run
        counts = []

        def run_with(n_resamples):
            calls = []

            def counting_svd(a):
                calls.append(True)
                return full_svd(a)

            for mod in (nijive.extraction, nijive.segmentation, nijive.decomposition):
                monkeypatch.setattr(mod, "full_svd", counting_svd)
            blocks, _ = small_instance(noise=0.1)
            run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=n_resamples))
            counts.append(len(calls))

        run_with(10)
        run_with(200)
        assert counts[0] == counts[1] == 7


class TestResultWiring:
    def test_result_carries_all_stages(self):
        blocks, _ = small_instance()
        cfg = PipelineConfig(initial_ranks=(2, 3), n_resamples=50)
        res = run_pipeline(blocks, cfg)
        assert res.config is cfg
        assert len(res.estimates) == 2
        assert len(res.bounds) == 2
        assert res.stacked.matrix.shape == (5, 18)
        assert res.segmentation.provisional_joint_rank >= res.decomposition.joint_rank

    def test_provisional_minus_dropped_equals_final(self):
        blocks, _ = small_instance(noise=0.15)
        res = run_pipeline(blocks, PipelineConfig(initial_ranks=(2, 3), n_resamples=50))
        dec = res.decomposition
        assert res.segmentation.provisional_joint_rank == dec.joint_rank + len(
            dec.dropped_components
        )
