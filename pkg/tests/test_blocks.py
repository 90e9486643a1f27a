import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from nijive import (
    Criterion,
    DataBlock,
    MultiBlock,
    PipelineConfig,
    center_rows,
    load_block,
    load_blocks,
    load_config,
    save_block,
)

from helpers import low_rank_block


def pair(x_values, y_values) -> MultiBlock:
    return MultiBlock(
        blocks=(
            DataBlock(name="x", values=x_values),
            DataBlock(name="y", values=y_values),
        )
    )


class TestDataBlock:
    def test_rejects_non_finite(self):
        values = np.ones((3, 4))
        values[1, 2] = np.nan
        with pytest.raises(ValueError, match="NaN"):
            DataBlock(name="bad", values=values)

    def test_rejects_single_column(self):
        with pytest.raises(ValueError):
            DataBlock(name="thin", values=np.ones((3, 1)))

    def test_rejects_label_length_mismatch(self):
        with pytest.raises(ValueError, match="labels"):
            DataBlock(name="b", values=np.ones((2, 3)), object_labels=("a", "b"))

    def test_values_are_immutable(self):
        block = DataBlock(name="b", values=np.ones((2, 3)))
        with pytest.raises(ValueError):
            block.values[0, 0] = 2.0


class TestMultiBlock:
    def test_requires_two_blocks(self):
        with pytest.raises(ValueError, match="2"):
            MultiBlock(blocks=(DataBlock(name="solo", values=np.ones((2, 3))),))

    def test_rejects_column_count_mismatch(self):
        with pytest.raises(ValueError):
            pair(np.ones((2, 100)), np.ones((3, 99)))

    def test_rejects_disagreeing_object_labels(self):
        a = DataBlock(name="a", values=np.ones((2, 3)), object_labels=("p", "q", "r"))
        b = DataBlock(name="b", values=np.ones((2, 3)), object_labels=("p", "q", "s"))
        with pytest.raises(ValueError, match="label"):
            MultiBlock(blocks=(a, b))

    def test_exposes_k_and_n(self):
        mb = pair(np.ones((2, 5)), np.ones((3, 5)))
        assert mb.K == 2
        assert mb.n == 5


class TestPipelineConfig:
    def test_rank_exceeding_block_size_names_the_block(self):
        mb = pair(np.ones((2, 5)), np.ones((3, 5)))
        cfg = PipelineConfig(initial_ranks=(2, 4))
        with pytest.raises(ValueError, match="y"):
            cfg.validate_against(mb)

    def test_two_block_angle_requires_two_blocks(self):
        rng = np.random.default_rng(0)
        mb = MultiBlock(
            blocks=tuple(low_rank_block(rng, 6, 8, [3.0], name=f"b{k}") for k in range(3))
        )
        cfg = PipelineConfig(initial_ranks=(1, 1, 1), criterion=Criterion.TWO_BLOCK_ANGLE)
        with pytest.raises(ValueError, match="two"):
            cfg.validate_against(mb)

    def test_threshold_quantile_must_be_interior(self):
        with pytest.raises(ValueError):
            PipelineConfig(initial_ranks=(1, 1), threshold_quantile=1.0)

    def test_dict_round_trip(self):
        cfg = PipelineConfig(
            initial_ranks=(2, 3),
            center_rows=True,
            n_resamples=64,
            threshold_quantile=0.75,
            ci_quantiles=(0.1, 0.9),
            criterion=Criterion.TWO_BLOCK_ANGLE,
            rng_seed=7,
        )
        assert PipelineConfig.from_dict(cfg.to_dict()) == cfg

    def test_load_config_reads_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"initial_ranks": [2, 3], "rng_seed": 5}))
        cfg = load_config(path)
        assert cfg.initial_ranks == (2, 3)
        assert cfg.rng_seed == 5


class TestFileRoundTrip:
    def test_plain_matrix_round_trips_exactly(self, tmp_path):
        rng = np.random.default_rng(3)
        block = DataBlock(name="m", values=rng.standard_normal((7, 5)) * 1e6)
        path = tmp_path / "m.csv"
        save_block(block, path)
        back = load_block(path)
        np.testing.assert_array_equal(back.values, block.values)
        assert back.feature_labels is None and back.object_labels is None

    def test_labeled_matrix_round_trips(self, tmp_path):
        values = np.arange(6.0).reshape(2, 3)
        block = DataBlock(
            name="m",
            values=values,
            feature_labels=("f1", "f2"),
            object_labels=("o1", "o2", "o3"),
        )
        path = tmp_path / "m.csv"
        save_block(block, path)
        back = load_block(path)
        np.testing.assert_array_equal(back.values, values)
        assert back.feature_labels == ("f1", "f2")
        assert back.object_labels == ("o1", "o2", "o3")

    def test_tab_delimited_input(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("1.5\t2.5\n3.5\t4.5\n")
        back = load_block(path)
        np.testing.assert_array_equal(back.values, [[1.5, 2.5], [3.5, 4.5]])

    @given(
        hnp.arrays(
            dtype=np.float64,
            shape=st.tuples(st.integers(1, 6), st.integers(2, 6)),
            elements=st.floats(-1e12, 1e12, allow_nan=False, width=64),
        )
    )
    def test_round_trip_property(self, values, tmp_path_factory):
        block = DataBlock(name="p", values=values)
        path = tmp_path_factory.mktemp("rt") / "p.csv"
        save_block(block, path)
        np.testing.assert_array_equal(load_block(path).values, block.values)

    def test_non_numeric_cell_is_an_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ValueError, match="bad.csv"):
            load_block(path)

    def test_empty_file_is_an_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            load_block(path)


class TestLoadBlocks:
    def test_loads_benchmark_shaped_pair(self, tmp_path, toy_run):
        # 100x100 and 10000x100 blocks sharing 100 objects
        for block in toy_run.blocks:
            save_block(block, tmp_path / f"{block.name}.csv")
        cfg = PipelineConfig(initial_ranks=(2, 3))
        mb = load_blocks([tmp_path / "x.csv", tmp_path / "y.csv"], cfg)
        assert mb.K == 2
        assert mb.n == 100
        assert mb.blocks[0].values.shape == (100, 100)
        assert mb.blocks[1].values.shape == (10000, 100)

    def test_single_file_is_an_error(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("1.0,2.0\n")
        with pytest.raises(ValueError, match="2"):
            load_blocks([path], PipelineConfig(initial_ranks=(1,)))

    def test_mismatched_column_counts_are_an_error(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        a.write_text(",".join(["1.0"] * 100) + "\n")
        b.write_text(",".join(["1.0"] * 99) + "\n")
        with pytest.raises(ValueError, match="column"):
            load_blocks([a, b], PipelineConfig(initial_ranks=(1, 1)))

    def test_repeated_stems_get_deduplicated_names(self, tmp_path):
        d1, d2 = tmp_path / "d1", tmp_path / "d2"
        d1.mkdir(), d2.mkdir()
        (d1 / "m.csv").write_text("1.0,2.0\n")
        (d2 / "m.csv").write_text("3.0,4.0\n")
        mb = load_blocks([d1 / "m.csv", d2 / "m.csv"], PipelineConfig(initial_ranks=(1, 1)))
        assert [b.name for b in mb] == ["m", "m_2"]


class TestCenterRows:
    def test_simple_row(self):
        mb = pair(np.array([[1.0, 2.0, 3.0]]), np.array([[5.0, 5.0, 5.0]]))
        centered = center_rows(mb)
        np.testing.assert_allclose(centered.blocks[0].values, [[-1.0, 0.0, 1.0]])
        np.testing.assert_allclose(centered.blocks[1].values, [[0.0, 0.0, 0.0]])

    def test_toy_signal_rows_already_centered(self, toy_run):
        signal = toy_run.truth.signal
        mb = pair(signal[0], signal[1])
        centered = center_rows(mb)
        for before, after in zip(mb, centered):
            scale = np.abs(before.values).max()
            np.testing.assert_allclose(after.values, before.values, atol=1e-12 * scale)

    @given(
        hnp.arrays(
            dtype=np.float64,
            shape=st.tuples(st.integers(1, 5), st.integers(2, 6)),
            elements=st.floats(-1e6, 1e6, allow_nan=False, width=64),
        )
    )
    def test_idempotent(self, values):
        mb = pair(values, values * 2.0)
        once = center_rows(mb)
        twice = center_rows(once)
        for a, b in zip(once, twice):
            np.testing.assert_allclose(b.values, a.values, atol=1e-12 * (1 + np.abs(a.values).max()))
