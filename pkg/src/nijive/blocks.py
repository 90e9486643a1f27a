"""Data containers, ingestion and validation for the multi-block input.

Input matrices are delimited text (comma by default, tab accepted), one row
per feature and one column per data object. An optional first header row
carries object labels and an optional first column carries feature labels;
a row or column is treated as labels only if it contains at least one
non-numeric cell, so purely numeric label rows are read as data.
"""

import csv
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.17g"  # lossless float64 round-trip


class Criterion(Enum):
    """Rule used to segment joint from individual score directions."""

    MULTI_BLOCK_SINGULAR_VALUE = "multi_block_singular_value"
    TWO_BLOCK_ANGLE = "two_block_angle"


@dataclass(frozen=True)
class DataBlock:
    """One data block: a ``d_k x n`` real matrix with optional labels.

    Rows are features, columns are the data objects shared by all blocks.
    """

    name: str
    values: np.ndarray
    feature_labels: tuple[str, ...] | None = None
    object_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"block {self.name!r}: values must be a 2-d matrix")
        d, n = values.shape
        if d < 1 or n < 2:
            raise ValueError(
                f"block {self.name!r}: need at least 1 feature and 2 objects, got {d}x{n}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError(f"block {self.name!r}: values contain NaN or Inf")
        values = values.copy(order="C")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.feature_labels is not None:
            object.__setattr__(self, "feature_labels", tuple(self.feature_labels))
            if len(self.feature_labels) != d:
                raise ValueError(
                    f"block {self.name!r}: {len(self.feature_labels)} feature labels for {d} rows"
                )
        if self.object_labels is not None:
            object.__setattr__(self, "object_labels", tuple(self.object_labels))
            if len(self.object_labels) != n:
                raise ValueError(
                    f"block {self.name!r}: {len(self.object_labels)} object labels for {n} columns"
                )

    @property
    def n_features(self) -> int:
        return self.values.shape[0]

    @property
    def n_objects(self) -> int:
        return self.values.shape[1]

    def positional_object_labels(self) -> tuple[str, ...]:
        """Object labels, synthesizing ``obj_0001``-style names when absent."""
        if self.object_labels is not None:
            return self.object_labels
        return tuple(f"obj_{i + 1:04d}" for i in range(self.n_objects))


@dataclass(frozen=True)
class MultiBlock:
    """An ordered collection of K >= 2 blocks sharing their n columns."""

    blocks: tuple[DataBlock, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if len(blocks) < 2:
            raise ValueError(f"need at least 2 blocks, got {len(blocks)}")
        n = blocks[0].n_objects
        for b in blocks[1:]:
            if b.n_objects != n:
                raise ValueError(
                    f"object-count mismatch: block {blocks[0].name!r} has {n} columns, "
                    f"block {b.name!r} has {b.n_objects}"
                )
        labeled = [b for b in blocks if b.object_labels is not None]
        for b in labeled[1:]:
            if b.object_labels != labeled[0].object_labels:
                raise ValueError(
                    f"object labels of block {b.name!r} disagree with block {labeled[0].name!r}"
                )

    @property
    def n(self) -> int:
        return self.blocks[0].n_objects

    @property
    def K(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


@dataclass(frozen=True)
class PipelineConfig:
    """User-facing knobs for one pipeline run.

    ``initial_ranks`` must be chosen by the user (e.g. from scree plots
    printed by the CLI); there is no reliable automatic selector.
    """

    initial_ranks: tuple[int, ...]
    center_rows: bool = False
    n_resamples: int = 1000
    threshold_quantile: float = 0.5
    ci_quantiles: tuple[float, float] = (0.05, 0.95)
    criterion: Criterion = Criterion.MULTI_BLOCK_SINGULAR_VALUE
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "initial_ranks", tuple(int(r) for r in self.initial_ranks))
        if isinstance(self.criterion, str):
            object.__setattr__(self, "criterion", Criterion(self.criterion))
        object.__setattr__(
            self, "ci_quantiles", (float(self.ci_quantiles[0]), float(self.ci_quantiles[1]))
        )
        if any(r < 1 for r in self.initial_ranks):
            raise ValueError("initial_ranks must be positive integers")
        if self.n_resamples < 1:
            raise ValueError("n_resamples must be >= 1")
        if not 0.0 < self.threshold_quantile < 1.0:
            raise ValueError("threshold_quantile must lie in (0, 1)")
        if not all(0.0 < q < 1.0 for q in self.ci_quantiles):
            raise ValueError("ci_quantiles must lie in (0, 1)")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a non-negative integer")

    def validate_against(self, blocks: MultiBlock):
        """Check rank and criterion constraints against actual block shapes."""
        if len(self.initial_ranks) != blocks.K:
            raise ValueError(
                f"config field initial_ranks has {len(self.initial_ranks)} entries "
                f"for {blocks.K} blocks"
            )
        for k, (block, r) in enumerate(zip(blocks, self.initial_ranks)):
            limit = min(block.n_features, block.n_objects)
            if r > limit:
                raise ValueError(
                    f"block {block.name!r} (index {k}): initial rank {r} exceeds "
                    f"min(d, n) = {limit}"
                )
        if self.criterion is Criterion.TWO_BLOCK_ANGLE and blocks.K != 2:
            raise ValueError(
                f"criterion two_block_angle requires exactly 2 blocks, got {blocks.K}"
            )

    def to_dict(self) -> dict:
        return {
            "initial_ranks": list(self.initial_ranks),
            "center_rows": self.center_rows,
            "n_resamples": self.n_resamples,
            "threshold_quantile": self.threshold_quantile,
            "ci_quantiles": list(self.ci_quantiles),
            "criterion": self.criterion.value,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {
            "initial_ranks",
            "center_rows",
            "n_resamples",
            "threshold_quantile",
            "ci_quantiles",
            "criterion",
            "rng_seed",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        if "initial_ranks" not in data:
            raise ValueError("config field initial_ranks is required")
        kwargs = dict(data)
        kwargs["initial_ranks"] = tuple(kwargs["initial_ranks"])
        if "ci_quantiles" in kwargs:
            kwargs["ci_quantiles"] = tuple(kwargs["ci_quantiles"])
        return cls(**kwargs)


def load_config(path) -> PipelineConfig:
    """Read a :class:`PipelineConfig` from a JSON document."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON config: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return PipelineConfig.from_dict(data)


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _parse_cell(cell: str, path, i: int, j: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ValueError(f"{path}: non-numeric cell {cell!r} at row {i + 1}, column {j + 1}")
    if not math.isfinite(value):
        raise ValueError(f"{path}: non-finite value {cell!r} at row {i + 1}, column {j + 1}")
    return value


def load_block(path, name: str | None = None) -> DataBlock:
    """Read one delimited-text matrix file into a :class:`DataBlock`."""
    path = Path(path)
    if name is None:
        name = path.stem
    with open(path, "r", encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if first == "":
            raise ValueError(f"{path}: empty file")
        delimiter = "\t" if "\t" in first else ","
        fh.seek(0)
        rows = [row for row in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in row)]
    rows = [[c.strip() for c in row] for row in rows]
    if not rows:
        raise ValueError(f"{path}: empty file")

    has_header = len(rows) > 1 and any(not _is_float(c) for c in rows[0][1:])
    data_rows = rows[1:] if has_header else rows
    if not data_rows:
        raise ValueError(f"{path}: no data rows")
    has_feature_labels = all(not _is_float(r[0]) for r in data_rows)
    if not has_header and not has_feature_labels and not _is_float(rows[0][0]):
        # lone non-numeric corner: a header row over a single unlabeled column set
        has_header = len(rows) > 1
        data_rows = rows[1:] if has_header else rows
        if not data_rows:
            raise ValueError(f"{path}: no data rows")
        has_feature_labels = all(not _is_float(r[0]) for r in data_rows)

    width = len(data_rows[0])
    for i, row in enumerate(data_rows):
        if len(row) != width:
            raise ValueError(
                f"{path}: row {i + (2 if has_header else 1)} has {len(row)} cells, expected {width}"
            )
    n = width - 1 if has_feature_labels else width

    object_labels = None
    if has_header:
        header = rows[0]
        if len(header) == n + 1:
            object_labels = tuple(header[1:])
        elif len(header) == n:
            object_labels = tuple(header)
        else:
            raise ValueError(f"{path}: header has {len(header)} cells for {n} data columns")

    feature_labels = tuple(r[0] for r in data_rows) if has_feature_labels else None
    start = 1 if has_feature_labels else 0
    offset = 1 if has_header else 0
    values = np.empty((len(data_rows), n), dtype=np.float64)
    for i, row in enumerate(data_rows):
        for j, cell in enumerate(row[start:]):
            values[i, j] = _parse_cell(cell, path, i + offset, j + start)
    return DataBlock(
        name=name, values=values, feature_labels=feature_labels, object_labels=object_labels
    )


def save_block(block: DataBlock, path, delimiter: str = ","):
    """Write a block back to delimited text; inverse of :func:`load_block`.

    Labels are written only when present, so an unlabeled block round-trips
    to a plain numeric file.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if block.object_labels is not None:
            header = list(block.object_labels)
            if block.feature_labels is not None:
                header = ["feature"] + header
            fh.write(delimiter.join(header) + "\n")
        for i in range(block.n_features):
            cells = [FLOAT_FORMAT % v for v in block.values[i]]
            if block.feature_labels is not None:
                cells = [block.feature_labels[i]] + cells
            fh.write(delimiter.join(cells) + "\n")


def save_matrix(values: np.ndarray, path, delimiter: str = ","):
    """Write a bare numeric matrix (no labels) with lossless float formatting."""
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in values:
            fh.write(delimiter.join(FLOAT_FORMAT % v for v in row) + "\n")


def load_blocks(paths, config: PipelineConfig) -> MultiBlock:
    """Load and validate all block files for one run.

    Block names are file stems, deduplicated in order when stems repeat.
    """
    paths = [Path(p) for p in paths]
    if len(paths) < 2:
        raise ValueError(f"need at least 2 block files, got {len(paths)}")
    if len(config.initial_ranks) != len(paths):
        raise ValueError(
            f"config field initial_ranks has {len(config.initial_ranks)} entries "
            f"for {len(paths)} block files"
        )
    names: list[str] = []
    for p in paths:
        base = p.stem
        name = base
        suffix = 2
        while name in names:
            name = f"{base}_{suffix}"
            suffix += 1
        names.append(name)
    blocks = MultiBlock(tuple(load_block(p, name=nm) for p, nm in zip(paths, names)))
    config.validate_against(blocks)
    return blocks


def center_rows(blocks: MultiBlock) -> MultiBlock:
    """Subtract each feature row's mean, per block. Pure; labels preserved."""
    centered = tuple(
        replace(b, values=b.values - b.values.mean(axis=1, keepdims=True)) for b in blocks
    )
    return MultiBlock(centered)
