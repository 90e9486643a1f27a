"""Command-line front end.

Three subcommands: ``scree`` prints a block's singular-value spectrum to
support choosing initial ranks, ``run`` executes the full decomposition on
two or more block files, and ``toygen`` writes the built-in synthetic
benchmark for end-to-end runs. Exit codes from ``run``: 0 on success, 2 when
every joint candidate was dropped (outputs are still written), 1 on
validation or IO failure.
"""

import argparse
import json
import sys
from pathlib import Path

from .blocks import (
    Criterion,
    DataBlock,
    PipelineConfig,
    load_block,
    load_blocks,
    save_block,
    save_matrix,
)
from .linalg import singular_values
from .pipeline import PipelineResult, run_pipeline
from .synthetic import generate_toy


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nijive",
        description="Segment multi-block data into joint, individual, and residual parts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="decompose block files into joint/individual/residual")
    p.add_argument("blocks", nargs="+", metavar="BLOCK", help="block files, in block order")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", required=True, help="output directory, created if missing")
    p.add_argument("--ranks", help="comma-separated initial ranks, one per block")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--criterion", choices=[c.value for c in Criterion])
    p.add_argument("--quantile", type=float, help="threshold quantile of the resampled bound")
    p.add_argument("--resamples", type=int, help="number of resampling replicates")
    p.add_argument("--center", action="store_true", help="subtract feature-row means first")
    p.add_argument(
        "--ci-quantiles", nargs=2, type=float, metavar=("LO", "HI"),
        help="quantiles bounding the threshold confidence interval",
    )
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("scree", help="print a block's singular values and gap ratios")
    p.add_argument("block", help="block file")
    p.set_defaults(func=_cmd_scree)

    p = sub.add_parser("toygen", help="write the synthetic benchmark blocks and ground truth")
    p.add_argument("--out", required=True, help="output directory, created if missing")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    p.set_defaults(func=_cmd_toygen)
    return parser


def _resolve_config(args) -> PipelineConfig:
    data: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{args.config}: invalid JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
    if args.ranks is not None:
        try:
            data["initial_ranks"] = [int(tok) for tok in args.ranks.split(",")]
        except ValueError:
            raise ValueError(f"--ranks must be comma-separated integers, got {args.ranks!r}")
    if args.seed is not None:
        data["rng_seed"] = args.seed
    if args.criterion is not None:
        data["criterion"] = args.criterion
    if args.quantile is not None:
        data["threshold_quantile"] = args.quantile
    if args.resamples is not None:
        data["n_resamples"] = args.resamples
    if args.center:
        data["center_rows"] = True
    if args.ci_quantiles is not None:
        data["ci_quantiles"] = tuple(args.ci_quantiles)
    if "initial_ranks" not in data:
        raise ValueError("config field initial_ranks is required: pass --ranks or --config")
    return PipelineConfig.from_dict(data)


def _write_outputs(result: PipelineResult, out: Path):
    dec = result.decomposition
    reps = result.representations
    for k, block in enumerate(result.blocks):
        name = block.name
        for stem, values in (
            ("joint", dec.joint[k]),
            ("individual", dec.individual[k]),
            ("residual", dec.residual[k]),
        ):
            part = DataBlock(
                name=name,
                values=values,
                feature_labels=block.feature_labels,
                object_labels=block.object_labels,
            )
            save_block(part, out / f"{stem}_{name}.csv")
        save_matrix(reps.bss_joint[k], out / f"bss_joint_{name}.csv")
        save_matrix(reps.ins[k], out / f"ins_{name}.csv")
        save_matrix(reps.cns_loadings[k], out / f"cns_loadings_{name}.csv")
    save_matrix(reps.cns, out / "cns.csv")
    payload = json.dumps(result.diagnostics, indent=2)
    (out / "diagnostics.json").write_text(payload + "\n", encoding="utf-8")


def _cmd_run(args) -> int:
    try:
        config = _resolve_config(args)
        blocks = load_blocks(args.blocks, config)
        result = run_pipeline(blocks, config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_outputs(result, out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    dec = result.decomposition
    ranks = ", ".join(
        f"{b.name}={r}" for b, r in zip(result.blocks, dec.individual_ranks)
    )
    print(f"joint rank {dec.joint_rank}; individual ranks: {ranks}")
    if dec.dropped_components:
        detail = ", ".join(
            f"{d.component} (blocks {list(d.failing_blocks)})" for d in dec.dropped_components
        )
        print(f"dropped joint candidates: {detail}")
    print(f"wrote outputs to {out}")
    if dec.joint_rank == 0:
        print("warning: no joint components survived validation", file=sys.stderr)
        return 2
    return 0


def _cmd_scree(args) -> int:
    try:
        block = load_block(args.block)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    s = singular_values(block.values)
    print(f"# {block.name}: {block.n_features} features x {block.n_objects} objects")
    print(f"{'index':>5}  {'singular_value':>20}  {'ratio_to_next':>13}")
    for i, value in enumerate(s):
        if i + 1 < s.size and s[i + 1] > 0.0:
            ratio = f"{value / s[i + 1]:13.3f}"
        else:
            ratio = f"{'-':>13}"
        print(f"{i + 1:>5}  {value:20.10e}  {ratio}")
    return 0


def _cmd_toygen(args) -> int:
    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        blocks, truth = generate_toy(args.seed)
        for k, block in enumerate(blocks):
            save_block(block, out / f"{block.name}.csv")
            save_matrix(truth.joint[k], out / f"truth_joint_{block.name}.csv")
            save_matrix(truth.individual[k], out / f"truth_individual_{block.name}.csv")
            save_matrix(truth.noise[k], out / f"truth_noise_{block.name}.csv")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote benchmark blocks and ground truth to {out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
