"""Command-line front end.

Subcommands: synth (generate a planted-group trace), pipeline (matrices,
distances, clustering, group report), simulate (group-cast replay on the
second trace half), compare (Jaccard index of two partition files).  Every
output directory gets exactly one manifest.json recording the tool version,
seed, config hash, and input digests.  Given identical inputs and seed, all
data outputs are byte-identical across reruns (the manifest carries a
wall-clock timestamp and is the one exception).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, persist
from .groups import jaccard, rank_size_fit, top_groups_share
from .pipeline import METRICS, run_pipeline
from .profilecast import (
    DEFAULT_MIN_GROUP_SIZE,
    DEFAULT_SOURCE_FRACTION,
    SimConfig,
    build_messages,
    extract_encounters,
    simulate,
    split_trace,
)
from .summaries import DEFAULT_POWER_FLOOR
from .synth import generate, spec_from_json, spec_to_json_dict
from .trace import TraceConfig, aggregate_locations, load_location_map, load_records


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenbehavior",
        description="Mine behavioral groups from WLAN association traces and "
        "replay group-cast messaging over them.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--out", required=True, help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", parents=[common], help="generate a synthetic trace")
    p_synth.add_argument("spec", help="synth spec JSON")

    p_pipe = sub.add_parser("pipeline", parents=[common], help="matrices to group report")
    p_pipe.add_argument("trace", help="trace CSV (user,location,start,end)")
    p_pipe.add_argument("--config", required=True, help="trace/analysis config JSON")
    p_pipe.add_argument("--locmap", help="ap,building CSV to aggregate locations")
    p_pipe.add_argument("--metric", choices=METRICS, default="eigen")
    stop = p_pipe.add_mutually_exclusive_group(required=True)
    stop.add_argument("--clusters", type=int, help="stop at this cluster count")
    stop.add_argument("--threshold", type=float, help="stop when linkages exceed this")

    p_sim = sub.add_parser("simulate", parents=[common], help="replay group-cast schemes")
    p_sim.add_argument("trace", help="trace CSV; the second half is replayed")
    p_sim.add_argument("--pipeline", required=True, dest="pipeline_dir",
                       help="output directory of a pipeline run on the profile half")
    p_sim.add_argument("--scenario", required=True, help="scenario JSON (schemes, split)")

    p_cmp = sub.add_parser("compare", help="Jaccard index of two partition CSVs")
    p_cmp.add_argument("partition_a")
    p_cmp.add_argument("partition_b")
    return parser


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None


def cmd_synth(args: argparse.Namespace) -> int:
    spec = spec_from_json(args.spec)
    if args.seed:
        spec = type(spec)(
            n_locations=spec.n_locations,
            n_days=spec.n_days,
            groups=spec.groups,
            seed=args.seed,
            noise_epsilon=spec.noise_epsilon,
        )
    records, truth = generate(spec)
    os.makedirs(args.out, exist_ok=True)
    persist.write_trace_csv(os.path.join(args.out, "trace.csv"), records)
    persist.write_truth_csv(os.path.join(args.out, "truth.csv"), truth)
    persist.write_run_manifest(
        args.out, "synth", spec.seed, spec_to_json_dict(spec), [args.spec]
    )
    return 0


def _trace_config(payload: dict, records) -> TraceConfig:
    start = payload.get("trace_start")
    end = payload.get("trace_end")
    if start is None:
        start = min(r.start for r in records)
    if end is None:
        end = max(r.end for r in records)
    window = payload.get("window")
    return TraceConfig(
        trace_start=start,
        trace_end=end,
        slot_seconds=int(payload.get("slot_seconds", 86400)),
        granularity=payload.get("granularity", "building"),
        window=tuple(window) if window else None,
        normalization=payload.get("normalization", "normalized"),
        align_midnight=bool(payload.get("align_midnight", False)),
    )


def cmd_pipeline(args: argparse.Namespace) -> int:
    records = load_records(args.trace)
    if args.locmap:
        records = aggregate_locations(records, load_location_map(args.locmap))
    payload = _load_json(args.config)
    config = _trace_config(payload, records)
    result = run_pipeline(
        records,
        config,
        metric=args.metric,
        threshold=args.threshold,
        target_count=args.clusters,
        power_floor=float(payload.get("power_floor", DEFAULT_POWER_FLOOR)),
        include_offline=bool(payload.get("include_offline", False)),
        seed=args.seed,
        with_summary_table=True,
    )
    os.makedirs(args.out, exist_ok=True)
    persist.write_matrices(os.path.join(args.out, "matrices"), result.matrices, config)
    persist.write_eigen_sets(os.path.join(args.out, "eigen"), result.eigen_sets)
    if result.normalized_sims is not None:
        persist.write_sims_csv(
            os.path.join(args.out, "sims.csv"), result.normalized_sims, result.sim_ids
        )
    persist.write_distance_matrix(os.path.join(args.out, "distances.csv"), result.distance_matrix)
    persist.write_partition_csv(os.path.join(args.out, "partition.csv"), result.partition)
    persist.write_merge_history_csv(os.path.join(args.out, "merges.csv"), result.partition)
    persist.write_cdf_csv(os.path.join(args.out, "cdf_intra.csv"), result.intra_cdf)
    persist.write_cdf_csv(os.path.join(args.out, "cdf_inter.csv"), result.inter_cdf)
    persist.write_summary_table_csv(os.path.join(args.out, "summary.csv"), result.summary)
    try:
        slope = rank_size_fit(result.partition)[0]
    except ValueError:
        slope = None
    try:
        share = top_groups_share(result.partition)
    except ValueError:
        share = None
    persist.write_report_json(
        os.path.join(args.out, "report.json"),
        result.profiles,
        result.matrices[next(iter(sorted(result.matrices)))].location_index,
        slope,
        share,
    )
    stop_payload = {"threshold": args.threshold, "clusters": args.clusters}
    inputs = [args.trace, args.config] + ([args.locmap] if args.locmap else [])
    persist.write_run_manifest(
        args.out, "pipeline", args.seed, {**payload, **stop_payload, "metric": args.metric}, inputs
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    records = load_records(args.trace)
    scenario = _load_json(args.scenario)
    partition = persist.load_partition_csv(os.path.join(args.pipeline_dir, "partition.csv"))
    schemes = scenario.get("schemes")
    if not schemes:
        raise ValueError(f"{args.scenario}: scenario lists no schemes")
    configs = []
    for i, entry in enumerate(schemes):
        configs.append(
            SimConfig(
                scheme=entry.get("scheme", ""),
                sim_threshold=entry.get("sim_threshold"),
                p=entry.get("p"),
                ttl_factor=entry.get("ttl_factor"),
                seed=args.seed + i,
            )
        )
    if not any(c.scheme == "flooding" for c in configs):
        raise ValueError("scenario must include the flooding scheme (normalization baseline)")
    sim_table = sim_ids = None
    if any(c.scheme == "similarity" for c in configs):
        sim_table, sim_ids = persist.load_sims_csv(os.path.join(args.pipeline_dir, "sims.csv"))
    _, second, mid = split_trace(records, float(scenario.get("split_fraction", 0.5)))
    encounters = extract_encounters(second)
    messages = build_messages(
        partition,
        creation_time=mid,
        source_fraction=float(scenario.get("source_fraction", DEFAULT_SOURCE_FRACTION)),
        min_group_size=int(scenario.get("min_group_size", DEFAULT_MIN_GROUP_SIZE)),
        seed=args.seed,
    )
    rows = []
    baseline = None
    for config in configs:
        outcome = simulate(messages, encounters, config, sim_table, sim_ids)
        rows.append((config, outcome.aggregate))
        if config.scheme == "flooding" and baseline is None:
            baseline = outcome.aggregate
    os.makedirs(args.out, exist_ok=True)
    persist.write_results_csv(os.path.join(args.out, "results.csv"), rows)
    persist.write_normalized_results_csv(
        os.path.join(args.out, "normalized.csv"), rows, baseline
    )
    persist.write_run_manifest(
        args.out, "simulate", args.seed, scenario, [args.trace, args.scenario]
    )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    a = persist.load_partition_csv(args.partition_a)
    b = persist.load_partition_csv(args.partition_b)
    print(f"{jaccard(a, b):.4f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "synth": cmd_synth,
        "pipeline": cmd_pipeline,
        "simulate": cmd_simulate,
        "compare": cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"eigenbehavior {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
