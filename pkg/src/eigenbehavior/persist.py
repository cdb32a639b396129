"""Deterministic on-disk formats for every pipeline artifact.

All floats are written with 9 significant digits and all JSON with sorted
keys, so identical inputs and seeds reproduce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from datetime import datetime, timezone
from typing import Iterable, Sequence
from urllib.parse import quote

import numpy as np

from . import __version__
from .cluster import Partition
from .distances import DistanceMatrix
from .groups import GroupProfile
from .profilecast import SimConfig, SimResult
from .summaries import EigenBehaviorSet
from .trace import AssociationMatrix, AssociationRecord, TraceConfig


def fmt(x: float) -> str:
    return format(float(x), ".9g")


def _safe_name(user: str) -> str:
    return quote(user, safe="")


def write_trace_csv(path: str, records: Iterable[AssociationRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user", "location", "start", "end"])
        for rec in records:
            writer.writerow([rec.user_id, rec.location_id, int(rec.start), int(rec.end)])


def write_truth_csv(path: str, truth: dict[str, int]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user", "group"])
        for user in sorted(truth):
            writer.writerow([user, truth[user]])


def load_truth_csv(path: str) -> dict[str, int]:
    out: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["user", "group"]:
            raise ValueError(f"{path}: bad header {header!r}, expected user,group")
        for row in reader:
            out[row[0]] = int(row[1])
    return out


def write_matrices(
    out_dir: str, matrices: dict[str, AssociationMatrix], config: TraceConfig
) -> None:
    """One CSV per user plus an index manifest with the shared location index."""
    os.makedirs(out_dir, exist_ok=True)
    users = sorted(matrices)
    first = matrices[users[0]]
    for user in users:
        with open(os.path.join(out_dir, f"{_safe_name(user)}.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for row in matrices[user].rows:
                writer.writerow([fmt(v) for v in row])
    index = {
        "users": users,
        "t": first.n_slots,
        "n": first.n_locations,
        "location_index": list(first.location_index),
        "config": {
            "trace_start": config.trace_start,
            "trace_end": config.trace_end,
            "slot_seconds": config.slot_seconds,
            "granularity": config.granularity,
            "window": list(config.window) if config.window else None,
            "normalization": config.normalization,
            "align_midnight": config.align_midnight,
        },
    }
    write_json(os.path.join(out_dir, "index.json"), index)


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_eigen_sets(
    out_dir: str, eigen_sets: dict[str, EigenBehaviorSet | None]
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for user in sorted(eigen_sets):
        eset = eigen_sets[user]
        if eset is None:
            continue
        payload = {
            "user": user,
            "weights": [float(fmt(w)) for w in eset.weights],
            "vectors": [[float(fmt(v)) for v in vec] for vec in eset.vectors],
            "power_floor": eset.power_floor,
        }
        write_json(os.path.join(out_dir, f"{_safe_name(user)}.json"), payload)


def load_eigen_sets(out_dir: str) -> dict[str, EigenBehaviorSet]:
    out: dict[str, EigenBehaviorSet] = {}
    for name in sorted(os.listdir(out_dir)):
        if not name.endswith(".json"):
            continue
        with open(os.path.join(out_dir, name)) as fh:
            payload = json.load(fh)
        out[payload["user"]] = EigenBehaviorSet(
            np.array(payload["vectors"]), np.array(payload["weights"]), payload["power_floor"]
        )
    return out


def write_distance_matrix(path: str, dm: DistanceMatrix) -> None:
    """Upper triangle as i,j,distance rows plus a JSON sidecar with ids and params."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "distance"])
        for i in range(dm.n):
            for j in range(i + 1, dm.n):
                writer.writerow([i, j, fmt(dm.values[i, j])])
    write_json(
        path + ".json",
        {
            "metric": dm.metric,
            "ids": list(dm.ids),
            "flagged_ids": list(dm.flagged_ids),
            "params": dm.params,
        },
    )


def load_distance_matrix(path: str) -> DistanceMatrix:
    with open(path + ".json") as fh:
        sidecar = json.load(fh)
    ids = sidecar["ids"]
    values = np.zeros((len(ids), len(ids)))
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["i", "j", "distance"]:
            raise ValueError(f"{path}: bad header {header!r}")
        for row in reader:
            i, j, d = int(row[0]), int(row[1]), float(row[2])
            values[i, j] = values[j, i] = d
    return DistanceMatrix(
        values, sidecar["metric"], ids, tuple(sidecar["flagged_ids"]), sidecar["params"]
    )


def write_partition_csv(path: str, partition: Partition) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["element", "cluster"])
        for element in sorted(partition.assignment, key=str):
            writer.writerow([element, partition.assignment[element]])


def load_partition_csv(path: str) -> Partition:
    assignment: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["element", "cluster"]:
            raise ValueError(f"{path}: bad header {header!r}, expected element,cluster")
        for row in reader:
            if len(row) != 2:
                raise ValueError(f"{path}:{reader.line_num}: expected 2 fields")
            assignment[row[0]] = int(row[1])
    if not assignment:
        raise ValueError(f"{path}: empty partition")
    return Partition(assignment=assignment, merge_history=[], stop=None)


def write_merge_history_csv(path: str, partition: Partition) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "a", "b", "distance"])
        for step, (a, b, dist) in enumerate(partition.merge_history):
            writer.writerow([step, a, b, fmt(dist)])


def write_cdf_csv(path: str, samples: np.ndarray) -> None:
    """Sorted samples with their empirical CDF value."""
    n = len(samples)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["distance", "cdf"])
        for i, value in enumerate(samples):
            writer.writerow([fmt(value), fmt((i + 1) / n)])


def write_summary_table_csv(path: str, table: dict[str, float]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["summary", "mean_significance"])
        for name in table:
            writer.writerow([name, fmt(table[name])])


def write_sims_csv(path: str, normalized: np.ndarray, ids: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user"] + list(ids))
        for i, user in enumerate(ids):
            writer.writerow([user] + [fmt(v) for v in normalized[i]])


def load_sims_csv(path: str) -> tuple[np.ndarray, tuple[str, ...]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "user":
            raise ValueError(f"{path}: bad similarity table header")
        ids = tuple(header[1:])
        rows = [[float(v) for v in row[1:]] for row in reader]
    values = np.array(rows)
    if values.shape != (len(ids), len(ids)):
        raise ValueError(f"{path}: similarity table is not square")
    return values, ids


def write_report_json(
    path: str,
    profiles: list[GroupProfile],
    location_index: Sequence[str],
    slope: float | None,
    top10_share: float | None,
    top_locations: int = 5,
) -> None:
    clusters = []
    for profile in profiles:
        entry: dict = {"cluster": profile.cluster_id, "size": profile.size}
        if profile.eigen is not None:
            first = profile.eigen.vectors[0]
            order = np.argsort(-np.abs(first), kind="stable")[:top_locations]
            entry["weights"] = [float(fmt(w)) for w in profile.eigen.weights]
            entry["top_locations"] = [
                {"location": location_index[i], "entry": float(fmt(first[i]))} for i in order
            ]
            entry["top_power"] = [float(fmt(p)) for p in profile.top_power]
        clusters.append(entry)
    write_json(
        path,
        {
            "clusters": clusters,
            "rank_size_slope": None if slope is None else float(fmt(slope)),
            "top10_share": None if top10_share is None else float(fmt(top10_share)),
        },
    )


def write_results_csv(path: str, rows: list[tuple[SimConfig, SimResult]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scheme", "param", "delivery_ratio", "mean_delay_s", "overhead"])
        for config, result in rows:
            writer.writerow(
                [
                    config.scheme,
                    config.param,
                    fmt(result.delivery_ratio),
                    fmt(result.mean_delay),
                    result.overhead,
                ]
            )


def write_normalized_results_csv(
    path: str, rows: list[tuple[SimConfig, SimResult]], baseline: SimResult
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scheme", "param", "delivery_ratio", "mean_delay_s", "overhead"])
        for config, result in rows:
            writer.writerow(
                [
                    config.scheme,
                    config.param,
                    fmt(result.delivery_ratio / baseline.delivery_ratio),
                    fmt(result.mean_delay / baseline.mean_delay),
                    fmt(result.overhead / baseline.overhead),
                ]
            )


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest_timestamp() -> str:
    """Wall clock, unless SOURCE_DATE_EPOCH pins it for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(timezone.utc).isoformat()


def write_run_manifest(
    out_dir: str,
    command: str,
    seed: int,
    config_payload: dict | None,
    input_paths: Sequence[str],
) -> None:
    """The single manifest.json every output directory carries."""
    canonical = json.dumps(config_payload or {}, sort_keys=True, separators=(",", ":"))
    manifest = {
        "tool": "eigenbehavior",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "inputs": {os.path.basename(p): sha256_file(p) for p in input_paths},
        "created_utc": _manifest_timestamp(),
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
