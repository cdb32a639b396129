"""End-to-end wiring: trace -> matrices -> metric -> partition -> group report."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import distances, groups, summaries
from .cluster import Partition, agglomerate, distance_cdfs
from .distances import DistanceMatrix
from .trace import AssociationMatrix, TraceConfig, build_matrices

METRICS = ("eigen", "amvd", "onavg", "centroid05", "centroid09")

_SUMMARY_KIND = {"onavg": "onavg", "centroid05": "centroid@0.5", "centroid09": "centroid@0.9"}


def build_distance_matrix(
    matrices: dict[str, AssociationMatrix],
    metric: str,
    power_floor: float = summaries.DEFAULT_POWER_FLOOR,
    include_offline: bool = False,
) -> DistanceMatrix:
    if metric == "eigen":
        return distances.eigen_distance_matrix(distances.eigen_sets_for(matrices, power_floor))
    if metric == "amvd":
        return distances.amvd_distance_matrix(matrices, include_offline)
    if metric in _SUMMARY_KIND:
        return distances.summary_l1_distance(matrices, _SUMMARY_KIND[metric])
    raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")


def cluster_population(
    dm: DistanceMatrix,
    threshold: float | None = None,
    target_count: int | None = None,
) -> Partition:
    """Average-linkage clustering of a population given its distance matrix."""
    return agglomerate(
        dm.values, threshold=threshold, target_count=target_count, labels=list(dm.ids)
    )


@dataclass
class PipelineResult:
    config: TraceConfig
    matrices: dict[str, AssociationMatrix]
    eigen_sets: dict[str, summaries.EigenBehaviorSet | None]
    normalized_sims: np.ndarray | None
    sim_ids: tuple[str, ...] | None
    distance_matrix: DistanceMatrix
    partition: Partition
    intra_cdf: np.ndarray
    inter_cdf: np.ndarray
    profiles: list[groups.GroupProfile] = field(default_factory=list)
    summary: dict[str, float] = field(default_factory=dict)


def run_pipeline(
    records,
    config: TraceConfig,
    metric: str = "eigen",
    threshold: float | None = None,
    target_count: int | None = None,
    power_floor: float = summaries.DEFAULT_POWER_FLOOR,
    include_offline: bool = False,
    seed: int = 0,
    with_summary_table: bool = False,
) -> PipelineResult:
    """Run the full grouping pipeline on prepared (already aggregated) records."""
    matrices = build_matrices(records, config)
    eigen_sets = distances.eigen_sets_for(matrices, power_floor)
    live = {u: s for u, s in eigen_sets.items() if s is not None}
    normalized = None
    sim_ids = None
    if len(live) >= 2:
        normalized, sim_ids = distances.normalized_sim_table(live)
    dm = build_distance_matrix(matrices, metric, power_floor, include_offline)
    partition = cluster_population(dm, threshold=threshold, target_count=target_count)
    intra, inter = distance_cdfs(partition, dm.values, labels=list(dm.ids))
    profiles = groups.group_profiles(partition, matrices, power_floor=power_floor)
    table = summaries.summary_table(matrices, power_floor=power_floor) if with_summary_table else {}
    return PipelineResult(
        config=config,
        matrices=matrices,
        eigen_sets=eigen_sets,
        normalized_sims=normalized,
        sim_ids=sim_ids,
        distance_matrix=dm,
        partition=partition,
        intra_cdf=intra,
        inter_cdf=inter,
        profiles=profiles,
        summary=table,
    )
