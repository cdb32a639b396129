"""Validation and characterization of discovered behavioral groups.

A group's members are pooled into a joint matrix (rows of every member's
matrix stacked).  Coherent groups concentrate their joint power in a few
components, beat size-matched random user samples on top-4 captured power,
and their leading joint eigen-behavior scores high on members and near zero
on everyone else.  Group size distributions are summarized by a power-law
rank-size fit, and partitions are compared by the pair-counting Jaccard
index.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Hashable, Sequence

import numpy as np

from .cluster import Partition
from .summaries import (
    DEFAULT_POWER_FLOOR,
    EigenBehaviorSet,
    eigen_behaviors,
    significance,
)
from .trace import AssociationMatrix

SCATTER_TOP_K = 4


def joint_matrix(matrices: Sequence[AssociationMatrix]) -> AssociationMatrix:
    """Row-stack member matrices in ascending user-id order."""
    if not matrices:
        raise ValueError("no member matrices given")
    ordered = sorted(matrices, key=lambda m: m.user_id)
    index = ordered[0].location_index
    t = ordered[0].n_slots
    for m in ordered[1:]:
        if m.location_index != index:
            raise ValueError("member matrices must share one location_index")
        if m.n_slots != t:
            raise ValueError("member matrices must share the slot count")
    users = [m.user_id for m in ordered]
    if len(set(users)) != len(users):
        raise ValueError("duplicate user in joint matrix")
    joint = np.vstack([m.rows for m in ordered])
    return AssociationMatrix("+".join(users), joint, index)


def _cluster_members(partition: Partition) -> list[list[str]]:
    return [[str(m) for m in members] for members in partition.clusters()]


def _joint_power_top_k(matrices: list[AssociationMatrix], k: int) -> float:
    joint = joint_matrix(matrices)
    s = np.linalg.svd(joint.rows, compute_uv=False)
    powers = s * s
    return float(powers[: min(k, powers.size)].sum() / powers.sum())


@dataclass
class ScatterPoint:
    cluster_id: int
    size: int
    coherent_power: float  # top-4 power of the cluster's joint matrix
    random_power: float  # top-4 power of a size-matched random user sample


def group_power_scatter(
    partition: Partition,
    matrices: dict[str, AssociationMatrix],
    min_size: int = 5,
    seed: int = 0,
) -> list[ScatterPoint]:
    """Top-4 joint power of each cluster with more than min_size users,
    against one seeded random same-size sample drawn from the whole population
    without replacement."""
    rng = np.random.default_rng(seed)
    population = sorted(matrices)
    points = []
    for cid, members in enumerate(_cluster_members(partition)):
        if len(members) <= min_size:
            continue
        coherent = _joint_power_top_k([matrices[m] for m in members], SCATTER_TOP_K)
        sample = rng.choice(len(population), size=len(members), replace=False)
        random_power = _joint_power_top_k(
            [matrices[population[i]] for i in sorted(sample)], SCATTER_TOP_K
        )
        points.append(ScatterPoint(cid, len(members), coherent, random_power))
    if not points:
        raise ValueError(f"no cluster has more than {min_size} users")
    return points


@dataclass
class CrossSignificance:
    per_cluster: list[tuple[int, float, float]]  # (cluster_id, own mean, other mean)
    own_mean: float  # mean SIG over all (cluster, member) pairs
    other_mean: float  # mean SIG over all (cluster, non-member) pairs


def cross_significance(
    partition: Partition,
    matrices: dict[str, AssociationMatrix],
    power_floor: float = DEFAULT_POWER_FLOOR,
) -> CrossSignificance:
    """Score each cluster's first joint eigen-behavior on members vs everyone else."""
    online = {u for u, m in matrices.items() if m.rows.sum() > 0}
    per_cluster = []
    own_all: list[float] = []
    other_all: list[float] = []
    for cid, members in enumerate(_cluster_members(partition)):
        member_set = set(members) & online
        if not member_set:
            continue
        first = eigen_behaviors(
            joint_matrix([matrices[m] for m in sorted(member_set)]), power_floor
        ).vectors[0]
        own = [significance(matrices[u], first) for u in sorted(member_set)]
        other = [significance(matrices[u], first) for u in sorted(online - member_set)]
        per_cluster.append((cid, float(np.mean(own)), float(np.mean(other)) if other else float("nan")))
        own_all.extend(own)
        other_all.extend(other)
    if not per_cluster:
        raise ValueError("no cluster has online members")
    return CrossSignificance(
        per_cluster,
        float(np.mean(own_all)),
        float(np.mean(other_all)) if other_all else float("nan"),
    )


def rank_size_fit(partition: Partition, min_size: int = 5) -> tuple[float, float]:
    """Least-squares power-law fit of cluster size against rank.

    Clusters of at least min_size members are sorted by descending size and a
    line is fitted to (log10 rank, log10 size); returns (slope, intercept).
    """
    sizes = sorted((s for s in partition.sizes() if s >= min_size), reverse=True)
    if len(sizes) < 3:
        raise ValueError(f"need at least 3 clusters of size >= {min_size}, have {len(sizes)}")
    ranks = np.arange(1, len(sizes) + 1)
    slope, intercept = np.polyfit(np.log10(ranks), np.log10(sizes), 1)
    return float(slope), float(intercept)


def top_groups_share(partition: Partition, k: int = 10) -> float:
    """Fraction of the population held by the k largest clusters."""
    sizes = sorted(partition.sizes(), reverse=True)
    if len(sizes) < k:
        raise ValueError(f"need at least {k} clusters, have {len(sizes)}")
    return float(sum(sizes[:k]) / sum(sizes))


def jaccard(p: Partition, q: Partition) -> float:
    """Pair-counting Jaccard index between two partitions of one element set.

    r pairs co-clustered in both, u only in the first, v only in the second;
    the index is r / (r + u + v), and 1.0 when no pair is co-clustered in
    either (nothing to disagree about).
    """
    if set(p.assignment) != set(q.assignment):
        raise ValueError("partitions must cover the same elements")
    contingency: dict[tuple[int, int], int] = {}
    p_sizes: dict[int, int] = {}
    q_sizes: dict[int, int] = {}
    for element, pc in p.assignment.items():
        qc = q.assignment[element]
        contingency[(pc, qc)] = contingency.get((pc, qc), 0) + 1
        p_sizes[pc] = p_sizes.get(pc, 0) + 1
        q_sizes[qc] = q_sizes.get(qc, 0) + 1
    r = sum(comb(c, 2) for c in contingency.values())
    same_p = sum(comb(c, 2) for c in p_sizes.values())
    same_q = sum(comb(c, 2) for c in q_sizes.values())
    u = same_p - r
    v = same_q - r
    denom = r + u + v
    return 1.0 if denom == 0 else r / denom


def partition_from_labels(labels: dict[Hashable, int]) -> Partition:
    """Wrap a plain element -> group-id mapping (ids made contiguous)."""
    relabel: dict[int, int] = {}
    assignment: dict[Hashable, int] = {}
    for element in sorted(labels, key=str):
        gid = labels[element]
        if gid not in relabel:
            relabel[gid] = len(relabel)
        assignment[element] = relabel[gid]
    return Partition(assignment=assignment, merge_history=[], stop=None)


@dataclass
class GroupProfile:
    cluster_id: int
    size: int
    eigen: EigenBehaviorSet | None  # None for all-offline clusters
    top_power: list[float]  # cumulative power captured by the top 1..4 components


def group_profiles(
    partition: Partition,
    matrices: dict[str, AssociationMatrix],
    power_floor: float = DEFAULT_POWER_FLOOR,
) -> list[GroupProfile]:
    """Joint eigen-behavior profile and power concentration per cluster."""
    profiles = []
    for cid, members in enumerate(_cluster_members(partition)):
        joint = joint_matrix([matrices[m] for m in members])
        if joint.rows.sum() <= 0:
            profiles.append(GroupProfile(cid, len(members), None, []))
            continue
        s = np.linalg.svd(joint.rows, compute_uv=False)
        powers = s * s
        cumulative = np.cumsum(powers) / powers.sum()
        top = [float(cumulative[min(i, cumulative.size - 1)]) for i in range(SCATTER_TOP_K)]
        profiles.append(
            GroupProfile(cid, len(members), eigen_behaviors(joint, power_floor), top)
        )
    return profiles
