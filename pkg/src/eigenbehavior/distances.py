"""Behavioral distances between users.

Two routes to the same question, how alike are two users' daily association
patterns:

* AMVD works on raw matrices.  The asymmetric part averages, over the days of
  one user, the Manhattan distance to the closest day of the other user; the
  symmetric distance averages both directions.  Cost grows with the square of
  the day count per pair.
* The eigen route compresses each user to a few weighted eigen-behavior
  vectors first.  The similarity index sums weighted absolute dot products of
  two users' vectors, is normalized per user by the largest similarity to any
  other user, and the distance is one minus the symmetrized normalized
  similarity.  Per-pair cost depends only on the kept component count.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .summaries import (
    DEFAULT_POWER_FLOOR,
    EigenBehaviorSet,
    centroid_first_mode,
    eigen_behaviors,
    onavg,
)
from .trace import AssociationMatrix

METRIC_MAX = {"amvd": 2.0, "eigen": 1.0, "onavg_l1": 2.0, "centroid_l1": 2.0}

SUMMARY_KINDS = ("onavg", "centroid@0.5", "centroid@0.9")


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distances with a metric tag and element ids."""

    values: np.ndarray
    metric: str
    ids: tuple[str, ...]
    flagged_ids: tuple[str, ...] = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        self.ids = tuple(self.ids)
        self.flagged_ids = tuple(self.flagged_ids)
        n = len(self.ids)
        if self.values.shape != (n, n):
            raise ValueError("values must be N x N matching ids")
        if not np.allclose(self.values, self.values.T, atol=1e-9):
            raise ValueError("distance matrix must be symmetric")
        if not np.allclose(np.diag(self.values), 0.0, atol=1e-9):
            raise ValueError("distance matrix diagonal must be zero")
        top = METRIC_MAX.get(self.metric)
        if top is not None and (self.values.min() < -1e-9 or self.values.max() > top + 1e-9):
            raise ValueError(f"{self.metric} distances must lie in [0, {top}]")

    @property
    def n(self) -> int:
        return len(self.ids)


def manhattan(a: np.ndarray, b: np.ndarray) -> float:
    """L1 distance; at most 2 for two normalized association vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("vectors must be 1-D with equal length")
    return float(np.abs(a - b).sum())


def _vector_set(rows: np.ndarray, include_offline: bool) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2:
        raise ValueError("expected a 2-D vector set")
    if include_offline:
        return rows
    return rows[np.abs(rows).sum(axis=1) > 0]


def amvd(a_rows: np.ndarray, b_rows: np.ndarray, include_offline: bool = False) -> float:
    """Asymmetric minimum vector distance from set A to set B.

    Mean over A's vectors of the Manhattan distance to the nearest vector in
    B.  All-zero (offline) rows are dropped from both sets unless
    include_offline is set.
    """
    a = _vector_set(a_rows, include_offline)
    b = _vector_set(b_rows, include_offline)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("amvd needs a nonempty vector set on both sides")
    if a.shape[1] != b.shape[1]:
        raise ValueError("vector sets must share the location dimension")
    return float(np.mean(cdist(a, b, "cityblock").min(axis=1)))


def amvd_distance(a_rows: np.ndarray, b_rows: np.ndarray, include_offline: bool = False) -> float:
    """Symmetric AMVD: the mean of the two directed values."""
    return (
        amvd(a_rows, b_rows, include_offline) + amvd(b_rows, a_rows, include_offline)
    ) / 2.0


def amvd_distance_matrix(
    matrices: dict[str, AssociationMatrix], include_offline: bool = False
) -> DistanceMatrix:
    """Pairwise symmetric AMVD; pairs touching an all-offline user get the metric max."""
    ids = tuple(sorted(matrices))
    sets = []
    flagged = []
    for user in ids:
        rows = _vector_set(matrices[user].rows, include_offline)
        if rows.shape[0] == 0:
            flagged.append(user)
            sets.append(None)
        else:
            sets.append(rows)
    n = len(ids)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if sets[i] is None or sets[j] is None:
                d = METRIC_MAX["amvd"]
            else:
                forward = float(np.mean(cdist(sets[i], sets[j], "cityblock").min(axis=1)))
                backward = float(np.mean(cdist(sets[j], sets[i], "cityblock").min(axis=1)))
                d = (forward + backward) / 2.0
            values[i, j] = values[j, i] = d
    return DistanceMatrix(
        values, "amvd", ids, tuple(flagged), {"include_offline": include_offline}
    )


def sim(u: EigenBehaviorSet, v: EigenBehaviorSet) -> float:
    """Similarity index: sum of weighted absolute dot products across two sets."""
    if u.vectors.shape[1] != v.vectors.shape[1]:
        raise ValueError("eigen-behavior sets must share the location dimension")
    return float(u.weights @ np.abs(u.vectors @ v.vectors.T) @ v.weights)


def _stacked(sets: list[EigenBehaviorSet]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    counts = [s.k for s in sets]
    basis = np.vstack([s.vectors for s in sets])
    weights = np.concatenate([s.weights for s in sets])
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return basis, weights, starts


def sim_matrix(sets: list[EigenBehaviorSet], chunk: int = 256) -> np.ndarray:
    """Raw similarity index for every ordered pair (diagonal included)."""
    if len(sets) < 2:
        raise ValueError("need at least two eigen-behavior sets")
    basis, weights, starts = _stacked(sets)
    weighted = basis * weights[:, None]
    n = len(sets)
    out = np.empty((n, n))
    bounds = list(starts) + [basis.shape[0]]
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = np.abs(weighted[bounds[lo] : bounds[hi]] @ weighted.T)
        partial = np.add.reduceat(block, starts, axis=1)
        out[lo:hi] = np.add.reduceat(partial, np.array(bounds[lo:hi]) - bounds[lo], axis=0)
    return out


def normalize_sims(raw: np.ndarray) -> np.ndarray:
    """Scale each user's row by its largest similarity to any other user.

    Off-diagonal entries land in [0, 1]; the diagonal is set to 1.  Rows with
    no positive similarity to anyone are left at zero with a warning.
    """
    raw = np.asarray(raw, dtype=float)
    n = raw.shape[0]
    if raw.ndim != 2 or raw.shape != (n, n) or n < 2:
        raise ValueError("raw similarities must be square, at least 2 x 2")
    off = raw.copy()
    np.fill_diagonal(off, -np.inf)
    row_max = off.max(axis=1)
    out = np.zeros_like(raw)
    dead = row_max <= 0
    if np.any(dead):
        warnings.warn(f"normalize_sims: rows with no positive similarity: {np.flatnonzero(dead).tolist()}")
    live = ~dead
    out[live] = raw[live] / row_max[live, None]
    np.fill_diagonal(out, 1.0)
    return out


def eigen_distance(sim_uv: float, sim_vu: float) -> float:
    """Distance from the two directed normalized similarities: 1 - their mean."""
    for s in (sim_uv, sim_vu):
        if not 0.0 <= s <= 1.0 + 1e-9:
            raise ValueError("normalized similarities must lie in [0, 1]")
    return min(max(1.0 - (sim_uv + sim_vu) / 2.0, 0.0), 1.0)


def eigen_distance_matrix(
    eigen_sets: dict[str, EigenBehaviorSet | None],
) -> DistanceMatrix:
    """Pairwise eigen-behavior distance over a population.

    Users mapped to None (no online time, so no eigen-behaviors) are flagged
    and sit at the metric maximum from everyone.
    """
    ids = tuple(sorted(eigen_sets))
    flagged = tuple(u for u in ids if eigen_sets[u] is None)
    live_ids = [u for u in ids if eigen_sets[u] is not None]
    if len(live_ids) < 2:
        raise ValueError("need at least two users with eigen-behavior sets")
    raw = sim_matrix([eigen_sets[u] for u in live_ids])
    norm = normalize_sims(raw)
    live_d = 1.0 - (norm + norm.T) / 2.0
    np.fill_diagonal(live_d, 0.0)
    live_d = np.clip(live_d, 0.0, 1.0)
    n = len(ids)
    values = np.full((n, n), METRIC_MAX["eigen"])
    np.fill_diagonal(values, 0.0)
    live_pos = [ids.index(u) for u in live_ids]
    values[np.ix_(live_pos, live_pos)] = live_d
    floor = eigen_sets[live_ids[0]].power_floor
    return DistanceMatrix(values, "eigen", ids, flagged, {"power_floor": floor})


def normalized_sim_table(eigen_sets: dict[str, EigenBehaviorSet]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Population-normalized similarity table and its user-id order."""
    ids = tuple(sorted(eigen_sets))
    raw = sim_matrix([eigen_sets[u] for u in ids])
    return normalize_sims(raw), ids


def summary_l1_distance(
    matrices: dict[str, AssociationMatrix], kind: str
) -> DistanceMatrix:
    """Manhattan distance between per-user summary vectors.

    kind is one of "onavg", "centroid@0.5", "centroid@0.9".  Users without a
    summary (all offline) are excluded with a warning, so the result may cover
    a subset of the input users.
    """
    if kind not in SUMMARY_KINDS:
        raise ValueError(f"unknown summary kind {kind!r}, expected one of {SUMMARY_KINDS}")
    vectors: dict[str, np.ndarray] = {}
    skipped = []
    for user in sorted(matrices):
        matrix = matrices[user]
        if matrix.rows.sum() <= 0:
            skipped.append(user)
            continue
        if kind == "onavg":
            vectors[user] = onavg(matrix)
        else:
            vectors[user] = centroid_first_mode(matrix, float(kind.split("@")[1]))
    if skipped:
        warnings.warn(f"summary_l1_distance: excluded all-offline users: {skipped}")
    if len(vectors) < 2:
        raise ValueError("need at least two users with online slots")
    ids = tuple(vectors)
    stack = np.vstack([vectors[u] for u in ids])
    values = cdist(stack, stack, "cityblock")
    values = (values + values.T) / 2.0  # scrub asymmetry noise
    np.fill_diagonal(values, 0.0)
    metric = "onavg_l1" if kind == "onavg" else "centroid_l1"
    return DistanceMatrix(values, metric, ids, (), {"kind": kind})


def eigen_sets_for(
    matrices: dict[str, AssociationMatrix], power_floor: float = DEFAULT_POWER_FLOOR
) -> dict[str, EigenBehaviorSet | None]:
    """Eigen-behavior sets per user; all-offline users map to None."""
    out: dict[str, EigenBehaviorSet | None] = {}
    for user, matrix in matrices.items():
        if matrix.rows.sum() <= 0:
            out[user] = None
        else:
            out[user] = eigen_behaviors(matrix, power_floor)
    return out
