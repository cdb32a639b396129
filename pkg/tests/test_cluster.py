"""Average-linkage clustering against a direct cross-pair-mean oracle.

The production code uses the running Lance-Williams recursion; the oracle
recomputes every linkage as the plain mean over all cross pairs of original
elements, with the same tie rule (lexicographically smallest id pair).  For
average linkage the two must agree.
"""

from __future__ import annotations

import numpy as np
import pytest

from eigenbehavior import Partition, agglomerate, distance_cdfs


def naive_average_linkage(dm, threshold=None, target_count=None):
    n = dm.shape[0]
    clusters = {i: [i] for i in range(n)}
    history = []
    while len(clusters) > 1:
        if target_count is not None and len(clusters) == target_count:
            break
        ids = sorted(clusters)
        best = None
        for ai, a in enumerate(ids):
            for b in ids[ai + 1 :]:
                d = np.mean([dm[x, y] for x in clusters[a] for y in clusters[b]])
                if best is None or d < best[0]:
                    best = (d, a, b)
        d, a, b = best
        if threshold is not None and d > threshold:
            break
        history.append((a, b, float(d)))
        clusters[a] = clusters[a] + clusters.pop(b)
    assignment = {}
    for cid, key in enumerate(sorted(clusters)):
        for x in clusters[key]:
            assignment[x] = cid
    return assignment, history


def random_dm(rng, n):
    raw = rng.uniform(0.1, 1.0, size=(n, n))
    dm = (raw + raw.T) / 2.0
    np.fill_diagonal(dm, 0.0)
    return dm


# ------------------------------------------------------------- hand cases ---


def test_three_points_on_a_line():
    dm = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 4.0], [5.0, 4.0, 0.0]])
    p = agglomerate(dm, threshold=2.0)
    assert p.assignment == {0: 0, 1: 0, 2: 1}
    assert p.merge_history == [(0, 1, 1.0)]
    full = agglomerate(dm, target_count=1)
    assert full.merge_history == [(0, 1, 1.0), (0, 2, 4.5)]
    assert full.assignment == {0: 0, 1: 0, 2: 0}


def test_all_tied_distances_merge_lowest_ids_first():
    dm = np.ones((4, 4)) - np.eye(4)
    p = agglomerate(dm, target_count=1)
    assert p.merge_history == [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]


def test_tie_prefers_smaller_first_id():
    # (0,2) and (1,2) tie at 1; (0,1) is larger.
    dm = np.array([[0.0, 2.0, 1.0], [2.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    p = agglomerate(dm, target_count=2)
    assert p.merge_history == [(0, 2, 1.0)]
    assert p.assignment == {0: 0, 2: 0, 1: 1}


def test_threshold_is_inclusive():
    dm = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert agglomerate(dm, threshold=1.0).n_clusters == 1
    assert agglomerate(dm, threshold=0.999).n_clusters == 2


def test_labels_key_the_assignment():
    dm = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 4.0], [5.0, 4.0, 0.0]])
    p = agglomerate(dm, threshold=2.0, labels=["w", "x", "y"])
    assert p.assignment == {"w": 0, "x": 0, "y": 1}
    assert p.clusters() == [["w", "x"], ["y"]]
    assert p.sizes() == [2, 1]


def test_single_element():
    p = agglomerate(np.zeros((1, 1)), threshold=1.0)
    assert p.assignment == {0: 0}
    assert p.merge_history == []


def test_validation_errors():
    dm = np.zeros((3, 3))
    with pytest.raises(ValueError, match="exactly one"):
        agglomerate(dm)
    with pytest.raises(ValueError, match="exactly one"):
        agglomerate(dm, threshold=1.0, target_count=2)
    with pytest.raises(ValueError, match="square"):
        agglomerate(np.zeros((2, 3)), threshold=1.0)
    asym = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ValueError, match="symmetric"):
        agglomerate(asym, threshold=1.0)
    with pytest.raises(ValueError, match="zero diagonal"):
        agglomerate(np.ones((2, 2)), threshold=1.0)
    with pytest.raises(ValueError, match="target_count"):
        agglomerate(dm, target_count=0)
    with pytest.raises(ValueError, match="labels length"):
        agglomerate(dm, threshold=1.0, labels=["a"])


# ----------------------------------------------------------------- oracle ---


def test_matches_naive_oracle_target_count():
    rng = np.random.default_rng(101)
    for _ in range(30):
        n = int(rng.integers(3, 41))
        dm = random_dm(rng, n)
        k = int(rng.integers(1, n + 1))
        got = agglomerate(dm, target_count=k)
        want_assign, want_hist = naive_average_linkage(dm, target_count=k)
        assert got.assignment == want_assign
        assert [(a, b) for a, b, _ in got.merge_history] == [
            (a, b) for a, b, _ in want_hist
        ]
        np.testing.assert_allclose(
            [d for _, _, d in got.merge_history],
            [d for _, _, d in want_hist],
            atol=1e-9,
        )


def test_matches_naive_oracle_threshold():
    rng = np.random.default_rng(103)
    for _ in range(30):
        n = int(rng.integers(3, 31))
        dm = random_dm(rng, n)
        threshold = float(rng.uniform(0.2, 0.9))
        got = agglomerate(dm, threshold=threshold)
        want_assign, want_hist = naive_average_linkage(dm, threshold=threshold)
        assert got.assignment == want_assign
        assert len(got.merge_history) == len(want_hist)


def test_merge_distances_nondecreasing():
    rng = np.random.default_rng(107)
    for _ in range(20):
        n = int(rng.integers(3, 41))
        p = agglomerate(random_dm(rng, n), target_count=1)
        ds = [d for _, _, d in p.merge_history]
        assert all(b >= a - 1e-12 for a, b in zip(ds, ds[1:]))


def test_threshold_between_merge_levels_reproduces_prefix():
    rng = np.random.default_rng(109)
    for _ in range(20):
        n = int(rng.integers(4, 31))
        dm = random_dm(rng, n)
        full = agglomerate(dm, target_count=1)
        ds = [d for _, _, d in full.merge_history]
        m = int(rng.integers(1, n - 1))
        if ds[m] - ds[m - 1] < 1e-9:
            continue
        cut = (ds[m - 1] + ds[m]) / 2.0
        p = agglomerate(dm, threshold=cut)
        assert p.merge_history == full.merge_history[:m]
        assert p.n_clusters == n - m


# ------------------------------------------------------------------- cdfs ---


def test_distance_cdfs_hand_case():
    dm = np.array(
        [
            [0.0, 0.1, 0.8, 0.9],
            [0.1, 0.0, 0.7, 0.6],
            [0.8, 0.7, 0.0, 0.2],
            [0.9, 0.6, 0.2, 0.0],
        ]
    )
    p = Partition(assignment={0: 0, 1: 0, 2: 1, 3: 1})
    intra, inter = distance_cdfs(p, dm)
    np.testing.assert_allclose(intra, [0.1, 0.2])
    np.testing.assert_allclose(inter, [0.6, 0.7, 0.8, 0.9])
    assert len(intra) + len(inter) == 6


def test_distance_cdfs_with_labels():
    dm = np.array([[0.0, 0.5], [0.5, 0.0]])
    p = Partition(assignment={"a": 0, "b": 0})
    intra, inter = distance_cdfs(p, dm, labels=["a", "b"])
    np.testing.assert_allclose(intra, [0.5])
    assert inter.size == 0
