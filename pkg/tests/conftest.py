"""Shared fixtures: seeded synthetic populations reused across test modules."""

from __future__ import annotations

import numpy as np
import pytest

from eigenbehavior import (
    AssociationMatrix,
    GroupSpec,
    SynthSpec,
    TraceConfig,
    build_matrices,
    generate,
    single_location_modes,
)
from eigenbehavior.trace import DAY_SECONDS


def matrix_from_rows(rows, user_id="u", locations=None) -> AssociationMatrix:
    rows = np.asarray(rows, dtype=float)
    if locations is None:
        locations = tuple(f"L{i:03d}" for i in range(rows.shape[1]))
    return AssociationMatrix(user_id, rows, locations)


def basis_rows(pattern, n):
    """Rows from a pattern like [0, 0, 1, None]: basis vectors, None = offline."""
    rows = []
    for p in pattern:
        row = np.zeros(n)
        if p is not None:
            row[p] = 1.0
        rows.append(row)
    return np.array(rows)


def _mode(n, pairs):
    vec = [0.0] * n
    for loc, w in pairs:
        vec[loc] = w
    return tuple(vec)


MIXED_SEED = 20260817


def mixed_population_spec() -> SynthSpec:
    """200 users over 40 locations: single-, bi-, tri-modal and overlapping-mode groups.

    Every mode weight is a multiple of 1/28800 and every user has at most
    three modes with a dominant first mode.
    """
    n = 40
    groups = [
        GroupSpec(25, single_location_modes(n, [loc]), (1.0,), p_online=0.85)
        for loc in range(4)
    ]
    groups.append(GroupSpec(25, single_location_modes(n, [4, 5]), (0.6, 0.4), p_online=0.85))
    groups.append(GroupSpec(25, single_location_modes(n, [6, 7]), (0.7, 0.3), p_online=0.85))
    groups.append(
        GroupSpec(25, single_location_modes(n, [8, 9, 10]), (0.5, 0.3, 0.2), p_online=0.85)
    )
    groups.append(
        GroupSpec(
            25,
            (
                _mode(n, [(11, 0.7), (12, 0.3)]),
                _mode(n, [(11, 0.4), (12, 0.3), (13, 0.3)]),
            ),
            (0.55, 0.45),
            p_online=0.85,
        )
    )
    return SynthSpec(
        n_locations=n, n_days=60, groups=tuple(groups), seed=MIXED_SEED, noise_epsilon=0.02
    )


@pytest.fixture(scope="session")
def mixed_population():
    spec = mixed_population_spec()
    records, truth = generate(spec)
    config = TraceConfig(0, spec.n_days * DAY_SECONDS)
    return build_matrices(records, config), truth


def planted_five_spec() -> SynthSpec:
    """500 users in 5 groups of 100 with orthogonal dominant modes, noise 0.05."""
    n = 40
    groups = tuple(
        GroupSpec(100, single_location_modes(n, [loc]), (1.0,), p_online=0.8)
        for loc in (0, 8, 16, 24, 32)
    )
    return SynthSpec(n_locations=n, n_days=30, groups=groups, seed=424242, noise_epsilon=0.05)


@pytest.fixture(scope="session")
def planted_five():
    spec = planted_five_spec()
    records, truth = generate(spec)
    config = TraceConfig(0, spec.n_days * DAY_SECONDS)
    return build_matrices(records, config), truth


SIM_GROUP_SIZES = (100, 80, 60, 50, 40, 40, 35, 35, 30, 30)


def sim_trace_spec() -> SynthSpec:
    """500 users, 60 days, 10 groups; each mode spends 10% in a shared common area."""
    n = 40
    common = 39
    groups = tuple(
        GroupSpec(size, (_mode(n, [(gi, 0.9), (common, 0.1)]),), (1.0,), p_online=0.5)
        for gi, size in enumerate(SIM_GROUP_SIZES)
    )
    return SynthSpec(n_locations=n, n_days=60, groups=groups, seed=77001, noise_epsilon=0.05)


@pytest.fixture(scope="session")
def sim_trace():
    spec = sim_trace_spec()
    records, truth = generate(spec)
    return records, truth, spec
