"""Synthetic association traces with planted behavioral groups.

Every group plants one or more behavioral modes (a location-weight vector plus
a selection probability).  Each user-day is online with probability p_online;
an online day picks one mode, perturbs its weights with bounded uniform noise,
and packs 8 hours of association time laid out contiguously from a random
offset within the day.  Generation is deterministic for a given spec and
parallel-safe: every user draws from its own child seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .trace import DAY_SECONDS, AssociationRecord

ONLINE_SECONDS = 8 * 3600  # association time packed into one online day


@dataclass(frozen=True)
class GroupSpec:
    """One planted group: size users sharing modes with selection probabilities."""

    size: int
    modes: tuple[tuple[float, ...], ...]
    mode_probs: tuple[float, ...]
    p_online: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(tuple(m) for m in self.modes))
        object.__setattr__(self, "mode_probs", tuple(self.mode_probs))
        if self.size <= 0:
            raise ValueError("group size must be positive")
        if not self.modes:
            raise ValueError("group needs at least one mode")
        if len(self.modes) != len(self.mode_probs):
            raise ValueError("modes and mode_probs must have equal length")
        if not 0.0 <= self.p_online <= 1.0:
            raise ValueError("p_online must lie in [0, 1]")
        if abs(sum(self.mode_probs) - 1.0) > 1e-9 or any(p < 0 for p in self.mode_probs):
            raise ValueError("mode_probs must be nonnegative and sum to 1")
        for mode in self.modes:
            if any(w < 0 for w in mode):
                raise ValueError("mode weights must be nonnegative")
            if abs(sum(mode) - 1.0) > 1e-9:
                raise ValueError("each mode weight vector must sum to 1")


@dataclass(frozen=True)
class SynthSpec:
    n_locations: int
    n_days: int
    groups: tuple[GroupSpec, ...]
    seed: int = 0
    noise_epsilon: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", tuple(self.groups))
        if self.n_locations <= 0:
            raise ValueError("n_locations must be positive")
        if self.n_days <= 0:
            raise ValueError("n_days must be positive")
        if not self.groups:
            raise ValueError("need at least one group")
        if self.noise_epsilon < 0:
            raise ValueError("noise_epsilon must be nonnegative")
        for group in self.groups:
            for mode in group.modes:
                if len(mode) != self.n_locations:
                    raise ValueError(
                        f"mode length {len(mode)} does not match n_locations {self.n_locations}"
                    )

    @property
    def n_users(self) -> int:
        return sum(g.size for g in self.groups)

    @property
    def trace_span(self) -> tuple[int, int]:
        return (0, self.n_days * DAY_SECONDS)


def location_name(index: int) -> str:
    return f"L{index:03d}"


def user_name(index: int) -> str:
    return f"u{index:05d}"


def spec_from_json(path: str) -> SynthSpec:
    with open(path) as fh:
        raw = json.load(fh)
    try:
        groups = tuple(
            GroupSpec(
                size=int(g["size"]),
                modes=tuple(tuple(float(w) for w in m["weights"]) for m in g["modes"]),
                mode_probs=tuple(float(m["prob"]) for m in g["modes"]),
                p_online=float(g.get("p_online", 1.0)),
            )
            for g in raw["groups"]
        )
        return SynthSpec(
            n_locations=int(raw["n_locations"]),
            n_days=int(raw["n_days"]),
            groups=groups,
            seed=int(raw.get("seed", 0)),
            noise_epsilon=float(raw.get("noise_epsilon", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed synth spec ({exc})") from None


def spec_to_json_dict(spec: SynthSpec) -> dict:
    return {
        "n_locations": spec.n_locations,
        "n_days": spec.n_days,
        "seed": spec.seed,
        "noise_epsilon": spec.noise_epsilon,
        "groups": [
            {
                "size": g.size,
                "p_online": g.p_online,
                "modes": [
                    {"weights": list(m), "prob": p} for m, p in zip(g.modes, g.mode_probs)
                ],
            }
            for g in spec.groups
        ],
    }


def _apportion(weights: np.ndarray, total: int) -> np.ndarray:
    """Split `total` whole seconds proportional to weights (largest remainder)."""
    raw = weights * total
    base = np.floor(raw).astype(int)
    leftover = total - int(base.sum())
    if leftover > 0:
        order = np.argsort(-(raw - base), kind="stable")  # ties favor lower index
        base[order[:leftover]] += 1
    return base


def _user_days(
    rng: np.random.Generator, spec: SynthSpec, group: GroupSpec
) -> list[tuple[int, int, np.ndarray]]:
    """(day, start offset, whole-second durations per location) per online day.

    The 8 h block starts at a random offset within the day so co-located users
    overlap partially instead of identically.
    """
    modes = np.array(group.modes)
    probs = np.array(group.mode_probs)
    probs = probs / probs.sum()
    days = []
    for day in range(spec.n_days):
        if rng.random() >= group.p_online:
            continue
        offset = int(rng.integers(0, DAY_SECONDS - ONLINE_SECONDS + 1))
        mode = modes[rng.choice(len(modes), p=probs)]
        if spec.noise_epsilon > 0:
            noisy = mode + rng.uniform(-spec.noise_epsilon, spec.noise_epsilon, spec.n_locations)
            noisy = np.clip(noisy, 0.0, None)
            if noisy.sum() <= 0:
                noisy = mode
            mode = noisy / noisy.sum()
        days.append((day, offset, _apportion(mode, ONLINE_SECONDS)))
    return days


def generate(spec: SynthSpec) -> tuple[list[AssociationRecord], dict[str, int]]:
    """Generate the trace and the user -> group-index ground truth."""
    seeds = np.random.SeedSequence(spec.seed).spawn(spec.n_users)
    records: list[AssociationRecord] = []
    truth: dict[str, int] = {}
    user_idx = 0
    for group_idx, group in enumerate(spec.groups):
        for _ in range(group.size):
            user = user_name(user_idx)
            truth[user] = group_idx
            rng = np.random.default_rng(seeds[user_idx])
            for day, offset, durations in _user_days(rng, spec, group):
                cursor = day * DAY_SECONDS + offset
                for loc in np.flatnonzero(durations):
                    dur = int(durations[loc])
                    records.append(
                        AssociationRecord(user, location_name(loc), cursor, cursor + dur)
                    )
                    cursor += dur
            user_idx += 1
    return records, truth


def single_location_modes(n_locations: int, locations: Sequence[int]) -> tuple[tuple[float, ...], ...]:
    """Convenience: unit basis mode vectors for the given location indices."""
    modes = []
    for loc in locations:
        vec = [0.0] * n_locations
        vec[loc] = 1.0
        modes.append(tuple(vec))
    return tuple(modes)
