"""Serving-satellite selection policies.

Random selection draws from a counter-style keyed generator (splitmix64
finalizer over ``(seed, user_index, step_index)``) so any execution order,
blocking, or thread count reproduces the same choice stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RelativeGeometry

_C1 = np.uint64(0x9E3779B97F4A7C15)
_C2 = np.uint64(0xBF58476D1CE4E5B9)
_C3 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class SelectionPolicy:
    kind: str = "closest"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("closest", "random"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random policy requires a seed")


_M64 = (1 << 64) - 1


def _mix_int(z: int) -> int:
    """splitmix64 finalizer on python ints (wraps mod 2^64)."""
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _mix(z: np.ndarray) -> np.ndarray:
    # array form of _mix_int; uint64 arithmetic wraps by design
    z = z + _C1
    z = (z ^ (z >> np.uint64(30))) * _C2
    z = (z ^ (z >> np.uint64(27))) * _C3
    return z ^ (z >> np.uint64(31))


def keyed_uniform(seed: int, user_index: int, step_index) -> np.ndarray | float:
    """Uniform [0, 1) draw(s) fully determined by (seed, user, step)."""
    key = _mix_int(_mix_int(seed & _M64) + (user_index & _M64))
    if np.isscalar(step_index):
        h = _mix_int((key + int(step_index)) & _M64)
        return (h >> 11) * (2.0**-53)
    steps = np.asarray(step_index, dtype=np.uint64)
    h = _mix(np.uint64(key) + steps)
    return (h >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def select_serving(
    visible: list[tuple[int, RelativeGeometry]],
    policy: SelectionPolicy,
    step_index: int,
    user_index: int,
) -> int | None:
    """Pick the serving satellite id among the visible set, or None.

    Closest: minimum range, ties to the lowest id. Random: uniform draw
    keyed by (seed, user, step) over the set sorted by id, so the result
    does not depend on list order.
    """
    if not visible:
        return None
    if policy.kind == "closest":
        return min(visible, key=lambda sv: (sv[1].range_km, sv[0]))[0]
    ids = sorted(sid for sid, _ in visible)
    u = keyed_uniform(policy.seed, user_index, step_index)
    return ids[min(int(u * len(ids)), len(ids) - 1)]


def serving_rows(
    vis: np.ndarray,
    rng_km: np.ndarray | None,
    policy: SelectionPolicy,
    user_index: int,
    step_indices: np.ndarray,
) -> np.ndarray:
    """Vector form over a visibility block.

    vis: (S, B) boolean, rows ordered by satellite id; rng_km (S, B) needed
    for the closest policy. Returns the serving row per step, -1 when the
    column is empty. Matches :func:`select_serving` per column.
    """
    any_vis = vis.any(axis=0)
    if policy.kind == "closest":
        masked = np.where(vis, rng_km, np.inf)
        rows = np.argmin(masked, axis=0)  # first minimum = lowest id on ties
    else:
        counts = vis.sum(axis=0)
        u = keyed_uniform(policy.seed, user_index, step_indices)
        j = np.minimum((u * counts).astype(np.int64), np.maximum(counts - 1, 0))
        csum = np.cumsum(vis, axis=0)
        sel = vis & (csum == (j + 1)[None, :])
        rows = np.argmax(sel, axis=0)
    return np.where(any_vis, rows, -1)
