"""Framed slotted ALOHA analytics and slot assignment.

Closed-form expressions for the expected number of slots holding a given
number of colliding tags, the throughput of a receiver that can resolve up
to `max_resolvable` tags and decode up to `max_decodable` of them per slot,
and a grid search for the throughput-optimal frame size. A discrete
simulator (`assign_slots`) realizes one frame of uniform random slot
choices for Monte Carlo work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import as_rng

__all__ = [
    "FrameConfig",
    "RecoveryCapability",
    "SlotOccupancy",
    "expected_collision_slots",
    "theoretical_throughput",
    "optimal_frame_ratio",
    "assign_slots",
]


@dataclass(frozen=True)
class FrameConfig:
    """One frame: `tag_count` tags choosing among `slot_count` slots."""

    tag_count: int
    slot_count: int

    def __post_init__(self):
        if self.tag_count < 1:
            raise ValueError(f"tag_count must be >= 1, got {self.tag_count}")
        if self.slot_count < 1:
            raise ValueError(f"slot_count must be >= 1, got {self.slot_count}")


@dataclass(frozen=True)
class RecoveryCapability:
    """Receiver limits: resolve up to `max_resolvable` colliding tags,
    decode at most `max_decodable` of them per slot."""

    max_resolvable: int
    max_decodable: int

    def __post_init__(self):
        if not (1 <= self.max_decodable <= self.max_resolvable <= 4):
            raise ValueError(
                "need 1 <= max_decodable <= max_resolvable <= 4, got "
                f"J={self.max_decodable}, M={self.max_resolvable}"
            )


class SlotOccupancy:
    """Realized slot choices of one frame: tag i sits in slot_of_tag[i]."""

    def __init__(self, slot_of_tag: np.ndarray, slot_count: int):
        slot_of_tag = np.asarray(slot_of_tag, dtype=np.int64)
        if slot_of_tag.ndim != 1:
            raise ValueError("slot_of_tag must be 1-D")
        if slot_of_tag.size and not (0 <= slot_of_tag.min() and slot_of_tag.max() < slot_count):
            raise ValueError("slot indices out of range")
        self.slot_of_tag = slot_of_tag
        self.slot_count = int(slot_count)

    @property
    def tag_count(self) -> int:
        return self.slot_of_tag.size

    def slot_counts(self) -> np.ndarray:
        """Number of tags per slot, length slot_count."""
        return np.bincount(self.slot_of_tag, minlength=self.slot_count)

    def tags_in_slot(self, slot: int) -> np.ndarray:
        return np.flatnonzero(self.slot_of_tag == slot)

    def slots(self) -> list[np.ndarray]:
        """Per-slot tag id arrays (index = slot)."""
        order = np.argsort(self.slot_of_tag, kind="stable")
        bounds = np.searchsorted(self.slot_of_tag[order], np.arange(self.slot_count + 1))
        return [order[bounds[k]:bounds[k + 1]] for k in range(self.slot_count)]


def _log_expected(n: int, k: int, r: int) -> float:
    """log of K * C(N,R) * (1/K)^R * (1-1/K)^(N-R), -inf when the value is 0.

    Computed in log space so N up to 1e6 stays finite; the degenerate
    (1-1/K)^0 factor at K=1 is taken as 1 (0^0 convention).
    """
    log_binom = math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)
    out = math.log(k) + log_binom - r * math.log(k)
    if n - r > 0:
        if k == 1:
            return -math.inf
        out += (n - r) * math.log1p(-1.0 / k)
    return out


def expected_collision_slots(cfg: FrameConfig, r: int) -> float:
    """Expected number of slots occupied by exactly `r` tags in one frame."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r > cfg.tag_count:
        raise ValueError(f"r={r} exceeds tag_count={cfg.tag_count}")
    return math.exp(_log_expected(cfg.tag_count, cfg.slot_count, r))


def theoretical_throughput(cfg: FrameConfig, cap: RecoveryCapability) -> float:
    """Expected decoded tags per slot under the given recovery capability.

    Slots with r <= max_decodable yield all r tags, slots with
    max_decodable < r <= max_resolvable yield max_decodable tags, heavier
    collisions yield nothing.
    """
    n, k = cfg.tag_count, cfg.slot_count
    j, m = cap.max_decodable, cap.max_resolvable
    total = 0.0
    for r in range(1, min(m, n) + 1):
        yield_per_slot = r if r <= j else j
        total += yield_per_slot * math.exp(_log_expected(n, k, r))
    return total / k


def optimal_frame_ratio(cap: RecoveryCapability, n_tags: int) -> tuple[float, float]:
    """Grid-search the integer frame size maximizing throughput.

    Searches slot counts in [max(1, n_tags/20), 4*n_tags] and returns
    (best_slot_count / n_tags, best_throughput). Meaningful for n_tags large
    enough that integer granularity is negligible (>= 100 recommended).
    """
    k_lo = max(1, round(n_tags / 20))
    k_hi = 4 * n_tags
    best_k, best_t = k_lo, -1.0
    for k in range(k_lo, k_hi + 1):
        t = theoretical_throughput(FrameConfig(n_tags, k), cap)
        if t > best_t:
            best_k, best_t = k, t
    return best_k / n_tags, best_t


def assign_slots(cfg: FrameConfig, seed) -> SlotOccupancy:
    """Each tag independently picks a slot uniformly at random."""
    rng = as_rng(seed)
    choice = rng.integers(0, cfg.slot_count, size=cfg.tag_count)
    return SlotOccupancy(choice, cfg.slot_count)
