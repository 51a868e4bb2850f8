"""Minimum-distance separation of collided payloads.

Given gain estimates, every payload symbol average is snapped to the nearest
of the 2^R ideal levels (maximum likelihood under white Gaussian noise, ties
to the lowest level index) and the winning sign pattern yields each tag's
bit. Scoring counts a tag as decoded only if all 16 payload bits match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baseband import PAYLOAD_LEN, SlotSignal, SlotTruth, ideal_levels, symbol_average

__all__ = ["DecodedSlot", "DecodeScore", "enumerate_levels", "min_distance_decode", "score_decode"]


@dataclass
class DecodedSlot:
    bits: np.ndarray           # (R, 16) int8 over {+1, -1}
    level_indices: np.ndarray  # (16,) chosen level per payload symbol, < 2^R
    gains: np.ndarray          # gains the level set was built from


@dataclass
class DecodeScore:
    per_tag: np.ndarray  # (true R,) bool, success per true tag
    decoded_count: int

    def capped(self, max_decodable: int) -> int:
        """Decoded tags credited under a J-tag-per-slot receiver limit."""
        return min(max_decodable, self.decoded_count)


def enumerate_levels(gains) -> tuple[np.ndarray, np.ndarray]:
    """All 2^R (level, sign pattern) pairs in canonical order."""
    return ideal_levels(gains)


def min_distance_decode(slot: SlotSignal, gains, correct_leakage: bool = False) -> DecodedSlot:
    """Per-symbol nearest-level decision on the symbol-averaged payload."""
    gains = np.asarray(gains, dtype=np.complex128)
    observations = symbol_average(slot, correct_leakage=correct_leakage)[slot.pilot_len:]
    levels, patterns = ideal_levels(gains)
    dist = np.abs(observations[:, None] - levels[None, :])
    idx = dist.argmin(axis=1)  # argmin takes the first (lowest) index on ties
    return DecodedSlot(bits=patterns[idx].T.copy(), level_indices=idx, gains=gains)


def _greedy_match(decoded_bits: np.ndarray, true_bits: np.ndarray) -> np.ndarray:
    """Best distinct true tag per decoded stream by bit agreement.

    Returns agreement counts indexed by true tag (-1 padded streams absent).
    Used when fewer streams were decoded than tags truly collided, where
    stream order need not line up with pilot rows.
    """
    n_dec, n_true = decoded_bits.shape[0], true_bits.shape[0]
    agreement = (decoded_bits @ true_bits.T + PAYLOAD_LEN) // 2  # matches out of 16
    matched = np.full(n_true, -1, dtype=np.int64)
    free_dec = set(range(n_dec))
    free_true = set(range(n_true))
    for _ in range(min(n_dec, n_true)):
        best = None
        for d in sorted(free_dec):
            for t in sorted(free_true):
                score = agreement[d, t]
                if best is None or score > best[0]:
                    best = (score, d, t)
        _, d, t = best
        matched[t] = agreement[d, t]
        free_dec.remove(d)
        free_true.remove(t)
    return matched


def score_decode(decoded: DecodedSlot, truth: SlotTruth) -> DecodeScore:
    """Per-true-tag success flags and the number of fully decoded tags.

    Tag identity is bound by pilot row, so when at least as many streams were
    decoded as truly collided, stream i is checked against true tag i and any
    surplus streams are ignored (they decode garbage). When too few streams
    were decoded, each stream is greedily matched to its best distinct true
    tag so undercounting is penalized once, not twice.
    """
    true_bits = truth.bits.astype(np.int64)
    dec_bits = decoded.bits.astype(np.int64)
    n_true, n_dec = true_bits.shape[0], dec_bits.shape[0]
    if n_dec >= n_true:
        per_tag = (dec_bits[:n_true] == true_bits).all(axis=1)
    else:
        matched = _greedy_match(dec_bits, true_bits)
        per_tag = matched == PAYLOAD_LEN
    return DecodeScore(per_tag=per_tag, decoded_count=int(per_tag.sum()))
