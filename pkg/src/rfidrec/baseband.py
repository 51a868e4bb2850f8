"""Complex-baseband synthesis of one inventory slot.

A slot carries, per colliding tag, 4 pilot symbols followed by the 16-bit
random payload, on-off keyed to +/-1 symbols. Tags are symbol-synchronous;
each symbol is a rectangular pulse realized as `oversampling` identical
samples. The receiver sees the gain-weighted sum of the tag signals plus an
optional constant leakage term and circularly-symmetric white Gaussian
noise. With unit-variance Rayleigh gains and unit symbol energy, an SNR of
`s` dB corresponds to a noise power of 10**(-s/10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pilots import PILOT_LEN, pilot_matrix
from .rng import as_rng

PAYLOAD_LEN = 16
SLOT_SYMBOLS = PILOT_LEN + PAYLOAD_LEN

__all__ = [
    "PAYLOAD_LEN",
    "SLOT_SYMBOLS",
    "NoiseConfig",
    "SlotTruth",
    "SlotSignal",
    "snr_to_noise_power",
    "sample_channel",
    "generate_rn16",
    "synthesize_slot",
    "symbol_average",
    "ideal_levels",
]


@dataclass(frozen=True)
class NoiseConfig:
    """Receiver impairments: SNR in dB (math.inf = noiseless) and a complex
    carrier-leakage offset added to every sample."""

    snr_db: float = math.inf
    leakage: complex = 0j

    def __post_init__(self):
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if not (math.isfinite(self.leakage.real) and math.isfinite(self.leakage.imag)):
            raise ValueError("leakage must be finite")


@dataclass(frozen=True)
class SlotTruth:
    """Ground truth attached to a synthesized slot for training/scoring."""

    tag_count: int
    gains: np.ndarray  # (R,) complex
    bits: np.ndarray   # (R, 16) int8 over {+1, -1}


@dataclass(frozen=True)
class SlotSignal:
    """Received samples of one slot plus framing metadata."""

    samples: np.ndarray  # ((pilot_len+payload_len)*oversampling,) complex
    oversampling: int
    pilot_len: int = PILOT_LEN
    payload_len: int = PAYLOAD_LEN
    truth: SlotTruth | None = field(default=None, compare=False)

    def __post_init__(self):
        expect = (self.pilot_len + self.payload_len) * self.oversampling
        if self.samples.shape != (expect,):
            raise ValueError(f"expected {expect} samples, got {self.samples.shape}")

    @property
    def payload_samples(self) -> np.ndarray:
        return self.samples[self.pilot_len * self.oversampling:]

    @property
    def pilot_samples(self) -> np.ndarray:
        return self.samples[: self.pilot_len * self.oversampling]


def snr_to_noise_power(snr_db: float) -> float:
    """Noise power N0 for unit-mean-square signal levels."""
    return 10.0 ** (-snr_db / 10.0)


def sample_channel(tag_count: int, seed) -> np.ndarray:
    """Draw i.i.d. CN(0, 1) composite gains, one per colliding tag."""
    if not 1 <= tag_count <= 4:
        raise ValueError(f"tag_count must be in [1, 4], got {tag_count}")
    rng = as_rng(seed)
    z = rng.standard_normal((tag_count, 2))
    return (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)


def generate_rn16(seed) -> np.ndarray:
    """One tag's 16-bit random payload as +/-1 symbols (1=reflect, -1=absorb)."""
    rng = as_rng(seed)
    return (2 * rng.integers(0, 2, size=PAYLOAD_LEN) - 1).astype(np.int8)


def synthesize_slot(
    tag_count: int,
    gains: np.ndarray,
    payload_bits: np.ndarray,
    noise: NoiseConfig = NoiseConfig(),
    oversampling: int = 8,
    seed=None,
) -> SlotSignal:
    """Build the received complex-baseband sample sequence of one slot.

    Pilot row i is prepended to tag i's payload, every symbol is replicated
    `oversampling` times, and the tag signals are combined with the complex
    gains before leakage and per-sample CN(0, N0) noise are added.
    """
    gains = np.asarray(gains, dtype=np.complex128)
    payload_bits = np.asarray(payload_bits, dtype=np.int8)
    if gains.shape != (tag_count,):
        raise ValueError(f"expected {tag_count} gains, got shape {gains.shape}")
    if payload_bits.shape != (tag_count, PAYLOAD_LEN):
        raise ValueError(
            f"expected payload bits of shape ({tag_count}, {PAYLOAD_LEN}), got {payload_bits.shape}"
        )
    if oversampling < 1:
        raise ValueError("oversampling must be >= 1")

    symbols = np.hstack([pilot_matrix(tag_count), payload_bits])  # (R, 20)
    pulses = np.repeat(symbols, oversampling, axis=1)             # (R, 20*os)
    samples = gains @ pulses.astype(np.float64) + noise.leakage

    n0 = snr_to_noise_power(noise.snr_db)
    if n0 > 0.0:
        rng = as_rng(seed)
        w = rng.standard_normal((samples.size, 2))
        samples = samples + math.sqrt(n0 / 2.0) * (w[:, 0] + 1j * w[:, 1])

    truth = SlotTruth(tag_count=tag_count, gains=gains, bits=payload_bits)
    return SlotSignal(samples=samples, oversampling=oversampling, truth=truth)


def symbol_average(slot: SlotSignal, correct_leakage: bool = False) -> np.ndarray:
    """Average each symbol's oversampled chunk down to one observation.

    Cuts additive-noise variance by the oversampling factor and leaves the
    noiseless level values untouched. With `correct_leakage`, the mean of the
    payload samples (payload symbols are zero-mean) is subtracted from the
    whole slot first, removing a constant carrier-leakage offset.
    """
    samples = slot.samples
    if correct_leakage:
        samples = samples - slot.payload_samples.mean()
    n_symbols = slot.pilot_len + slot.payload_len
    return samples.reshape(n_symbols, slot.oversampling).mean(axis=1)


def ideal_levels(gains: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All 2^R noiseless signal levels and their +/-1 sign patterns.

    Level j corresponds to the binary expansion of j with tag 0 as the most
    significant digit; digit 0 means the tag transmits +1. For two tags the
    order is (h1+h2, h1-h2, -h1+h2, -h1-h2).
    """
    gains = np.asarray(gains, dtype=np.complex128)
    r = gains.size
    if not 1 <= r <= 4:
        raise ValueError(f"need 1..4 gains, got {r}")
    idx = np.arange(2**r)[:, None]
    shifts = r - 1 - np.arange(r)[None, :]
    patterns = (1 - 2 * ((idx >> shifts) & 1)).astype(np.int8)  # (2^R, R)
    levels = patterns @ gains
    return levels, patterns
