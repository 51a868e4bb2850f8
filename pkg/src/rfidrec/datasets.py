"""Slot dataset synthesis and the binary slot-file format.

File layout (all little-endian):
  header: magic b"RFSL" | u32 version | u32 tag_count (0 = mixed)
          | u64 record count | u32 oversampling | f64 snr_db
  record: (20 * oversampling) complex64 samples (interleaved float32 re/im)
          | u8 tag_count R | 2R float32 gain re/im pairs
          | R x 2 bytes payload bits packed MSB-first (bit 1 = symbol +1)
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baseband import (PAYLOAD_LEN, SLOT_SYMBOLS, NoiseConfig, SlotSignal, SlotTruth,
                       generate_rn16, sample_channel, symbol_average, synthesize_slot)
from .pilots import PILOT_LEN
from .rng import derive_rng

MAGIC = b"RFSL"
VERSION = 1

__all__ = ["SlotFileHeader", "synthesize_labeled_slot", "make_count_dataset",
           "make_channel_dataset", "write_slot_file", "read_slot_file"]


@dataclass(frozen=True)
class SlotFileHeader:
    tag_count: int  # 0 when records mix tag counts
    count: int
    oversampling: int
    snr_db: float


class SlotFileError(RuntimeError):
    pass


def synthesize_labeled_slot(tag_count: int, noise: NoiseConfig, oversampling: int, rng) -> SlotSignal:
    """Random gains + random payloads -> one slot, all draws from `rng`."""
    gains = sample_channel(tag_count, rng)
    bits = np.stack([generate_rn16(rng) for _ in range(tag_count)])
    return synthesize_slot(tag_count, gains, bits, noise, oversampling, rng)


def make_count_dataset(samples_per_class: int, snr_db: float, oversampling: int = 8,
                       seed: int = 0, include_pilots: bool = True,
                       symbol_averaged: bool = False, leakage: complex = 0j):
    """Balanced labeled slots for the tag-count task.

    Returns (X, y): X complex (4*samples_per_class, slot_len), y in {1..4}.
    Slot i of class r is reproducible from (seed, r, i) alone. By default the
    classifier sees the full raw slot; pilots can be dropped or the slot
    reduced to its 20 symbol averages for ablations.
    """
    noise = NoiseConfig(snr_db=snr_db, leakage=leakage)
    slot_len = SLOT_SYMBOLS if symbol_averaged else SLOT_SYMBOLS * oversampling
    pilot_len = PILOT_LEN if symbol_averaged else PILOT_LEN * oversampling
    if not include_pilots:
        slot_len -= pilot_len
    x = np.empty((4 * samples_per_class, slot_len), dtype=np.complex128)
    y = np.empty(4 * samples_per_class, dtype=np.int64)
    row = 0
    for tag_count in range(1, 5):
        for i in range(samples_per_class):
            slot = synthesize_labeled_slot(tag_count, noise, oversampling,
                                           derive_rng(seed, tag_count, i))
            samples = symbol_average(slot) if symbol_averaged else slot.samples
            x[row] = samples[pilot_len:] if not include_pilots else samples
            y[row] = tag_count
            row += 1
    return x, y


def make_channel_dataset(tag_count: int, n_samples: int, snr_db: float,
                         oversampling: int = 8, seed: int = 0, leakage: complex = 0j):
    """Pilot observations and true gains for the channel-regression task.

    Returns (pilot_obs complex (n, 4), gains complex (n, tag_count)).
    """
    noise = NoiseConfig(snr_db=snr_db, leakage=leakage)
    obs = np.empty((n_samples, PILOT_LEN), dtype=np.complex128)
    gains = np.empty((n_samples, tag_count), dtype=np.complex128)
    correct = leakage != 0
    for i in range(n_samples):
        slot = synthesize_labeled_slot(tag_count, noise, oversampling,
                                       derive_rng(seed, tag_count, i))
        obs[i] = symbol_average(slot, correct_leakage=correct)[:PILOT_LEN]
        gains[i] = slot.truth.gains
    return obs, gains


def _pack_bits(bits: np.ndarray) -> bytes:
    # +1 -> bit 1, -1 -> bit 0, MSB first, 2 bytes per tag
    return np.packbits((bits > 0).astype(np.uint8), axis=1, bitorder="big").tobytes()


def _unpack_bits(raw: bytes, tag_count: int) -> np.ndarray:
    packed = np.frombuffer(raw, dtype=np.uint8).reshape(tag_count, 2)
    bits = np.unpackbits(packed, axis=1, bitorder="big")[:, :PAYLOAD_LEN]
    return (2 * bits.astype(np.int8) - 1)


def write_slot_file(path, slots: list[SlotSignal], snr_db: float) -> None:
    """Serialize slots (with truth) into the binary slot-file format."""
    if not slots:
        raise SlotFileError("refusing to write an empty slot file")
    oversampling = slots[0].oversampling
    tag_counts = {s.truth.tag_count for s in slots}
    header_r = tag_counts.pop() if len(tag_counts) == 1 else 0
    parts = [MAGIC, struct.pack("<IIQId", VERSION, header_r, len(slots), oversampling,
                                float(snr_db))]
    for slot in slots:
        if slot.oversampling != oversampling:
            raise SlotFileError("all slots in one file must share the oversampling factor")
        if slot.truth is None:
            raise SlotFileError("slot files require ground-truth metadata")
        r = slot.truth.tag_count
        parts.append(np.ascontiguousarray(slot.samples.astype("<c8")).tobytes())
        parts.append(struct.pack("<B", r))
        gains = np.empty(2 * r, dtype="<f4")
        gains[0::2] = slot.truth.gains.real
        gains[1::2] = slot.truth.gains.imag
        parts.append(gains.tobytes())
        parts.append(_pack_bits(slot.truth.bits))
    Path(path).write_bytes(b"".join(parts))


def read_slot_file(path) -> tuple[list[SlotSignal], SlotFileHeader]:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise SlotFileError(f"{path}: not a slot file (bad magic)")
    version, header_r, count, oversampling, snr_db = struct.unpack_from("<IIQId", raw, 4)
    if version != VERSION:
        raise SlotFileError(f"{path}: unsupported version {version}")
    offset = 4 + struct.calcsize("<IIQId")
    n_samples = SLOT_SYMBOLS * oversampling
    slots = []
    for _ in range(count):
        samples = np.frombuffer(raw, dtype="<c8", count=n_samples, offset=offset).astype(np.complex128)
        offset += 8 * n_samples
        (r,) = struct.unpack_from("<B", raw, offset)
        offset += 1
        flat = np.frombuffer(raw, dtype="<f4", count=2 * r, offset=offset).astype(np.float64)
        offset += 8 * r
        gains = flat[0::2] + 1j * flat[1::2]
        bits = _unpack_bits(raw[offset:offset + 2 * r], r)
        offset += 2 * r
        truth = SlotTruth(tag_count=r, gains=gains, bits=bits)
        slots.append(SlotSignal(samples=samples, oversampling=oversampling, truth=truth))
    if offset != len(raw):
        raise SlotFileError(f"{path}: {len(raw) - offset} trailing bytes")
    return slots, SlotFileHeader(tag_count=header_r, count=count,
                                 oversampling=oversampling, snr_db=snr_db)
