"""Collision recovery for passive UHF-RFID inventory rounds.

Simulates framed-slotted-ALOHA tag collisions at complex baseband, estimates
how many tags collided (Gaussian-mixture clustering or small neural
classifiers), recovers per-tag channel gains from orthogonal pilots, splits
the collided payloads with a minimum-distance decoder, and measures the
resulting throughput against closed-form theory.
"""

__version__ = "0.1.0"

from .fsa import (FrameConfig, RecoveryCapability, SlotOccupancy, assign_slots,
                  expected_collision_slots, optimal_frame_ratio, theoretical_throughput)
from .baseband import (NoiseConfig, SlotSignal, SlotTruth, generate_rn16, ideal_levels,
                       sample_channel, snr_to_noise_power, symbol_average, synthesize_slot)
from .pilots import pilot_matrix
from .gmm import GmmFit, GmmParams, bic_score, fit_em
from .tagcount import (GmmTagCounter, NeuralTagCounter, TagCountEstimate, build_cnn_arch,
                       build_fnn_arch, cluster_count_to_tag_count, gmm_estimate_tag_count)
from .chanest import (LeastSquaresChannelEstimator, NeuralChannelEstimator,
                      build_channel_net, estimate_channels, ls_estimate)
from .decoder import DecodedSlot, DecodeScore, enumerate_levels, min_distance_decode, score_decode
from .datasets import (make_channel_dataset, make_count_dataset, read_slot_file,
                       synthesize_labeled_slot, write_slot_file)

__all__ = [
    "__version__",
    "FrameConfig", "RecoveryCapability", "SlotOccupancy", "assign_slots",
    "expected_collision_slots", "optimal_frame_ratio", "theoretical_throughput",
    "NoiseConfig", "SlotSignal", "SlotTruth", "generate_rn16", "ideal_levels",
    "sample_channel", "snr_to_noise_power", "symbol_average", "synthesize_slot",
    "pilot_matrix",
    "GmmFit", "GmmParams", "bic_score", "fit_em",
    "GmmTagCounter", "NeuralTagCounter", "TagCountEstimate", "build_cnn_arch",
    "build_fnn_arch", "cluster_count_to_tag_count", "gmm_estimate_tag_count",
    "LeastSquaresChannelEstimator", "NeuralChannelEstimator",
    "build_channel_net", "estimate_channels", "ls_estimate",
    "DecodedSlot", "DecodeScore", "enumerate_levels", "min_distance_decode", "score_decode",
    "make_channel_dataset", "make_count_dataset", "read_slot_file",
    "synthesize_labeled_slot", "write_slot_file",
]
