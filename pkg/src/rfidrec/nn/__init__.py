"""Minimal neural-network engine: dense + 1-D conv layers, Adam, checkpoints."""

from .layers import Conv1d, Dense, Flatten, Network, ReLU, Softmax, layer_from_descriptor
from .losses import CROSS_ENTROPY, MSE, mean_squared_error, softmax_cross_entropy
from .optim import Adam
from .training import (TrainConfig, TrainResult, TrainingDiverged,
                       gradient_check, loss_and_grads, loss_value, train)
from .checkpoint import CheckpointError, load_network, save_network

__all__ = [
    "Conv1d", "Dense", "Flatten", "Network", "ReLU", "Softmax", "layer_from_descriptor",
    "CROSS_ENTROPY", "MSE", "mean_squared_error", "softmax_cross_entropy",
    "Adam",
    "TrainConfig", "TrainResult", "TrainingDiverged",
    "gradient_check", "loss_and_grads", "loss_value", "train",
    "CheckpointError", "load_network", "save_network",
]
