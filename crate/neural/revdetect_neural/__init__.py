"""Neural baselines that exchange predictions with the revdetect CLI."""

from .config import CHECKPOINTS, CnnBilstmConfig, FineTuneConfig
from .interchange import (
    HEADER,
    LABELS,
    Prediction,
    read_corpus,
    read_predictions,
    write_predictions,
)
from .train import fine_tune, train_cnn_bilstm

__all__ = [
    "CHECKPOINTS",
    "CnnBilstmConfig",
    "FineTuneConfig",
    "HEADER",
    "LABELS",
    "Prediction",
    "read_corpus",
    "read_predictions",
    "write_predictions",
    "fine_tune",
    "train_cnn_bilstm",
]
