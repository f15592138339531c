"""Training entry points. Both produce a predictions file through
`write_predictions`; the model code itself is not part of this package."""

from .config import CnnBilstmConfig, FineTuneConfig


def fine_tune(config: FineTuneConfig, train_file, test_file, output_dir):
    config.checkpoint()
    raise NotImplementedError(
        "transformer fine-tuning is not bundled; write its test-set output with "
        "revdetect_neural.write_predictions and score it with `revdetect evaluate`"
    )


def train_cnn_bilstm(config: CnnBilstmConfig, train_file, test_file, output_dir):
    raise NotImplementedError(
        "the CNN+BiLSTM baseline is not bundled; write its test-set output with "
        "revdetect_neural.write_predictions and score it with `revdetect evaluate`"
    )
