from dataclasses import dataclass

# Short names accepted by FineTuneConfig.model.
CHECKPOINTS = {
    "indic-bert": "ai4bharat/indic-bert",
    "indic-sbert": "l3cube-pune/indic-sentence-bert-nli",
    "muril": "google/muril-base-cased",
    "xlm-roberta": "xlm-roberta-base",
    "malayalam-bert": "l3cube-pune/malayalam-bert",
}


@dataclass(frozen=True)
class FineTuneConfig:
    model: str = "indic-sbert"
    max_length: int = 128
    batch_size: int = 16
    epochs: int = 3
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    train_fraction: float = 0.8
    seed: int = 42

    def checkpoint(self) -> str:
        try:
            return CHECKPOINTS[self.model]
        except KeyError:
            raise ValueError(
                f"unknown checkpoint {self.model!r}; expected one of {sorted(CHECKPOINTS)}"
            ) from None


@dataclass(frozen=True)
class CnnBilstmConfig:
    embedding_dim: int = 100
    conv_filters: int = 128
    kernel_size: int = 5
    lstm_units: int = 64
    dropout: float = 0.5
    dense_units: int = 64
    learning_rate: float = 1e-3
    epochs: int = 15
    batch_size: int = 32
    seed: int = 42
