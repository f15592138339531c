"""Reading corpora and writing the tab-separated predictions file that
`revdetect evaluate` consumes."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

HEADER = ("id", "gold", "predicted", "p_ai")
LABELS = ("AI", "HUMAN")


@dataclass(frozen=True)
class Prediction:
    id: str
    predicted: str
    p_ai: float
    gold: Optional[str] = None

    def validate(self) -> None:
        if not self.id or any(c in self.id for c in "\t\r\n"):
            raise ValueError(f"invalid id {self.id!r}")
        if self.predicted not in LABELS:
            raise ValueError(f"{self.id}: predicted label {self.predicted!r} not in {LABELS}")
        if self.gold is not None and self.gold not in LABELS:
            raise ValueError(f"{self.id}: gold label {self.gold!r} not in {LABELS}")
        if not (0.0 <= self.p_ai <= 1.0) or math.isnan(self.p_ai):
            raise ValueError(f"{self.id}: p_ai {self.p_ai} outside [0, 1]")


def _find(header: List[str], name: str) -> Optional[int]:
    for i, h in enumerate(header):
        if h.strip().lstrip("﻿").lower() == name.lower():
            return i
    return None


def read_corpus(
    path, id_column="id", text_column="text", label_column="label"
) -> List[Tuple[str, str, Optional[str]]]:
    """Rows of (id, text, label or None) in file order. `.tsv` files are tab
    separated, everything else comma separated."""
    path = Path(path)
    delimiter = "\t" if path.suffix.lower() == ".tsv" else ","
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f, delimiter=delimiter))
    if not rows:
        raise ValueError(f"{path}: missing header")
    header, body = rows[0], rows[1:]
    id_i, text_i = _find(header, id_column), _find(header, text_column)
    label_i = _find(header, label_column)
    if id_i is None or text_i is None:
        raise ValueError(f"{path}: missing id or text column")
    out = []
    for row in body:
        if not any(row):
            continue
        label = row[label_i].strip().upper() if label_i is not None and row[label_i].strip() else None
        out.append((row[id_i].strip(), row[text_i], label))
    return out


def write_predictions(path, predictions: Iterable[Prediction]) -> None:
    lines = ["\t".join(HEADER)]
    for p in predictions:
        p.validate()
        lines.append(f"{p.id}\t{p.gold or ''}\t{p.predicted}\t{float(p.p_ai)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_predictions(path) -> List[Prediction]:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text:
        raise ValueError(f"{path}: missing header")
    header = text[0].split("\t")
    cols = {name: _find(header, name) for name in HEADER}
    for required in ("id", "predicted", "p_ai"):
        if cols[required] is None:
            raise ValueError(f"{path}: missing column {required}")
    out = []
    for line in text[1:]:
        if not line.strip():
            continue
        f = line.split("\t")
        gold = f[cols["gold"]].strip() if cols["gold"] is not None else ""
        p = Prediction(
            id=f[cols["id"]].strip(),
            predicted=f[cols["predicted"]].strip(),
            p_ai=float(f[cols["p_ai"]]),
            gold=gold or None,
        )
        p.validate()
        out.append(p)
    return out
