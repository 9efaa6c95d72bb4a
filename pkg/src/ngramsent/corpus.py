"""Corpus ingestion, binary filtering, and the deterministic train/valid split.

Input files are TSV with three columns per line: ``label<TAB>confidence<TAB>text``
(UTF-8, LF line endings, no header).  Labels are -1, 0, or +1; 0 marks a
neutral phrase.  Confidence is parsed and kept on the record but nothing
downstream consumes it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

from .rng import SplitMix64, fisher_yates

NEGATIVE = -1
POSITIVE = 1

# Reference corpus split: applies only when the filtered corpus is at
# least this large, otherwise callers must choose counts explicitly.
DEFAULT_TRAIN_COUNT = 160_000
DEFAULT_VALID_COUNT = 10_000
DEFAULT_SPLIT_THRESHOLD = 170_000


class Kind(enum.Enum):
    SENTENCE = "sentence"
    PHRASE = "phrase"


@dataclass(frozen=True)
class Example:
    """One labeled text unit."""

    text: str
    label: int
    confidence: float
    kind: Kind


@dataclass(frozen=True)
class SplitSpec:
    """Shuffle seed plus how many shuffled items go to train and valid."""

    seed: int
    train_count: int
    valid_count: int

    def __post_init__(self):
        if self.train_count < 0 or self.valid_count < 0:
            raise ValueError("split counts must be non-negative")


def label_to_class(label: int) -> int:
    """Map a sentiment label to a softmax class index (-1 -> 0, +1 -> 1)."""
    if label == NEGATIVE:
        return 0
    if label == POSITIVE:
        return 1
    raise ValueError(f"label must be -1 or +1, got {label}")


def class_to_label(cls: int) -> int:
    """Inverse of :func:`label_to_class`."""
    if cls == 0:
        return NEGATIVE
    if cls == 1:
        return POSITIVE
    raise ValueError(f"class must be 0 or 1, got {cls}")


def load_examples(path: str | Path, kind: Kind) -> list[Example]:
    """Load one Example per non-empty line of a labeled TSV file.

    Neutral (label 0) rows are kept here; use :func:`filter_binary` to drop
    them.  Malformed rows raise ValueError naming the offending line.
    """
    path = Path(path)
    examples: list[Example] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\r\n")
                if not line:
                    continue
                examples.append(_parse_row(line, path, lineno, kind))
    except UnicodeDecodeError as exc:
        raise ValueError(f"{path}: not valid UTF-8 ({exc})") from exc
    return examples


def _parse_row(line: str, path: Path, lineno: int, kind: Kind) -> Example:
    fields = line.split("\t")
    if len(fields) != 3:
        raise ValueError(
            f"{path}: expected 3 tab-separated fields at line {lineno}, "
            f"got {len(fields)}"
        )
    raw_label, raw_conf, text = fields
    try:
        label = int(raw_label)
    except ValueError:
        raise ValueError(f"{path}: non-integer label at line {lineno}") from None
    if label not in (-1, 0, 1):
        raise ValueError(f"{path}: label out of range at line {lineno}")
    try:
        confidence = float(raw_conf)
    except ValueError:
        raise ValueError(f"{path}: non-numeric confidence at line {lineno}") from None
    if not 0.0 <= confidence <= 1.0:
        raise ValueError(f"{path}: confidence outside [0, 1] at line {lineno}")
    if not text.strip():
        raise ValueError(f"{path}: empty text at line {lineno}")
    return Example(text=text, label=label, confidence=confidence, kind=kind)


def filter_binary(examples: list[Example]) -> list[Example]:
    """Keep only examples labeled -1 or +1, preserving order."""
    return [ex for ex in examples if ex.label in (NEGATIVE, POSITIVE)]


def shuffle_split(
    examples: list[Example], spec: SplitSpec
) -> tuple[list[Example], list[Example]]:
    """Shuffle deterministically, then cut off train and valid portions.

    The shuffle is Fisher-Yates driven by splitmix64 seeded with
    ``spec.seed``.  Train is the first ``train_count`` shuffled items and
    valid is the *last* ``valid_count``; anything in between is discarded.
    """
    if spec.train_count + spec.valid_count > len(examples):
        raise ValueError(
            f"split wants {spec.train_count}+{spec.valid_count} examples "
            f"but only {len(examples)} are available"
        )
    shuffled = fisher_yates(examples, SplitMix64(spec.seed))
    train = shuffled[: spec.train_count]
    valid = shuffled[len(shuffled) - spec.valid_count :] if spec.valid_count else []
    return train, valid
