"""Accuracy, per-class precision/recall/F1, and the broken-pair rate.

Pair files are TSV with four columns: ``gold_a<TAB>text_a<TAB>gold_b<TAB>text_b``.
A pair counts as broken when the classifier is correct on exactly one of
its two sides; both-correct and both-wrong pairs are not broken.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .corpus import NEGATIVE, POSITIVE


@dataclass(frozen=True)
class MinimalPair:
    text_a: str
    text_b: str
    gold_a: int
    gold_b: int


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricsReport:
    accuracy: float
    per_class: dict[int, ClassScores]
    macro_f1: float
    broken_rate: float | None = None

    def to_dict(self) -> dict:
        out = {
            "accuracy": self.accuracy,
            "per_class": {
                str(label): {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                }
                for label, s in self.per_class.items()
            },
            "macro_f1": self.macro_f1,
        }
        if self.broken_rate is not None:
            out["broken_rate"] = self.broken_rate
        return out


def _check_labels(preds: Sequence[int], golds: Sequence[int]) -> None:
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predictions vs {len(golds)} golds")
    if not preds:
        raise ValueError("cannot score an empty prediction list")
    for value in (*preds, *golds):
        if value not in (NEGATIVE, POSITIVE):
            raise ValueError(f"label must be -1 or +1, got {value}")


def accuracy(preds: Sequence[int], golds: Sequence[int]) -> float:
    """Fraction of positions where the prediction equals the gold label."""
    _check_labels(preds, golds)
    return sum(p == g for p, g in zip(preds, golds)) / len(preds)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def f1_report(preds: Sequence[int], golds: Sequence[int]) -> MetricsReport:
    """Per-class precision/recall/F1 plus the macro F1 (mean of the two
    class F1 scores).  Degenerate 0/0 ratios score 0."""
    _check_labels(preds, golds)
    per_class: dict[int, ClassScores] = {}
    for c in (NEGATIVE, POSITIVE):
        tp = sum(1 for p, g in zip(preds, golds) if p == c and g == c)
        fp = sum(1 for p, g in zip(preds, golds) if p == c and g != c)
        fn = sum(1 for p, g in zip(preds, golds) if p != c and g == c)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2.0 * precision * recall, precision + recall)
        per_class[c] = ClassScores(precision, recall, f1)
    macro = (per_class[NEGATIVE].f1 + per_class[POSITIVE].f1) / 2.0
    return MetricsReport(
        accuracy=accuracy(preds, golds), per_class=per_class, macro_f1=macro
    )


def broken_rate(
    pairs: Sequence[MinimalPair], classify: Callable[[str], int]
) -> float:
    """Fraction of pairs where exactly one side is classified correctly."""
    if not pairs:
        raise ValueError("cannot score an empty pair list")
    broken = 0
    for pair in pairs:
        ok_a = classify(pair.text_a) == pair.gold_a
        ok_b = classify(pair.text_b) == pair.gold_b
        if ok_a != ok_b:
            broken += 1
    return broken / len(pairs)


def load_pairs(path: str | Path) -> list[MinimalPair]:
    """Read a minimal-pair TSV file (format in the module docstring)."""
    path = Path(path)
    pairs: list[MinimalPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError(
                    f"{path}: expected 4 tab-separated fields at line {lineno}, "
                    f"got {len(fields)}"
                )
            raw_a, text_a, raw_b, text_b = fields
            try:
                gold_a, gold_b = int(raw_a), int(raw_b)
            except ValueError:
                raise ValueError(f"{path}: non-integer gold label at line {lineno}") from None
            if gold_a not in (NEGATIVE, POSITIVE) or gold_b not in (NEGATIVE, POSITIVE):
                raise ValueError(f"{path}: gold label out of range at line {lineno}")
            pairs.append(MinimalPair(text_a=text_a, text_b=text_b,
                                     gold_a=gold_a, gold_b=gold_b))
    return pairs
