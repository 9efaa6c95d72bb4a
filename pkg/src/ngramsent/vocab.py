"""Capped frequency-ranked n-gram vocabulary and bag featurization.

A vocabulary assigns dense ids to the most frequent n-grams of the
training split.  Ordering is by count descending with ties broken by the
n-gram string ascending (code-point order, which equals UTF-8 byte order),
so the id assignment is total and reproducible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .textproc import DEFAULT_MAX_N, extract_ngrams

DEFAULT_CAPACITY = 100_000

# A feature bag is the multiset of in-vocabulary n-gram ids of one text,
# in extraction order.
FeatureBag = list[int]


@dataclass
class NgramVocabulary:
    """Frequency-ranked n-gram table; id = position in `entries`."""

    entries: list[tuple[str, int]]
    max_n: int = DEFAULT_MAX_N
    capacity: int = DEFAULT_CAPACITY
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if len(self.entries) > self.capacity:
            raise ValueError("more entries than capacity")
        self.index = {gram: i for i, (gram, _) in enumerate(self.entries)}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, gram: str) -> bool:
        return gram in self.index


def count_ngrams(texts: list[list[str]], max_n: int = DEFAULT_MAX_N) -> Counter:
    """Count every n-gram occurrence (n up to max_n) across tokenized texts."""
    counts: Counter = Counter()
    for tokens in texts:
        counts.update(extract_ngrams(tokens, max_n))
    return counts


def vocabulary_from_counts(
    counts: Counter, max_n: int = DEFAULT_MAX_N, capacity: int = DEFAULT_CAPACITY
) -> NgramVocabulary:
    """Keep the top `capacity` n-grams under (count desc, gram asc)."""
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return NgramVocabulary(entries=ranked[:capacity], max_n=max_n, capacity=capacity)


def build_vocabulary(
    texts: list[list[str]],
    max_n: int = DEFAULT_MAX_N,
    capacity: int = DEFAULT_CAPACITY,
) -> NgramVocabulary:
    """Count n-grams over `texts` (the training split) and keep the top
    `capacity`."""
    return vocabulary_from_counts(count_ngrams(texts, max_n), max_n, capacity)


def featurize(tokens: list[str], vocab: NgramVocabulary) -> FeatureBag:
    """Ids of the text's in-vocabulary n-grams, multiplicity preserved.

    Out-of-vocabulary n-grams contribute nothing.
    """
    index = vocab.index
    bag: FeatureBag = []
    for gram in extract_ngrams(tokens, vocab.max_n):
        gid = index.get(gram)
        if gid is not None:
            bag.append(gid)
    return bag


def save_vocabulary(vocab: NgramVocabulary, path: str | Path) -> None:
    """Write ``ngram<TAB>count`` lines in id order (line number = id)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for gram, count in vocab.entries:
            fh.write(f"{gram}\t{count}\n")


def load_vocabulary(path: str | Path, max_n: int = DEFAULT_MAX_N) -> NgramVocabulary:
    """Read a vocabulary file written by :func:`save_vocabulary`."""
    path = Path(path)
    entries: list[tuple[str, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}: expected 2 fields at line {lineno}")
            gram, raw_count = fields
            try:
                count = int(raw_count)
            except ValueError:
                raise ValueError(f"{path}: bad count at line {lineno}") from None
            if count < 1:
                raise ValueError(f"{path}: non-positive count at line {lineno}")
            entries.append((gram, count))
    return NgramVocabulary(
        entries=entries, max_n=max_n, capacity=max(len(entries), 1)
    )
