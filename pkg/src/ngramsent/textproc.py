"""Text normalization, tokenization, and n-gram extraction."""

from __future__ import annotations

# Tokens produced by either mode never contain whitespace or '"', so
# joining n-grams on a single space is injective.
PRETOKENIZED = "pretokenized"
RULE_BASED = "rule_based"
TOKENIZER_MODES = (PRETOKENIZED, RULE_BASED)

DEFAULT_MAX_N = 2

_TRAILING_PUNCT = frozenset(".,!?;:")


def normalize(text: str) -> str:
    """Delete every '"' (U+0022) and lowercase the rest.

    Lowercasing is the Unicode *simple* per-character mapping, not the
    full one, so the result is one character per input character and does
    not depend on context (no final-sigma rule, and U+0130 maps to plain
    "i").  This keeps the mapping trivially portable.
    """
    text = text.replace('"', "")
    if text.isascii():
        return text.lower()
    return "".join("i" if c == "İ" else c.lower() for c in text)


def tokenize(text: str, mode: str = PRETOKENIZED) -> list[str]:
    """Split normalized text into tokens.

    ``pretokenized`` splits on whitespace runs and drops empties; it is
    the right mode for training data that already carries token
    boundaries.  ``rule_based`` additionally peels trailing sentence
    punctuation (``. , ! ? ; :``) off each token, one character per
    token, as a stand-in tokenizer for raw text.
    """
    words = text.split()
    if mode == PRETOKENIZED:
        return words
    if mode != RULE_BASED:
        raise ValueError(f"unknown tokenizer mode {mode!r}")
    tokens: list[str] = []
    for word in words:
        stem = word
        tail: list[str] = []
        while stem and stem[-1] in _TRAILING_PUNCT:
            tail.append(stem[-1])
            stem = stem[:-1]
        if stem:
            tokens.append(stem)
        tokens.extend(reversed(tail))
    return tokens


def extract_ngrams(tokens: list[str], max_n: int = DEFAULT_MAX_N) -> list[str]:
    """All contiguous n-grams for n = 1..max_n, joined by single spaces.

    Output order is (n, start position): every unigram first, then every
    bigram, and so on.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    grams: list[str] = []
    for n in range(1, max_n + 1):
        if n == 1:
            grams.extend(tokens)
        else:
            grams.extend(
                " ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
            )
    return grams
