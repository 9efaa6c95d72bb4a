"""Robustness probing: single-token substitutions that knock in-vocabulary
bigrams out of the vocabulary and flip the ensemble's label.

The model only sees n-grams it kept at training time, so replacing one
word can silently delete the bigram evidence a prediction rests on.  The
probe searches every (position, substitute) combination exhaustively and
reports the ones that both destroy at least one in-vocabulary bigram and
flip the predicted label.
"""

from __future__ import annotations

from dataclasses import dataclass

from .inference import Ensemble, predict_tokens
from .textproc import extract_ngrams, normalize, tokenize
from .vocab import NgramVocabulary


@dataclass(frozen=True)
class ProbeResult:
    """One label-flipping substitution; `position` indexes the token that
    changed."""

    original: str
    perturbed: str
    position: int
    old_token: str
    new_token: str
    original_label: int
    perturbed_label: int
    destroyed_bigrams: tuple[str, ...]

    def tsv_row(self) -> str:
        return "\t".join(
            (
                str(self.position),
                self.old_token,
                self.new_token,
                str(self.original_label),
                str(self.perturbed_label),
                ",".join(self.destroyed_bigrams),
            )
        )


def _destroyed_bigrams(
    tokens: list[str], position: int, substitute: str, vocab: NgramVocabulary
) -> list[str]:
    """Original in-vocabulary bigrams at `position` whose replacement is OOV."""
    destroyed = []
    for j in (position - 1, position):
        if j < 0 or j + 1 >= len(tokens):
            continue
        old_pair = (tokens[j], tokens[j + 1])
        new_pair = (
            substitute if j == position else tokens[j],
            substitute if j + 1 == position else tokens[j + 1],
        )
        old_bigram = " ".join(old_pair)
        if old_bigram in vocab and " ".join(new_pair) not in vocab:
            destroyed.append(old_bigram)
    return destroyed


def oov_substitution_probe(
    ensemble: Ensemble,
    text: str,
    substitutes: list[str],
    mode: str | None = None,
) -> list[ProbeResult]:
    """Find single-token substitutions that break a prediction.

    For every token position and every candidate substitute, the
    perturbation is kept only if (a) at least one bigram that was
    in-vocabulary in the original text is out-of-vocabulary afterwards,
    and (b) the ensemble's label flips.  Results are ordered by
    (position, substitute); duplicate substitutes are collapsed.
    Substitutes must be single normalized tokens.
    """
    if not substitutes:
        raise ValueError("substitute lexicon is empty")
    for s in substitutes:
        if not s or any(c.isspace() for c in s) or '"' in s:
            raise ValueError(f"bad substitute token {s!r}")
    tokens = tokenize(normalize(text), mode or ensemble.tokenizer_mode)
    if not tokens:
        return []
    original = " ".join(tokens)
    original_label = predict_tokens(ensemble, tokens).label

    results: list[ProbeResult] = []
    for position, old_token in enumerate(tokens):
        for substitute in sorted(set(substitutes)):
            if substitute == old_token:
                continue
            destroyed = _destroyed_bigrams(tokens, position, substitute, ensemble.vocab)
            if not destroyed:
                continue
            perturbed_tokens = list(tokens)
            perturbed_tokens[position] = substitute
            perturbed_label = predict_tokens(ensemble, perturbed_tokens).label
            if perturbed_label == original_label:
                continue
            results.append(
                ProbeResult(
                    original=original,
                    perturbed=" ".join(perturbed_tokens),
                    position=position,
                    old_token=old_token,
                    new_token=substitute,
                    original_label=original_label,
                    perturbed_label=perturbed_label,
                    destroyed_bigrams=tuple(destroyed),
                )
            )
    return results


def coverage_report(vocab: NgramVocabulary, tokens: list[str]) -> tuple[int, int]:
    """(total n-grams, out-of-vocabulary n-grams) for one tokenized text.

    A high OOV share means the model is pooling over little or none of
    the text's evidence.
    """
    grams = extract_ngrams(tokens, vocab.max_n)
    oov = sum(1 for g in grams if g not in vocab)
    return len(grams), oov
