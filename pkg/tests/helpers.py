"""Shared test utilities: synthetic corpora, stub parameters, and the
finite-difference gradient oracle."""

from __future__ import annotations

import random

import numpy as np

from ngramsent.corpus import label_to_class
from ngramsent.model import ModelParams, cross_entropy, forward
from ngramsent.textproc import normalize, tokenize
from ngramsent.vocab import featurize

# Five trigger words decide the synthetic label; everything else is filler.
KEYWORDS = ("superb", "delight", "gem", "triumph", "charm")
FILLERS = tuple(f"w{i:02d}" for i in range(40))


def keyword_rows(rnd: random.Random, n: int) -> list[tuple[str, int]]:
    """(text, label) rows where label +1 means exactly one keyword present."""
    rows = []
    for _ in range(n):
        tokens = [rnd.choice(FILLERS) for _ in range(rnd.randint(3, 7))]
        if rnd.random() < 0.5:
            tokens.insert(rnd.randrange(len(tokens) + 1), rnd.choice(KEYWORDS))
            label = 1
        else:
            label = -1
        rows.append((" ".join(tokens), label))
    return rows


def featurize_rows(rows, vocab):
    return [
        (featurize(tokenize(normalize(text)), vocab), label_to_class(label))
        for text, label in rows
    ]


def make_params(E, W1, b1, W2, b2, dtype=np.float32) -> ModelParams:
    return ModelParams(
        E=np.asarray(E, dtype=dtype),
        W1=np.asarray(W1, dtype=dtype),
        b1=np.asarray(b1, dtype=dtype),
        W2=np.asarray(W2, dtype=dtype),
        b2=np.asarray(b2, dtype=dtype),
    )


def numeric_gradients(params: ModelParams, bag, y: int, step: float = 1e-5):
    """Central finite differences of the loss over every parameter element.

    Perturbs the (float64) parameter tensors in place and restores them,
    running the real forward pass for each evaluation.  Independent of
    `backward`.
    """
    def loss() -> float:
        return cross_entropy(forward(params, bag).p, y)

    grads = {}
    for name, tensor in params.tensors():
        g = np.zeros_like(tensor)
        flat, gflat = tensor.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + step
            up = loss()
            flat[i] = saved - step
            down = loss()
            flat[i] = saved
            gflat[i] = (up - down) / (2.0 * step)
        grads[name] = g
    return grads


def dense_analytic_gradients(params: ModelParams, bag, y: int):
    """`backward`'s output with the sparse embedding rows scattered into a
    dense matrix, for elementwise comparison against the oracle."""
    from ngramsent.model import backward

    g = backward(params, forward(params, bag), y)
    dE = np.zeros_like(params.E)
    for gid, row in g.dE.items():
        dE[gid] = row
    return {"E": dE, "W1": g.dW1, "b1": g.db1, "W2": g.dW2, "b2": g.db2}


def max_rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Largest elementwise relative error, floored so that near-zero pairs
    compare on an absolute scale."""
    if analytic.size == 0:
        return 0.0
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return float(np.max(np.abs(analytic - numeric) / denom))


def write_corpus_files(directory, n_sentences=80, n_phrases=60, seed=5):
    """Write sentences.tsv / phrases.tsv fixtures; phrases include neutral
    rows that load keeps and filtering drops."""
    rnd = random.Random(seed)
    sentences = directory / "sentences.tsv"
    phrases = directory / "phrases.tsv"
    with open(sentences, "w", encoding="utf-8") as fh:
        for text, label in keyword_rows(rnd, n_sentences):
            fh.write(f"{label}\t{rnd.random():.3f}\t{text}\n")
    with open(phrases, "w", encoding="utf-8") as fh:
        for i, (text, label) in enumerate(keyword_rows(rnd, n_phrases)):
            if i % 5 == 0:
                label = 0
            fh.write(f"{label}\t{rnd.random():.3f}\t{text}\n")
    return sentences, phrases


def naive_top_ngrams(texts, max_n: int, capacity: int) -> list[tuple[str, int]]:
    """Independent count-then-sort vocabulary oracle (plain dict and a
    full sort, no Counter)."""
    counts: dict[str, int] = {}
    for tokens in texts:
        for n in range(1, max_n + 1):
            for i in range(len(tokens) - n + 1):
                gram = " ".join(tokens[i : i + n])
                counts[gram] = counts.get(gram, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:capacity]
