from __future__ import annotations

import random
import time
from dataclasses import dataclass

import pytest

from helpers import featurize_rows, keyword_rows, make_params, write_corpus_files
from ngramsent.inference import Ensemble
from ngramsent.model import ModelDims
from ngramsent.textproc import PRETOKENIZED, normalize, tokenize
from ngramsent.training import TrainConfig, TrainedModel, train_ensemble
from ngramsent.vocab import NgramVocabulary, build_vocabulary


@dataclass
class SyntheticTask:
    """Linearly separable keyword task: 2000 train / 500 valid rows."""

    train_rows: list[tuple[str, int]]
    valid_rows: list[tuple[str, int]]
    vocab: NgramVocabulary
    train_set: list
    valid_set: list


@pytest.fixture(scope="session")
def synthetic_task() -> SyntheticTask:
    rnd = random.Random(20260809)
    train_rows = keyword_rows(rnd, 2000)
    valid_rows = keyword_rows(rnd, 500)
    vocab = build_vocabulary([tokenize(normalize(t)) for t, _ in train_rows])
    return SyntheticTask(
        train_rows=train_rows,
        valid_rows=valid_rows,
        vocab=vocab,
        train_set=featurize_rows(train_rows, vocab),
        valid_set=featurize_rows(valid_rows, vocab),
    )


@pytest.fixture(scope="session")
def separable_ensemble(synthetic_task):
    """Five members trained on the keyword task, with wall time recorded."""
    config = TrainConfig(
        dims=ModelDims(len(synthetic_task.vocab), 32, 32),
        batch_size=64,
        max_epochs=30,
        patience=3,
    )
    start = time.monotonic()
    ensemble = train_ensemble(
        synthetic_task.train_set,
        synthetic_task.valid_set,
        config,
        seeds=(101, 102, 103, 104, 105),
        vocab=synthetic_task.vocab,
        tokenizer_mode=PRETOKENIZED,
        progress=False,
    )
    elapsed = time.monotonic() - start
    return ensemble, elapsed


@pytest.fixture
def stub_ensemble() -> Ensemble:
    """Two identical hand-built members whose label is decided by the sign
    of the pooled embedding value.

    Vocabulary: good=0 (weight -1), movie=1 (weight 0), "good movie"=2
    (weight +3).  "good movie" pools to +2/3 (positive); dropping the
    bigram leaves "good" alone at -1 (negative).
    """
    vocab = NgramVocabulary(
        entries=[("good", 3), ("movie", 2), ("good movie", 1)],
        max_n=2,
        capacity=10,
    )
    params = make_params(
        E=[[-1.0], [0.0], [3.0]],
        W1=[[1.0]],
        b1=[0.0],
        W2=[[-5.0, 5.0]],
        b2=[0.0, 0.0],
    )
    members = [
        TrainedModel(params=params.copy(), seed=seed, history=[])
        for seed in (1, 2)
    ]
    return Ensemble(
        members=members,
        vocab=vocab,
        dims=ModelDims(3, 1, 1),
        tokenizer_mode=PRETOKENIZED,
    )


@pytest.fixture
def corpus_files(tmp_path):
    return write_corpus_files(tmp_path)
