"""Mini-batch training with per-epoch validation and early stopping.

One model trains per seed; the seed drives both weight initialization and
the per-epoch reshuffles, so a (data, config, seed) triple fully
determines the trained parameter bytes.  Five such models form the
standard ensemble.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterator, NamedTuple, Sequence

import numpy as np

from .model import (
    Gradients, ModelDims, ModelParams, backward, cross_entropy, forward, init_params,
)
from .optim import AdamHyper, AdamState, adam_step
from .rng import SplitMix64, derive_seed, fisher_yates
from .vocab import FeatureBag, NgramVocabulary

if TYPE_CHECKING:
    from .inference import Ensemble

# One (bag, class) training instance; class is 0 (negative) or 1 (positive).
LabeledBag = tuple[FeatureBag, int]

DEFAULT_BATCH_SIZE = 64
DEFAULT_MAX_EPOCHS = 100
DEFAULT_PATIENCE = 3


class EpochStats(NamedTuple):
    epoch: int
    train_loss: float
    valid_accuracy: float


@dataclass
class TrainConfig:
    dims: ModelDims
    seed: int = 0
    batch_size: int = DEFAULT_BATCH_SIZE
    max_epochs: int = DEFAULT_MAX_EPOCHS
    patience: int = DEFAULT_PATIENCE
    hyper: AdamHyper = field(default_factory=AdamHyper)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be positive")
        if self.patience < 1:
            raise ValueError("patience must be positive")


@dataclass
class TrainedModel:
    """Best-epoch parameter snapshot plus the full training history."""

    params: ModelParams
    seed: int
    history: list[EpochStats]


class EarlyStopper:
    """Stop once validation accuracy fails to strictly improve for
    `patience` consecutive epochs; remembers the best epoch (earliest on
    ties)."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best_accuracy: float | None = None
        self.best_epoch: int | None = None
        self._stale = 0

    def observe(self, epoch: int, accuracy: float) -> bool:
        """Record one epoch's validation accuracy; True if it improved."""
        if self.best_accuracy is None or accuracy > self.best_accuracy:
            self.best_accuracy = accuracy
            self.best_epoch = epoch
            self._stale = 0
            return True
        self._stale += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self._stale >= self.patience


def iter_batches(order: Sequence[int], batch_size: int) -> Iterator[Sequence[int]]:
    """Consecutive slices of `order`; the last batch may be short."""
    for start in range(0, len(order), batch_size):
        yield order[start : start + batch_size]


def predicted_class(p: np.ndarray) -> int:
    """Argmax with ties resolved to class 1."""
    return 1 if p[1] >= p[0] else 0


def _batch_gradients(params, data: list[LabeledBag], indices) -> tuple[Gradients, float]:
    """Mean gradient over one batch, plus the summed loss."""
    dW1 = np.zeros_like(params.W1)
    db1 = np.zeros_like(params.b1)
    dW2 = np.zeros_like(params.W2)
    db2 = np.zeros_like(params.b2)
    dE: dict[int, np.ndarray] = {}
    loss_sum = 0.0
    for i in indices:
        bag, y = data[i]
        cache = forward(params, bag)
        loss_sum += cross_entropy(cache.p, y)
        g = backward(params, cache, y)
        dW1 += g.dW1
        db1 += g.db1
        dW2 += g.dW2
        db2 += g.db2
        for gid, row in g.dE.items():
            if gid in dE:
                dE[gid] = dE[gid] + row
            else:
                dE[gid] = row
    scale = 1.0 / len(indices)
    for gid in dE:
        dE[gid] = dE[gid] * scale
    grads = Gradients(dE=dE, dW1=dW1 * scale, db1=db1 * scale,
                      dW2=dW2 * scale, db2=db2 * scale)
    return grads, loss_sum


def _validation_accuracy(params, data: list[LabeledBag]) -> float:
    correct = sum(
        1 for bag, y in data if predicted_class(forward(params, bag).p) == y
    )
    return correct / len(data)


def train_model(
    train: list[LabeledBag],
    valid: list[LabeledBag],
    config: TrainConfig,
    member: int = 0,
    progress: bool = True,
) -> TrainedModel:
    """Train one classifier and return its best-validation-epoch snapshot.

    Each epoch reshuffles the training data on a stream derived from
    (config.seed, epoch), processes it in batches of `batch_size`
    (averaging gradients within a batch before one Adam step), then
    measures validation accuracy.  `member` only labels the progress log.
    """
    if not train or not valid:
        raise ValueError("train and valid must be non-empty")
    params = init_params(config.dims, config.seed)
    state = AdamState.zeros_like(params)
    stopper = EarlyStopper(config.patience)
    best_params = params.copy()
    history: list[EpochStats] = []

    for epoch in range(1, config.max_epochs + 1):
        rng = SplitMix64(derive_seed(config.seed, epoch))
        order = fisher_yates(range(len(train)), rng)
        loss_total = 0.0
        for batch in iter_batches(order, config.batch_size):
            grads, loss_sum = _batch_gradients(params, train, batch)
            loss_total += loss_sum
            adam_step(params, grads, state, config.hyper)
        train_loss = loss_total / len(train)
        valid_acc = _validation_accuracy(params, valid)
        history.append(EpochStats(epoch, train_loss, valid_acc))
        if progress:
            print(
                f"member={member} epoch={epoch} "
                f"loss={train_loss:.6f} valid_acc={valid_acc:.6f}",
                file=sys.stderr,
            )
        if stopper.observe(epoch, valid_acc):
            best_params = params.copy()
        if stopper.should_stop:
            break

    return TrainedModel(params=best_params, seed=config.seed, history=history)


def train_ensemble(
    train: list[LabeledBag],
    valid: list[LabeledBag],
    config: TrainConfig,
    seeds: Sequence[int],
    vocab: NgramVocabulary,
    tokenizer_mode: str = "rule_based",
    progress: bool = True,
) -> "Ensemble":
    """Train one member per seed (five in the standard setup) and bundle
    them with the shared vocabulary.

    Members are independent: each seed drives that member's
    initialization and batch shuffling, nothing else is shared.
    """
    from .inference import Ensemble  # deferred: inference imports TrainedModel

    if not seeds:
        raise ValueError("at least one seed required")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    members = [
        train_model(train, valid, replace(config, seed=s), member=i, progress=progress)
        for i, s in enumerate(seeds)
    ]
    return Ensemble(
        members=members,
        vocab=vocab,
        dims=config.dims,
        tokenizer_mode=tokenizer_mode,
    )
