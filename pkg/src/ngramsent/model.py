"""The classifier's forward pass and exact reverse-mode gradients.

Architecture, for a bag of n-gram ids:

    x  = mean of the embedding rows of the bag (zero vector if empty)
    a1 = x @ W1 + b1
    h1 = tanh(a1)
    z  = h1 @ W2 + b2
    p  = softmax(z)            (two classes)

Loss is cross-entropy -ln p[y].  `backward` returns the exact analytic
gradients; embedding gradients are sparse, one row per distinct bag id.
Parameters are float32 in normal use; pass dtype=float64 to run the whole
pipeline in double precision (as the finite-difference tests do).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .rng import SplitMix64
from .vocab import FeatureBag

LOSS_EPS = 1e-12  # clamp for -ln(p_y); keeps the loss finite

# Standard layer widths; the hidden width is the defining one, the
# embedding width mirrors it.
DEFAULT_EMBED_DIM = 32
DEFAULT_HIDDEN_DIM = 32


class ModelDims(NamedTuple):
    vocab_size: int
    embed_dim: int
    hidden_dim: int


@dataclass
class ModelParams:
    """All learnable tensors.

    Shapes: E (V, d), W1 (d, h), b1 (h,), W2 (h, 2), b2 (2,).
    """

    E: np.ndarray
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def dims(self) -> ModelDims:
        v, d = self.E.shape
        return ModelDims(v, d, self.W1.shape[1])

    @property
    def dtype(self) -> np.dtype:
        return self.W1.dtype

    def copy(self) -> "ModelParams":
        return ModelParams(
            self.E.copy(), self.W1.copy(), self.b1.copy(),
            self.W2.copy(), self.b2.copy(),
        )

    def tensors(self) -> list[tuple[str, np.ndarray]]:
        """Tensors in canonical (serialization) order."""
        return [
            ("E", self.E), ("W1", self.W1), ("b1", self.b1),
            ("W2", self.W2), ("b2", self.b2),
        ]


@dataclass
class ForwardCache:
    """Every intermediate value `backward` needs."""

    bag: FeatureBag
    x: np.ndarray
    a1: np.ndarray
    h1: np.ndarray
    z: np.ndarray
    p: np.ndarray


@dataclass
class Gradients:
    """Loss gradients; dE holds only the rows of ids present in the bag."""

    dE: dict[int, np.ndarray]
    dW1: np.ndarray
    db1: np.ndarray
    dW2: np.ndarray
    db2: np.ndarray


def _glorot(rng: SplitMix64, fan_in: int, fan_out: int, shape, dtype) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    u = rng.next_float_array(int(np.prod(shape)))
    return ((2.0 * u - 1.0) * limit).astype(dtype).reshape(shape)


def init_params(dims: ModelDims, seed: int, dtype=np.float32) -> ModelParams:
    """Glorot-uniform weights, zero biases, from one splitmix64 stream.

    Draw order is fixed (E row-major, then W1, then W2) so the same seed
    always yields bit-identical parameters.
    """
    v, d, h = ModelDims(*dims)
    if d < 1 or h < 1 or v < 0:
        raise ValueError(f"bad dims {dims}")
    rng = SplitMix64(seed)
    return ModelParams(
        E=_glorot(rng, v, d, (v, d), dtype),
        W1=_glorot(rng, d, h, (d, h), dtype),
        b1=np.zeros(h, dtype=dtype),
        W2=_glorot(rng, h, 2, (h, 2), dtype),
        b2=np.zeros(2, dtype=dtype),
    )


def softmax(z: np.ndarray) -> np.ndarray:
    """Numerically stable softmax (inputs shifted by their max)."""
    shifted = z - np.max(z)
    e = np.exp(shifted)
    return e / np.sum(e)


def forward(params: ModelParams, bag: FeatureBag) -> ForwardCache:
    """Run the classifier on one feature bag.

    Pooling is the mean of the bag's embedding rows with multiplicity; an
    empty bag pools to the zero vector.
    """
    v, d, _ = params.dims
    if bag:
        ids = np.asarray(bag, dtype=np.intp)
        if ids.min() < 0 or ids.max() >= v:
            raise ValueError(f"feature id out of range for vocab size {v}")
        x = params.E[ids].mean(axis=0)
    else:
        x = np.zeros(d, dtype=params.dtype)
    a1 = x @ params.W1 + params.b1
    h1 = np.tanh(a1)
    z = h1 @ params.W2 + params.b2
    return ForwardCache(bag=list(bag), x=x, a1=a1, h1=h1, z=z, p=softmax(z))


def cross_entropy(p: np.ndarray, y: int) -> float:
    """-ln(p[y]), clamped at LOSS_EPS so a zero probability stays finite."""
    if y not in (0, 1):
        raise ValueError(f"class must be 0 or 1, got {y}")
    return -math.log(max(float(p[y]), LOSS_EPS))


def backward(params: ModelParams, cache: ForwardCache, y: int) -> Gradients:
    """Exact gradients of cross_entropy(forward(params, bag), y).

    Softmax and cross-entropy fold into dz = p - onehot(y); the rest is
    the usual chain rule through the tanh layer and the mean pooling.
    """
    if y not in (0, 1):
        raise ValueError(f"class must be 0 or 1, got {y}")
    dz = cache.p.copy()
    dz[y] -= 1.0
    dW2 = np.outer(cache.h1, dz)
    db2 = dz
    dh1 = params.W2 @ dz
    da1 = dh1 * (1.0 - cache.h1 * cache.h1)
    dW1 = np.outer(cache.x, da1)
    db1 = da1
    dE: dict[int, np.ndarray] = {}
    if cache.bag:
        dx = params.W1 @ da1
        scale = 1.0 / len(cache.bag)
        for gid, mult in Counter(cache.bag).items():
            dE[gid] = (mult * scale) * dx
    return Gradients(dE=dE, dW1=dW1, db1=db1, dW2=dW2, db2=db2)
