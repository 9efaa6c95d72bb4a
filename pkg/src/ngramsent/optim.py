"""Adam with bias correction and lazy sparse embedding updates.

Update for every parameter element that received a gradient g:

    m <- beta1*m + (1-beta1)*g
    v <- beta2*v + (1-beta2)*g^2
    m_hat = m / (1 - beta1^t),  v_hat = v / (1 - beta2^t)
    theta <- theta - alpha * m_hat / (sqrt(v_hat) + eps)

Dense tensors (W1, b1, W2, b2) are updated every step, treating an absent
gradient as zero.  Embedding rows are updated lazily: only rows present in
`grads.dE` move, and untouched rows keep stale moments with no decay.
That deviates from dense Adam but is what makes 100k-row embeddings
affordable; the equivalence when every row is always touched is covered
by tests.  eps is added after the square root.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Gradients, ModelParams


@dataclass(frozen=True)
class AdamHyper:
    """Step size and moment decay rates (the optimizer's published defaults)."""

    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")


@dataclass
class AdamState:
    """First/second moment tensors shaped like the parameters, plus the
    step counter."""

    mE: np.ndarray
    vE: np.ndarray
    mW1: np.ndarray
    vW1: np.ndarray
    mb1: np.ndarray
    vb1: np.ndarray
    mW2: np.ndarray
    vW2: np.ndarray
    mb2: np.ndarray
    vb2: np.ndarray
    t: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        z = np.zeros_like
        return cls(
            mE=z(params.E), vE=z(params.E),
            mW1=z(params.W1), vW1=z(params.W1),
            mb1=z(params.b1), vb1=z(params.b1),
            mW2=z(params.W2), vW2=z(params.W2),
            mb2=z(params.b2), vb2=z(params.b2),
        )


def _check_shapes(params: ModelParams, grads: Gradients) -> None:
    pairs = [
        (params.W1, grads.dW1), (params.b1, grads.db1),
        (params.W2, grads.dW2), (params.b2, grads.db2),
    ]
    for theta, g in pairs:
        if theta.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {theta.shape}")
    d = params.E.shape[1]
    for gid, row in grads.dE.items():
        if not 0 <= gid < params.E.shape[0]:
            raise ValueError(f"embedding gradient row {gid} out of range")
        if row.shape != (d,):
            raise ValueError(f"embedding gradient row shape {row.shape} != ({d},)")


def adam_step(
    params: ModelParams,
    grads: Gradients,
    state: AdamState,
    hyper: AdamHyper = AdamHyper(),
) -> tuple[ModelParams, AdamState]:
    """Apply one Adam step in place; returns the same objects for chaining.

    `state.t` must equal the number of steps already applied with this
    state.
    """
    _check_shapes(params, grads)
    state.t += 1
    bc1 = 1.0 - hyper.beta1**state.t
    bc2 = 1.0 - hyper.beta2**state.t

    dense = [
        (params.W1, state.mW1, state.vW1, grads.dW1),
        (params.b1, state.mb1, state.vb1, grads.db1),
        (params.W2, state.mW2, state.vW2, grads.dW2),
        (params.b2, state.mb2, state.vb2, grads.db2),
    ]
    for theta, m, v, g in dense:
        m[...] = hyper.beta1 * m + (1.0 - hyper.beta1) * g
        v[...] = hyper.beta2 * v + (1.0 - hyper.beta2) * (g * g)
        theta[...] -= hyper.alpha * (m / bc1) / (np.sqrt(v / bc2) + hyper.eps)

    if grads.dE:
        ids = sorted(grads.dE)
        rows = np.asarray(ids, dtype=np.intp)
        g = np.stack([grads.dE[i] for i in ids])
        m = hyper.beta1 * state.mE[rows] + (1.0 - hyper.beta1) * g
        v = hyper.beta2 * state.vE[rows] + (1.0 - hyper.beta2) * (g * g)
        state.mE[rows] = m
        state.vE[rows] = v
        params.E[rows] -= hyper.alpha * (m / bc1) / (np.sqrt(v / bc2) + hyper.eps)

    return params, state
