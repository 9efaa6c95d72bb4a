import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ngramsent.model import Gradients, ModelDims, init_params
from ngramsent.optim import AdamHyper, AdamState, adam_step

SCALAR_DIMS = ModelDims(vocab_size=0, embed_dim=1, hidden_dim=1)


def zero_grads(params, dE=None):
    return Gradients(
        dE=dE or {},
        dW1=np.zeros_like(params.W1),
        db1=np.zeros_like(params.b1),
        dW2=np.zeros_like(params.W2),
        db2=np.zeros_like(params.b2),
    )


def scalar_setup(dtype=np.float64):
    """float64 model whose b1 is a single scalar starting at exactly 0."""
    params = init_params(SCALAR_DIMS, seed=0, dtype=dtype)
    state = AdamState.zeros_like(params)
    return params, state


def grads_with_db1(params, g):
    grads = zero_grads(params)
    grads.db1 = np.array([g], dtype=params.dtype)
    return grads


class TestScalarTraces:
    """Hand-computed single- and two-step traces with the default
    hyperparameters and a constant gradient of 1."""

    def test_single_step(self):
        params, state = scalar_setup()
        adam_step(params, grads_with_db1(params, 1.0), state)
        assert state.t == 1
        assert state.mb1[0] == pytest.approx(0.1, abs=1e-9)
        assert state.vb1[0] == pytest.approx(0.001, abs=1e-9)
        # m_hat = v_hat = 1 exactly, so theta = -alpha / (1 + eps)
        assert params.b1[0] == pytest.approx(-0.0009999999900000003, abs=1e-9)

    def test_two_steps(self):
        params, state = scalar_setup()
        for _ in range(2):
            adam_step(params, grads_with_db1(params, 1.0), state)
        assert state.t == 2
        assert state.mb1[0] == pytest.approx(0.19, abs=1e-9)
        assert state.vb1[0] == pytest.approx(0.001999, abs=1e-9)
        assert params.b1[0] == pytest.approx(-0.001999999979999993, abs=1e-9)
        assert params.b1[0] == pytest.approx(-0.002, abs=1e-6)

    def test_matches_independent_scalar_recurrence(self):
        params, state = scalar_setup()
        alpha, b1, b2, eps = 0.001, 0.9, 0.999, 1e-8
        theta = m = v = 0.0
        for t in range(1, 8):
            adam_step(params, grads_with_db1(params, 1.0), state)
            m = b1 * m + (1 - b1) * 1.0
            v = b2 * v + (1 - b2) * 1.0
            theta -= alpha * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
            assert params.b1[0] == pytest.approx(theta, abs=1e-9)


class TestZeroGradient:
    def test_identity_on_fresh_state(self):
        params, state = scalar_setup()
        before = {n: t.copy() for n, t in params.tensors()}
        adam_step(params, zero_grads(params), state)
        for name, tensor in params.tensors():
            assert np.array_equal(tensor, before[name]), name

    def test_identity_at_any_step_count(self):
        params, state = scalar_setup()
        state.t = 17  # zero moments, arbitrary step counter
        before = params.b1.copy()
        adam_step(params, zero_grads(params), state)
        assert np.array_equal(params.b1, before)
        assert state.t == 18


class TestProperties:
    @pytest.mark.parametrize("g", [0.37, -0.37])
    def test_constant_gradient_moves_one_alpha_per_step(self, g):
        params, state = scalar_setup()
        hyper = AdamHyper()
        sign = 1.0 if g > 0 else -1.0
        prev = float(params.b1[0])
        for _ in range(50):
            adam_step(params, grads_with_db1(params, g), state, hyper)
            delta = float(params.b1[0]) - prev
            prev = float(params.b1[0])
            assert delta * sign < 0.0  # moves against the gradient sign
            assert abs(abs(delta) / hyper.alpha - 1.0) <= 1e-6

    @given(st.lists(st.floats(-10.0, 10.0, allow_nan=False), min_size=1, max_size=40))
    def test_second_moment_stays_nonnegative(self, gradient_sequence):
        params, state = scalar_setup()
        for g in gradient_sequence:
            adam_step(params, grads_with_db1(params, g), state)
            assert state.vb1[0] >= 0.0


class TestSparseEmbeddingUpdates:
    def test_untouched_rows_keep_parameters_and_moments(self):
        dims = ModelDims(4, 3, 2)
        params = init_params(dims, seed=1)
        state = AdamState.zeros_like(params)
        before_E = params.E.copy()
        row = np.full(3, 0.5, dtype=np.float32)
        adam_step(params, zero_grads(params, dE={2: row}), state)
        for i in (0, 1, 3):
            assert np.array_equal(params.E[i], before_E[i])
            assert not state.mE[i].any()
        assert not np.array_equal(params.E[2], before_E[2])

    def test_stale_moments_are_not_decayed(self):
        dims = ModelDims(4, 3, 2)
        params = init_params(dims, seed=1)
        state = AdamState.zeros_like(params)
        row = np.full(3, 0.5, dtype=np.float32)
        adam_step(params, zero_grads(params, dE={2: row}), state)
        m_row2 = state.mE[2].copy()
        e_row2 = params.E[2].copy()
        adam_step(params, zero_grads(params, dE={1: row}), state)
        assert np.array_equal(state.mE[2], m_row2)
        assert np.array_equal(params.E[2], e_row2)

    def test_matches_dense_adam_bit_for_bit_over_100_steps(self):
        """When every embedding row gets a gradient every step, the lazy
        sparse path must equal a plain dense Adam exactly."""
        dims = ModelDims(6, 3, 2)
        params = init_params(dims, seed=5)
        state = AdamState.zeros_like(params)
        hyper = AdamHyper()

        dense_E = params.E.copy()
        dense_m = np.zeros_like(dense_E)
        dense_v = np.zeros_like(dense_E)
        rng = np.random.default_rng(0)
        for t in range(1, 101):
            G = rng.normal(size=dense_E.shape).astype(np.float32)
            adam_step(
                params,
                zero_grads(params, dE={i: G[i] for i in range(dims.vocab_size)}),
                state,
                hyper,
            )
            bc1 = 1.0 - hyper.beta1**t
            bc2 = 1.0 - hyper.beta2**t
            dense_m = hyper.beta1 * dense_m + (1.0 - hyper.beta1) * G
            dense_v = hyper.beta2 * dense_v + (1.0 - hyper.beta2) * (G * G)
            dense_E -= hyper.alpha * (dense_m / bc1) / (np.sqrt(dense_v / bc2) + hyper.eps)
            assert np.array_equal(params.E, dense_E), f"diverged at step {t}"


class TestValidation:
    def test_dense_shape_mismatch(self):
        params, state = scalar_setup()
        grads = zero_grads(params)
        grads.dW1 = np.zeros((2, 2))
        with pytest.raises(ValueError, match="shape"):
            adam_step(params, grads, state)

    def test_embedding_row_out_of_range(self):
        dims = ModelDims(4, 3, 2)
        params = init_params(dims, seed=1)
        state = AdamState.zeros_like(params)
        with pytest.raises(ValueError, match="out of range"):
            adam_step(params, zero_grads(params, dE={4: np.zeros(3)}), state)

    def test_bad_hyper(self):
        with pytest.raises(ValueError):
            AdamHyper(beta1=1.0)
