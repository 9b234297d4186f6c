"""Network forward/backward correctness, Adam, softmax, checkpoints."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tutor_rl.nncore import (
    AdamState,
    DimensionMismatch,
    Mlp,
    NoForwardRecorded,
    adam_step,
    load_checkpoint,
    save_checkpoint,
    softmax_logits_to_distribution,
)


# --- oracles -----------------------------------------------------------

def forward_oracle(net, x):
    """Straight-line re-implementation with explicit loops."""
    h = list(x)
    for k in range(len(net.weights)):
        w, b = net.weights[k], net.biases[k]
        out = []
        for i in range(w.shape[0]):
            acc = b[i]
            for j in range(w.shape[1]):
                acc += w[i, j] * h[j]
            out.append(acc)
        if k < len(net.weights) - 1:
            out = [max(0.0, v) for v in out]
        h = out
    return np.array(h)


def finite_difference_grads(net, loss_fn, h=1e-5):
    """Central differences over every parameter of the net."""
    grads = []
    for p in net.parameters():
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + h
            up = loss_fn()
            p[idx] = orig - h
            down = loss_fn()
            p[idx] = orig
            g[idx] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def relative_match_fraction(analytic, numeric, tol=1e-3):
    matched = total = 0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.abs(a) + np.abs(n), 1e-8)
        matched += int((np.abs(a - n) / denom <= tol).sum())
        total += a.size
    return matched / total


# --- forward -----------------------------------------------------------

def test_forward_zero_net_is_zero():
    net = Mlp([3, 4, 2], seed=0)
    for w in net.weights:
        w[:] = 0.0
    assert np.array_equal(net.forward(np.array([1.0, -2.0, 3.0])), np.zeros(2))


def test_forward_identity_single_layer():
    net = Mlp([3, 3], seed=0)
    net.weights[0][:] = np.eye(3)
    net.biases[0][:] = 0.0
    x = np.array([0.5, -1.5, 2.0])
    assert np.array_equal(net.forward(x), x)


def test_forward_matches_straight_line_oracle():
    net = Mlp([4, 8, 2], seed=11)
    rng = np.random.default_rng(3)
    x = rng.normal(size=4)
    assert np.allclose(net.forward(x), forward_oracle(net, x), atol=1e-12)


def test_forward_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Mlp([3, 2], seed=0).forward(np.zeros(4))


def test_forward_batch_matches_rows():
    net = Mlp([5, 6, 3], seed=2)
    rng = np.random.default_rng(0)
    batch = rng.normal(size=(7, 5))
    out = net.forward(batch)
    for i in range(7):
        assert np.allclose(out[i], net.forward(batch[i]), atol=1e-14)


# --- backward ----------------------------------------------------------

def test_backward_requires_forward():
    with pytest.raises(NoForwardRecorded):
        Mlp([2, 2], seed=0).backward(np.zeros(2))


def test_backward_zero_gradient_for_constant_loss():
    net = Mlp([3, 4, 2], seed=1)
    net.forward(np.ones(3))
    grads = net.backward(np.zeros(2))
    assert all(np.all(g == 0) for g in grads.as_list())


def test_backward_single_linear_layer_closed_form():
    # L = ||Wx + b - y||^2 => dL/dW = 2(Wx + b - y) x^T, dL/db = 2(Wx + b - y)
    net = Mlp([3, 2], seed=5)
    rng = np.random.default_rng(7)
    x = rng.normal(size=3)
    y = rng.normal(size=2)
    out = net.forward(x)
    residual = out - y
    grads = net.backward(2.0 * residual)
    assert np.allclose(grads.weights[0], 2.0 * np.outer(residual, x), atol=1e-12)
    assert np.allclose(grads.biases[0], 2.0 * residual, atol=1e-12)


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(9)
    for trial in range(5):
        net = Mlp([4, 6, 3], seed=trial)
        x = rng.normal(size=4)
        y = rng.normal(size=3)

        def loss():
            return float(((net.forward(x) - y) ** 2).sum())

        loss()  # record activations at the unperturbed point
        analytic = net.backward(2.0 * (net.forward(x) - y)).as_list()
        numeric = finite_difference_grads(net, loss)
        assert relative_match_fraction(analytic, numeric) >= 0.99


# --- adam --------------------------------------------------------------

def test_adam_zero_gradient_is_fixed_point():
    params = [np.array([1.0, -2.0]), np.array([[3.0]])]
    before = [p.copy() for p in params]
    state = AdamState(learning_rate=0.01)
    adam_step(params, [np.zeros_like(p) for p in params], state)
    assert all(np.array_equal(p, b) for p, b in zip(params, before))
    assert state.step_count == 1


def test_adam_first_step_hand_value():
    # p=0, g=1, lr=0.001: bias-corrected first step is lr * 1/(1 + eps)
    params = [np.array([0.0])]
    state = AdamState(learning_rate=0.001)
    adam_step(params, [np.array([1.0])], state)
    expected = -0.001 * 1.0 / (1.0 + 1e-8)
    assert abs(params[0][0] - expected) < 1e-15


def test_adam_descends_convex_quadratic():
    rng = np.random.default_rng(4)
    target = rng.normal(size=10)
    p = [rng.normal(size=10)]
    state = AdamState(learning_rate=0.05)
    start = float(((p[0] - target) ** 2).sum())
    for _ in range(100):
        adam_step(p, [2.0 * (p[0] - target)], state)
    assert float(((p[0] - target) ** 2).sum()) < start


def test_adam_shape_mismatch():
    state = AdamState(learning_rate=0.1)
    with pytest.raises(DimensionMismatch):
        adam_step([np.zeros(2)], [np.zeros(3)], state)


# --- softmax -----------------------------------------------------------

def test_softmax_uniform():
    assert np.allclose(softmax_logits_to_distribution(np.zeros(4)), 0.25)


def test_softmax_limit_mass():
    probs = softmax_logits_to_distribution(np.array([0.0, 200.0]))
    assert probs[1] > 1.0 - 1e-12


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-300, 300), min_size=1, max_size=9))
def test_softmax_valid_distribution(logits):
    probs = softmax_logits_to_distribution(np.array(logits))
    assert np.all(probs >= 0)
    assert abs(probs.sum() - 1.0) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=6),
       st.floats(-100, 100))
def test_softmax_shift_invariant(logits, shift):
    base = softmax_logits_to_distribution(np.array(logits))
    shifted = softmax_logits_to_distribution(np.array(logits) + shift)
    assert np.allclose(base, shifted, atol=1e-12)


# --- determinism and checkpoints ----------------------------------------

def test_init_deterministic():
    a, b = Mlp([4, 8, 2], seed=33), Mlp([4, 8, 2], seed=33)
    assert all(np.array_equal(x, y) for x, y in zip(a.parameters(), b.parameters()))


def test_init_bound():
    net = Mlp([10, 20], seed=0)
    bound = np.sqrt(6.0 / 30.0)
    assert np.all(np.abs(net.weights[0]) <= bound)


def test_checkpoint_roundtrip(tmp_path):
    net = Mlp([6, 5, 4], seed=21)
    path = tmp_path / "net.bin"
    save_checkpoint(net, path)
    loaded = load_checkpoint(path)
    assert loaded.layer_dims == net.layer_dims
    assert all(np.array_equal(x, y)
               for x, y in zip(net.parameters(), loaded.parameters()))


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"definitely not a checkpoint")
    with pytest.raises(ValueError):
        load_checkpoint(path)
