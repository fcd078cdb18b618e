import math

import numpy as np
import pytest

from deepsp.mlp import (
    AdamState,
    MlpModel,
    TrainConfig,
    adam_step,
    backward,
    forward,
    init_model,
    load_model,
    loss,
    save_model,
    train,
    zero_model,
)

from oracles import finite_difference_grads


def tiny_model(seed=0, dims=(4, 5, 3, 1)):
    return init_model(dims, rng_seed=seed)


# -- forward --------------------------------------------------------------------


def test_zero_model_outputs_half():
    m = zero_model()
    assert forward(m, [0.3, 0.9, 2, 5]) == 0.5
    y = forward(m, np.random.default_rng(0).random((7, 4)))
    assert np.all(y == 0.5)


def test_default_architecture():
    m = init_model(rng_seed=1)
    assert m.layer_dims == [4, 40, 40, 40, 1]
    assert all(b.sum() == 0 for b in m.biases)
    y = forward(m, [0.1, 0.2, 3, 4])
    assert 0.0 < y < 1.0


def test_init_determinism():
    a, b = init_model(rng_seed=5), init_model(rng_seed=5)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    c = init_model(rng_seed=6)
    assert not np.array_equal(a.weights[0], c.weights[0])


def test_forward_rejects_bad_input():
    m = init_model(rng_seed=0)
    with pytest.raises(ValueError):
        forward(m, [1.0, 2.0])
    m.weights[1][0, 0] = np.nan
    with pytest.raises(ValueError):
        forward(m, [1.0, 2.0, 3.0, 4.0])


def test_batch_matches_single():
    m = tiny_model(3)
    X = np.random.default_rng(1).random((6, 4))
    ys = forward(m, X)
    for i in range(6):
        assert ys[i] == pytest.approx(forward(m, X[i]), abs=1e-15)


# -- loss -----------------------------------------------------------------------


def test_loss_at_half_is_ln2():
    m = zero_model((4, 5, 1))
    x = [0.1, 0.2, 0.3, 0.4]
    assert loss(m, [x], [1.0]) == pytest.approx(math.log(2))
    assert loss(m, [x], [0.0]) == pytest.approx(math.log(2))


def test_loss_sums_over_batch():
    m = zero_model((4, 5, 1))
    X = np.random.default_rng(2).random((20, 4))
    T = (np.arange(20) % 2).astype(float)
    assert loss(m, X, T) == pytest.approx(20 * math.log(2))


def test_duplicated_batch_doubles_loss_and_grads():
    m = tiny_model(4)
    rng = np.random.default_rng(3)
    X = rng.random((5, 4))
    T = (rng.random(5) < 0.5).astype(float)
    X2, T2 = np.vstack([X, X]), np.concatenate([T, T])
    assert loss(m, X2, T2) == pytest.approx(2 * loss(m, X, T))
    gw, gb = backward(m, X, T)
    gw2, gb2 = backward(m, X2, T2)
    for a, b in zip(gw + gb, gw2 + gb2):
        np.testing.assert_allclose(b, 2 * a, rtol=1e-12)


def test_loss_finite_at_extreme_logits():
    # huge weights drive the output to ~0/1; the clamp keeps the loss finite
    m = zero_model((2, 1))
    m.weights[0][:] = 500.0
    val = loss(m, [[1.0, 1.0]], [0.0])
    assert np.isfinite(val)
    # 1 - (1 - 1e-12) is only ~1e-12 up to representation error
    assert val == pytest.approx(-math.log(1e-12), rel=1e-4)


# -- gradients ------------------------------------------------------------------


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(7)
    m = tiny_model(7, dims=(4, 6, 5, 1))
    X = rng.random((8, 4)) * 2
    T = (rng.random(8) < 0.5).astype(float)
    gw, gb = backward(m, X, T)
    fd = finite_difference_grads(lambda: loss(m, X, T), m.weights + m.biases)
    for got, want in zip(gw + gb, fd):
        np.testing.assert_allclose(got, want, rtol=1e-4, atol=1e-7)


# -- Adam -----------------------------------------------------------------------


def test_adam_zero_gradient_is_noop():
    m = tiny_model(1)
    before = m.copy()
    st = AdamState.for_model(m)
    zeros = ([np.zeros_like(w) for w in m.weights], [np.zeros_like(b) for b in m.biases])
    adam_step(m, zeros, st, TrainConfig(), 1)
    for a, b in zip(m.weights, before.weights):
        assert np.array_equal(a, b)


def test_adam_step_index_validation():
    m = tiny_model(1)
    st = AdamState.for_model(m)
    g = (list(m.weights), list(m.biases))
    with pytest.raises(ValueError):
        adam_step(m, g, st, TrainConfig(), 0)


def test_adam_first_step_size_is_lr():
    # with bias correction the very first step moves each parameter by
    # ~lr * sign(gradient), regardless of gradient scale
    m = zero_model((2, 1))
    st = AdamState.for_model(m)
    g = ([np.array([[3.0, -0.25]])], [np.array([10.0])])
    adam_step(m, g, st, TrainConfig(learning_rate=1e-3), 1)
    np.testing.assert_allclose(
        m.weights[0], [[-1e-3, 1e-3]], rtol=1e-6
    )
    np.testing.assert_allclose(m.biases[0], [-1e-3], rtol=1e-6)


def test_adam_drives_training_loss_down():
    rng = np.random.default_rng(11)
    X = rng.random((40, 4))
    T = (X[:, 0] > 0.5).astype(float)  # learnable rule
    m = tiny_model(2, dims=(4, 8, 1))
    st = AdamState.for_model(m)
    cfg = TrainConfig(learning_rate=5e-2)
    start = loss(m, X, T)
    for step in range(1, 301):
        adam_step(m, backward(m, X, T), st, cfg, step)
    assert loss(m, X, T) < 0.2 * start


# -- train loop -----------------------------------------------------------------


def make_dataset(n=200, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 4))
    T = (X[:, 1] + 0.1 * rng.standard_normal(n) > 0.5).astype(float)
    return X, T


def test_train_determinism_and_history():
    X, T = make_dataset()
    cfg = TrainConfig(epochs=2, rng_seed=3)
    evals = lambda m, s: float(loss(m, X, T))
    m1, h1 = train(X, T, cfg, eval_fn=evals, eval_every=5)
    m2, h2 = train(X, T, cfg, eval_fn=evals, eval_every=5)
    # the pre-training row carries loss=nan, so compare fields explicitly
    assert [(s, e) for s, _, e in h1] == [(s, e) for s, _, e in h2]
    assert [l for _, l, _ in h1[1:]] == [l for _, l, _ in h2[1:]]
    for a, b in zip(m1.weights, m2.weights):
        assert np.array_equal(a, b)
    assert h1[0][0] == 0  # eval before any update
    assert h1[-1][2] < h1[0][2]  # full-set loss decreased


def test_train_batches_without_replacement():
    # one epoch on a dataset of 40 with batch 20 takes exactly 2 steps
    X, T = make_dataset(40)
    seen = []
    m, h = train(
        X, T, TrainConfig(epochs=1, rng_seed=0),
        eval_fn=lambda m, s: s, eval_every=1,
    )
    steps = [row[0] for row in h]
    assert steps == [0, 1, 2]


def test_train_max_steps_cutoff():
    X, T = make_dataset(200)
    m, h = train(
        X, T, TrainConfig(epochs=50, rng_seed=0),
        eval_fn=lambda m, s: s, eval_every=1, max_steps=7,
    )
    assert h[-1][0] == 7


def test_train_rejects_tiny_dataset():
    X, T = make_dataset(10)
    with pytest.raises(ValueError):
        train(X, T, TrainConfig(batch_size=20))


def test_label_randomized_data_stays_near_half():
    # with independent random labels nothing is learnable: accuracy on the
    # training inputs stays at chance
    rng = np.random.default_rng(13)
    X = rng.random((400, 4))
    T = (rng.random(400) < 0.5).astype(float)
    m, _ = train(X, T, TrainConfig(epochs=5, rng_seed=1))
    acc = np.mean((forward(m, X) >= 0.5) == (T == 1.0))
    assert abs(acc - 0.5) < 0.08


# -- serialization --------------------------------------------------------------


def test_save_load_roundtrip_bit_exact(tmp_path):
    m = init_model(rng_seed=9)
    p = tmp_path / "model.txt"
    save_model(m, p)
    m2 = load_model(p)
    assert m2.layer_dims == m.layer_dims
    for a, b in zip(m.weights + m.biases, m2.weights + m2.biases):
        assert np.array_equal(a, b)  # 17 significant digits round-trip binary64
    assert p.read_text().splitlines()[0] == "DEEPSP-MLP 1"


def test_load_rejects_bad_files(tmp_path):
    m = init_model((4, 5, 1), rng_seed=0)
    p = tmp_path / "m.txt"

    save_model(m, p)
    text = p.read_text()

    (tmp_path / "v2.txt").write_text(text.replace("DEEPSP-MLP 1", "DEEPSP-MLP 2", 1))
    with pytest.raises(ValueError):
        load_model(tmp_path / "v2.txt")

    (tmp_path / "junk.txt").write_text("hello\nworld\n")
    with pytest.raises(ValueError):
        load_model(tmp_path / "junk.txt")

    (tmp_path / "nan.txt").write_text(text.replace(text.splitlines()[2].split()[0], "nan", 1))
    with pytest.raises(ValueError):
        load_model(tmp_path / "nan.txt")
