"""Small sigmoid MLP (4-40-40-40-1), cross-entropy, Adam, text serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MODEL_MAGIC = "DEEPSP-MLP"
MODEL_VERSION = 1
DEFAULT_DIMS = (4, 40, 40, 40, 1)
PROB_CLAMP = 1e-12


def sigmoid(a):
    out = np.empty_like(a, dtype=np.float64)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


@dataclass
class MlpModel:
    weights: list[np.ndarray]  # each (out, in)
    biases: list[np.ndarray]  # each (out,)

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def copy(self) -> "MlpModel":
        return MlpModel([w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass
class TrainConfig:
    batch_size: int = 20
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    epochs: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def init_model(dims=DEFAULT_DIMS, rng_seed: int = 0) -> MlpModel:
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng([rng_seed, 0xA])
    ws, bs = [], []
    for din, dout in zip(dims[:-1], dims[1:]):
        lim = np.sqrt(6.0 / (din + dout))
        ws.append(rng.uniform(-lim, lim, size=(dout, din)))
        bs.append(np.zeros(dout))
    return MlpModel(ws, bs)


def zero_model(dims=DEFAULT_DIMS) -> MlpModel:
    return MlpModel(
        [np.zeros((dout, din)) for din, dout in zip(dims[:-1], dims[1:])],
        [np.zeros(dout) for dout in dims[1:]],
    )


def _forward_acts(m: MlpModel, X: np.ndarray) -> list[np.ndarray]:
    """Activations per layer; X is (B, din).  Sigmoid after every layer."""
    acts = [X]
    for W, b in zip(m.weights, m.biases):
        acts.append(sigmoid(acts[-1] @ W.T + b))
    return acts


def forward(m: MlpModel, x) -> np.ndarray | float:
    """Predicted probability that the variable should be TRUE.

    Accepts a single feature vector or a (B, 4) batch.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != m.weights[0].shape[1]:
        raise ValueError("input dimension mismatch")
    if not all(np.isfinite(w).all() for w in m.weights):
        raise ValueError("non-finite model parameters")
    y = _forward_acts(m, X)[-1][:, 0]
    return float(y[0]) if single else y


def loss(m: MlpModel, X, T) -> float:
    """Summed cross-entropy over the batch, probabilities clamped at 1e-12."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    T = np.asarray(T, dtype=np.float64).ravel()
    y = np.clip(_forward_acts(m, X)[-1][:, 0], PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(-np.sum(T * np.log(y) + (1.0 - T) * np.log(1.0 - y)))


def backward(m: MlpModel, X, T) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Analytic gradient of the summed cross-entropy w.r.t. every parameter."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    T = np.asarray(T, dtype=np.float64).reshape(-1, 1)
    acts = _forward_acts(m, X)
    y = acts[-1]
    yc = np.clip(y, PROB_CLAMP, 1.0 - PROB_CLAMP)
    # dE/dy for clamped CE, then through the output sigmoid
    dy = (yc - T) / (yc * (1.0 - yc))
    delta = dy * y * (1.0 - y)
    gw = [np.empty(0)] * len(m.weights)
    gb = [np.empty(0)] * len(m.biases)
    for layer in range(len(m.weights) - 1, -1, -1):
        gw[layer] = delta.T @ acts[layer]
        gb[layer] = delta.sum(axis=0)
        if layer > 0:
            a = acts[layer]
            delta = (delta @ m.weights[layer]) * a * (1.0 - a)
    return gw, gb


@dataclass
class AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]

    @classmethod
    def for_model(cls, model: MlpModel) -> "AdamState":
        return cls(
            [np.zeros_like(w) for w in model.weights],
            [np.zeros_like(w) for w in model.weights],
            [np.zeros_like(b) for b in model.biases],
            [np.zeros_like(b) for b in model.biases],
        )


def adam_step(
    model: MlpModel,
    grads: tuple[list[np.ndarray], list[np.ndarray]],
    state: AdamState,
    cfg: TrainConfig,
    step_index: int,
) -> MlpModel:
    """Standard bias-corrected Adam update, in place. step_index starts at 1."""
    if step_index < 1:
        raise ValueError("step_index starts at 1")
    gw, gb = grads
    c1 = 1.0 - cfg.beta1**step_index
    c2 = 1.0 - cfg.beta2**step_index
    for i in range(len(model.weights)):
        for p, g, mom, vel in (
            (model.weights[i], gw[i], state.m_w[i], state.v_w[i]),
            (model.biases[i], gb[i], state.m_b[i], state.v_b[i]),
        ):
            mom *= cfg.beta1
            mom += (1.0 - cfg.beta1) * g
            vel *= cfg.beta2
            vel += (1.0 - cfg.beta2) * g * g
            p -= cfg.learning_rate * (mom / c1) / (np.sqrt(vel / c2) + cfg.eps_adam)
    return model


def train(
    X,
    T,
    cfg: TrainConfig,
    model: MlpModel | None = None,
    eval_fn=None,
    eval_every: int = 10,
    max_steps: int | None = None,
):
    """Minibatch Adam on shuffled batches drawn without replacement per epoch.

    eval_fn(model, step) is called at step 0 and every eval_every steps; its
    returns are collected in the history alongside the per-batch loss.
    Returns (model, history) where history rows are (step, loss, eval_value).
    """
    X = np.asarray(X, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64).ravel()
    if len(X) < cfg.batch_size:
        raise ValueError("dataset smaller than one batch")
    if model is None:
        model = init_model((X.shape[1], 40, 40, 40, 1), rng_seed=cfg.rng_seed)
    state = AdamState.for_model(model)
    rng = np.random.default_rng([cfg.rng_seed, 0xB])
    history = []
    if eval_fn is not None:
        history.append((0, float("nan"), eval_fn(model, 0)))
    step = 0
    steps_per_epoch = len(X) // cfg.batch_size
    for _epoch in range(cfg.epochs):
        order = rng.permutation(len(X))
        for b in range(steps_per_epoch):
            idx = order[b * cfg.batch_size : (b + 1) * cfg.batch_size]
            grads = backward(model, X[idx], T[idx])
            step += 1
            adam_step(model, grads, state, cfg, step)
            if eval_fn is not None and step % eval_every == 0:
                history.append((step, loss(model, X[idx], T[idx]), eval_fn(model, step)))
            if max_steps is not None and step >= max_steps:
                return model, history
    return model, history


# -- serialization ------------------------------------------------------------


def save_model(m: MlpModel, path) -> None:
    dims = m.layer_dims
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}", " ".join(str(d) for d in dims)]
    for W, b in zip(m.weights, m.biases):
        for row in W:
            lines.append(" ".join(f"{x:.17g}" for x in row))
        lines.append(" ".join(f"{x:.17g}" for x in b))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> MlpModel:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].split()
    if len(head) != 2 or head[0] != MODEL_MAGIC:
        raise ValueError("not a model file")
    if int(head[1]) != MODEL_VERSION:
        raise ValueError(f"unsupported model version {head[1]}")
    dims = [int(d) for d in lines[1].split()]
    ws, bs = [], []
    row = 2
    for din, dout in zip(dims[:-1], dims[1:]):
        W = np.array(
            [[float(x) for x in lines[row + r].split()] for r in range(dout)]
        )
        row += dout
        b = np.array([float(x) for x in lines[row].split()])
        row += 1
        if W.shape != (dout, din) or b.shape != (dout,):
            raise ValueError("dimension mismatch in model file")
        if not (np.isfinite(W).all() and np.isfinite(b).all()):
            raise ValueError("non-finite value in model file")
        ws.append(W)
        bs.append(b)
    return MlpModel(ws, bs)
