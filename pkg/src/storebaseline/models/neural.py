"""Single-hidden-layer tanh network trained by full-batch gradient descent."""

from __future__ import annotations

import numpy as np


class TrainingDivergedError(RuntimeError):
    pass


def init_params(n_inputs: int, n_hidden: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Glorot-uniform weights, zero biases."""
    lim1 = np.sqrt(6.0 / (n_inputs + n_hidden))
    lim2 = np.sqrt(6.0 / (n_hidden + 1))
    return {
        "W1": rng.uniform(-lim1, lim1, size=(n_inputs, n_hidden)),
        "b1": np.zeros(n_hidden),
        "w2": rng.uniform(-lim2, lim2, size=n_hidden),
        "b2": np.zeros(1),
    }


def forward(params: dict[str, np.ndarray], Z: np.ndarray) -> np.ndarray:
    H = np.tanh(Z @ params["W1"] + params["b1"])
    return H @ params["w2"] + params["b2"][0]


def loss_and_grad(
    params: dict[str, np.ndarray], Z: np.ndarray, t: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error and its gradient by backpropagation."""
    n = len(t)
    H = np.tanh(Z @ params["W1"] + params["b1"])
    r = H @ params["w2"] + params["b2"][0] - t
    loss = float(r @ r) / n
    d_out = (2.0 / n) * r
    dA = np.outer(d_out, params["w2"]) * (1.0 - H * H)
    grads = {
        "W1": Z.T @ dA,
        "b1": dA.sum(axis=0),
        "w2": H.T @ d_out,
        "b2": np.array([d_out.sum()]),
    }
    return loss, grads


def train(
    Z: np.ndarray,
    t: np.ndarray,
    n_hidden: int,
    epochs: int,
    learning_rate: float,
    rng: np.random.Generator,
) -> tuple[dict[str, np.ndarray], float]:
    """Return fitted parameters and the final training loss."""
    params = init_params(Z.shape[1], n_hidden, rng)
    loss = np.nan
    for _ in range(epochs):
        loss, grads = loss_and_grad(params, Z, t)
        if not np.isfinite(loss):
            raise TrainingDivergedError("diverged; reduce learning_rate")
        for k in params:
            params[k] -= learning_rate * grads[k]
    loss, _ = loss_and_grad(params, Z, t)
    if not np.isfinite(loss):
        raise TrainingDivergedError("diverged; reduce learning_rate")
    return params, loss
