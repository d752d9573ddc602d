"""Adam optimizer and the minibatch update step.

The loss is the mean squared error between the bootstrap targets and the
value of the action actually taken in each transition, plus an L2 penalty
on the affine weight matrices only (biases and normalization gain/shift
are unpenalized).
"""

from __future__ import annotations

import numpy as np

from .backends import ops
from .net import QNetwork


class NumericalError(RuntimeError):
    """Raised when training produces a non-finite loss or parameters."""


class AdamOptimizer:
    def __init__(self, net: QNetwork, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8) -> None:
        if lr <= 0.0:
            raise ValueError("lr must be positive")
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.t = 0
        self._m = {k: np.zeros(v.size) for k, v in net.params.items()}
        self._v = {k: np.zeros(v.size) for k, v in net.params.items()}

    def step(self, net: QNetwork, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        for name in sorted(net.params):
            ops.adam(net.params[name].reshape(-1),
                     np.ascontiguousarray(grads[name], dtype=np.float64).reshape(-1),
                     self._m[name], self._v[name],
                     self.lr, self.beta1, self.beta2, self.eps, self.t)


def compute_loss_grads(net: QNetwork, states: np.ndarray, actions: np.ndarray,
                       targets: np.ndarray, l2_reg: float,
                       update_stats: bool = True
                       ) -> tuple[float, dict[str, np.ndarray]]:
    """Training forward + backward; returns (loss, gradients)."""
    states = np.ascontiguousarray(states, dtype=np.float64)
    actions = np.asarray(actions, dtype=np.intp)
    targets = np.asarray(targets, dtype=np.float64)
    n = states.shape[0]
    q, cache = net.forward(states, train=True, update_stats=update_stats)
    taken = q[np.arange(n), actions]
    err = taken - targets
    loss = float(np.mean(err * err))
    d_q = np.zeros_like(q)
    d_q[np.arange(n), actions] = 2.0 * err / n
    assert cache is not None
    grads = net.backward(cache, d_q)
    if l2_reg > 0.0:
        for name in net.l2_param_names():
            w = net.params[name]
            loss += l2_reg * float(np.sum(w * w))
            grads[name] = grads[name] + 2.0 * l2_reg * w
    return loss, grads


def sgd_step(net: QNetwork, optimizer: AdamOptimizer, states: np.ndarray,
             actions: np.ndarray, targets: np.ndarray, l2_reg: float) -> float:
    """One minibatch update; returns the loss before the parameter step."""
    loss, grads = compute_loss_grads(net, states, actions, targets, l2_reg)
    if not np.isfinite(loss):
        raise NumericalError(f"non-finite training loss: {loss!r}")
    optimizer.step(net, grads)
    return loss
