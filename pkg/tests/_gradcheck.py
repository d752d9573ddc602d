"""Shared finite-difference gradient checking for the learner tests."""

from __future__ import annotations

import numpy as np

from uavjam.learner.net import QNetwork
from uavjam.learner.optim import compute_loss_grads

REL_TOL = 1e-4
_FLOOR = 1e-3  # relative-error denominator floor for near-zero gradients


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(_FLOOR, abs(a), abs(b))


def gradcheck_draw(rng: np.random.Generator, dueling: bool,
                   coords_per_tensor: int = 12,
                   with_l2: bool = True) -> float:
    """One random parameter/input draw: build a random small net, compare
    analytic gradients against central finite differences on a random
    subset of coordinates of every tensor.  Returns the worst relative
    error seen."""
    input_dim = int(rng.integers(3, 13))
    action_count = int(rng.integers(2, 7))
    depth = int(rng.integers(1, 3))
    hidden = tuple(int(rng.integers(4, 11)) for _ in range(depth))
    batch = int(rng.integers(2, 9))
    net = QNetwork(input_dim, action_count, hidden, dueling=dueling,
                   rng=np.random.default_rng(int(rng.integers(2**31))))
    states = rng.normal(size=(batch, input_dim))
    actions = rng.integers(0, action_count, size=batch)
    targets = rng.normal(size=batch)
    l2 = float(rng.uniform(1e-4, 1e-2)) if with_l2 else 0.0

    def loss_only() -> float:
        loss, _ = compute_loss_grads(net, states, actions, targets, l2,
                                     update_stats=False)
        return loss

    _, grads = compute_loss_grads(net, states, actions, targets, l2,
                                  update_stats=False)
    worst = 0.0
    for name, tensor in net.params.items():
        flat = tensor.reshape(-1)
        k = min(coords_per_tensor, flat.size)
        picks = rng.choice(flat.size, size=k, replace=False)
        for idx in picks:
            orig = flat[idx]
            h = 1e-5 * max(1.0, abs(orig))
            flat[idx] = orig + h
            up = loss_only()
            flat[idx] = orig - h
            down = loss_only()
            flat[idx] = orig
            numeric = (up - down) / (2.0 * h)
            analytic = grads[name].reshape(-1)[idx]
            worst = max(worst, _rel_err(analytic, numeric))
    return worst
