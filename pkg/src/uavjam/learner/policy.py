"""Action selection and bootstrap-target construction.

Three update rules are supported:

* ``dqn``      -- targets bootstrap through the target network's own max;
* ``ddqn``     -- the online network picks the argmax action, the target
                  network scores it;
* ``d3qn``     -- same decoupled rule as ``ddqn``; the difference lives in
                  the network head (dueling), not the target.

Terminal transitions bootstrap nothing: the target is the reward alone.
"""

from __future__ import annotations

import numpy as np

from .net import QNetwork
from .replay import Batch

VARIANTS = ("dqn", "ddqn", "d3qn")


def greedy_action(q_row: np.ndarray) -> int:
    """Lowest index among the maxima."""
    return int(np.argmax(q_row))


def select_action(net: QNetwork, features: np.ndarray, epsilon: float,
                  rng: np.random.Generator, action_count: int) -> int:
    """Epsilon-greedy.  The exploration branch never consults the network,
    so epsilon = 1 performs no forward passes at all."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(action_count))
    return greedy_action(net.q_values(features))


def td_targets(batch: Batch, online: QNetwork, target: QNetwork,
               gamma: float, variant: str) -> np.ndarray:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    q_target, _ = target.forward(batch.next_states, train=False)
    if variant == "dqn":
        bootstrap = q_target.max(axis=1)
    else:
        q_online, _ = online.forward(batch.next_states, train=False)
        best = np.argmax(q_online, axis=1)
        bootstrap = q_target[np.arange(len(best)), best]
    cont = ~batch.terminals
    return batch.rewards + gamma * bootstrap * cont
