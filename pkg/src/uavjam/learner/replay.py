"""Uniform experience replay with ring-buffer eviction.

Storage is array-backed (grown geometrically up to capacity) so sampling
is a single fancy-index gather rather than a per-item stack.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np


class Transition(NamedTuple):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool


class Batch(NamedTuple):
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray


class ReplayBuffer:
    """Fixed-capacity store; once full, each insert overwrites the oldest
    entry.  Sampling is uniform without replacement."""

    _INITIAL_ROWS = 1024

    def __init__(self, capacity: int) -> None:
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self._size = 0
        self._cursor = 0          # next slot to overwrite once full
        self._states: Optional[np.ndarray] = None
        self._actions: Optional[np.ndarray] = None
        self._rewards: Optional[np.ndarray] = None
        self._next_states: Optional[np.ndarray] = None
        self._terminals: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self._size

    def _ensure_room(self, dim: int) -> None:
        if self._states is None:
            rows = min(self._INITIAL_ROWS, self.capacity)
            self._states = np.empty((rows, dim))
            self._next_states = np.empty((rows, dim))
            self._actions = np.empty(rows, dtype=np.intp)
            self._rewards = np.empty(rows)
            self._terminals = np.empty(rows, dtype=bool)
        elif self._size == len(self._actions) and self._size < self.capacity:
            rows = min(2 * len(self._actions), self.capacity)
            grow = lambda a: np.resize(a, (rows,) + a.shape[1:])  # noqa: E731
            self._states = grow(self._states)
            self._next_states = grow(self._next_states)
            self._actions = grow(self._actions)
            self._rewards = grow(self._rewards)
            self._terminals = grow(self._terminals)

    def push(self, state: np.ndarray, action: int, reward: float,
             next_state: np.ndarray, terminal: bool) -> None:
        state = np.asarray(state, dtype=np.float64)
        self._ensure_room(state.shape[0])
        if self._size < self.capacity:
            idx = self._size
            self._size += 1
        else:
            idx = self._cursor
            self._cursor = (self._cursor + 1) % self.capacity
        self._states[idx] = state
        self._actions[idx] = int(action)
        self._rewards[idx] = float(reward)
        self._next_states[idx] = np.asarray(next_state, dtype=np.float64)
        self._terminals[idx] = bool(terminal)

    def peek(self, index: int) -> Transition:
        """Entries in insertion-age order: index 0 is the oldest survivor."""
        if not 0 <= index < self._size:
            raise IndexError(index)
        if self._size == self.capacity:
            index = (self._cursor + index) % self.capacity
        return Transition(self._states[index].copy(),
                          int(self._actions[index]),
                          float(self._rewards[index]),
                          self._next_states[index].copy(),
                          bool(self._terminals[index]))

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if batch_size > self._size:
            raise ValueError("not enough transitions to sample")
        idx = rng.choice(self._size, size=batch_size, replace=False)
        return Batch(
            states=self._states[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_states=self._next_states[idx],
            terminals=self._terminals[idx],
        )
