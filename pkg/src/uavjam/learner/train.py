"""Episode-loop training and greedy evaluation.

The loop: act epsilon-greedily (linear decay), store transitions in the
replay buffer, and once the buffer holds a full minibatch perform one
uniform-minibatch update per environment step, copying the online network
into the target network every ``target_sync_every`` steps.

Determinism: for a fixed seed, single-threaded runs are bit-stable.  All
randomness flows through named substreams of the run seed (weight init,
exploration, replay sampling, per-episode scenario seeds), so two runs
that share a seed replay identical episodes.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Protocol

import numpy as np

from ..rng import substream
from .net import QNetwork
from .optim import AdamOptimizer, sgd_step
from .policy import VARIANTS, greedy_action, select_action, td_targets
from .replay import ReplayBuffer


class Task(Protocol):
    """Environment adapter the loop trains against."""

    @property
    def action_count(self) -> int: ...

    @property
    def feature_length(self) -> int: ...

    def reset(self, seed: int) -> np.ndarray: ...

    def step(self, action: int) -> tuple[np.ndarray, float, bool, dict]: ...


@dataclass(frozen=True)
class TrainConfig:
    variant: str = "d3qn"
    hidden: tuple[int, ...] = (256, 256, 128)
    gamma: float = 0.95
    lr: float = 3e-4
    batch_size: int = 256
    l2_reg: float = 1e-4
    epsilon_start: float = 0.5
    epsilon_end: float = 0.1
    epsilon_decay_steps: int = 20_000
    replay_capacity: int = 1_000_000
    target_sync_every: int = 1000
    total_episodes: int = 500
    max_env_steps: Optional[int] = None
    bn_momentum: float = 0.01

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.lr <= 0.0 or self.batch_size < 1 or self.l2_reg < 0.0:
            raise ValueError("lr, batch_size, l2_reg out of range")
        for eps in (self.epsilon_start, self.epsilon_end):
            if not 0.0 <= eps <= 1.0:
                raise ValueError("epsilon bounds must lie in [0, 1]")
        if self.epsilon_decay_steps < 1 or self.replay_capacity < 1:
            raise ValueError("epsilon_decay_steps and replay_capacity must be >= 1")
        if self.target_sync_every < 1 or self.total_episodes < 0:
            raise ValueError("target_sync_every must be >= 1, total_episodes >= 0")

    @property
    def dueling(self) -> bool:
        return self.variant == "d3qn"


def epsilon_at(config: TrainConfig, env_step: int) -> float:
    frac = min(1.0, max(0.0, env_step / config.epsilon_decay_steps))
    return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac


@dataclass
class CurveRow:
    episode: int
    steps: int
    ep_return: float
    epsilon: float
    loss_mean: float


@dataclass
class TrainResult:
    net: QNetwork
    curve: list[CurveRow] = field(default_factory=list)
    env_steps: int = 0


def _episode_seed(stream: np.random.Generator) -> int:
    return int(stream.integers(0, 2**63 - 1))


def train(task: Task, config: TrainConfig, seed: int,
          on_episode: Optional[Callable[[CurveRow], None]] = None) -> TrainResult:
    init_rng = substream(seed, "net-init")
    explore_rng = substream(seed, "explore")
    replay_rng = substream(seed, "replay")
    episode_stream = substream(seed, "episodes")

    net = QNetwork(task.feature_length, task.action_count, config.hidden,
                   dueling=config.dueling, rng=init_rng,
                   bn_momentum=config.bn_momentum)
    target = net.clone()
    optimizer = AdamOptimizer(net, config.lr)
    buffer = ReplayBuffer(config.replay_capacity)
    result = TrainResult(net=net)

    env_step = 0
    for episode in range(config.total_episodes):
        if config.max_env_steps is not None and env_step >= config.max_env_steps:
            break
        state = task.reset(_episode_seed(episode_stream))
        ep_epsilon = epsilon_at(config, env_step)
        ep_return = 0.0
        ep_steps = 0
        losses: list[float] = []
        terminal = False
        while not terminal:
            action = select_action(net, state, epsilon_at(config, env_step),
                                   explore_rng, task.action_count)
            next_state, reward, terminal, _ = task.step(action)
            buffer.push(state, action, reward, next_state, terminal)
            ep_return += reward
            ep_steps += 1
            env_step += 1
            if len(buffer) >= config.batch_size:
                batch = buffer.sample(config.batch_size, replay_rng)
                targets = td_targets(batch, net, target, config.gamma,
                                     config.variant)
                losses.append(sgd_step(net, optimizer, batch.states,
                                       batch.actions, targets, config.l2_reg))
            if env_step % config.target_sync_every == 0:
                target.copy_from(net)
            state = next_state
            if config.max_env_steps is not None and env_step >= config.max_env_steps:
                break
        row = CurveRow(episode=episode, steps=ep_steps, ep_return=ep_return,
                       epsilon=ep_epsilon,
                       loss_mean=float(np.mean(losses)) if losses else math.nan)
        result.curve.append(row)
        if on_episode is not None:
            on_episode(row)
    result.env_steps = env_step
    return result


CURVE_COLUMNS = ("episode", "steps", "return", "epsilon", "loss_mean")


def write_curve_csv(path: str | Path, curve: list[CurveRow]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_COLUMNS)
        for row in curve:
            writer.writerow([row.episode, row.steps,
                             f"{row.ep_return:.6f}", f"{row.epsilon:.6f}",
                             f"{row.loss_mean:.6f}" if math.isfinite(row.loss_mean)
                             else "nan"])


@dataclass
class EvalEpisode:
    index: int
    seed: int
    ep_return: float
    steps: int
    info: dict[str, Any]


def _run_greedy_episode(net: QNetwork, task: Task, index: int,
                        ep_seed: int) -> EvalEpisode:
    state = task.reset(ep_seed)
    ep_return = 0.0
    steps = 0
    terminal = False
    info: dict[str, Any] = {}
    while not terminal:
        action = greedy_action(net.q_values(state))
        state, reward, terminal, info = task.step(action)
        ep_return += reward
        steps += 1
    return EvalEpisode(index=index, seed=ep_seed, ep_return=ep_return,
                       steps=steps, info=info)


def evaluate(net: QNetwork, task_factory: Callable[[], Task], episodes: int,
             seed: int, workers: int = 1) -> list[EvalEpisode]:
    """Greedy-policy rollouts on per-index episode seeds.

    Episode i's scenario depends only on (seed, i), so evaluations that
    share a seed see identical scenario draws regardless of worker count
    or the configuration under test.
    """
    if episodes < 0 or workers < 1:
        raise ValueError("episodes must be >= 0 and workers >= 1")
    seeds = [_episode_seed(substream(seed, "eval", i)) for i in range(episodes)]
    if workers == 1:
        task = task_factory()
        return [_run_greedy_episode(net, task, i, s)
                for i, s in enumerate(seeds)]

    def job(pair: tuple[int, int]) -> EvalEpisode:
        i, ep_seed = pair
        return _run_greedy_episode(net, task_factory(), i, ep_seed)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, enumerate(seeds)))
