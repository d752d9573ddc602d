"""Value-based reinforcement-learning stack: dense Q-networks (plain and
dueling heads), decoupled bootstrap targets, uniform replay, Adam, and an
episode training loop.  Heavy kernels run through a swappable backend
(compiled extension or pure numpy)."""

from .backends import BACKEND_NAME, ops
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .net import QNetwork
from .optim import AdamOptimizer, NumericalError, compute_loss_grads, sgd_step
from .policy import VARIANTS, greedy_action, select_action, td_targets
from .replay import Batch, ReplayBuffer, Transition
from .train import (CURVE_COLUMNS, CurveRow, EvalEpisode, Task, TrainConfig,
                    TrainResult, epsilon_at, evaluate, train, write_curve_csv)

__all__ = [
    "BACKEND_NAME", "ops", "CheckpointError", "load_checkpoint",
    "save_checkpoint", "QNetwork", "AdamOptimizer", "NumericalError",
    "compute_loss_grads", "sgd_step", "VARIANTS", "greedy_action",
    "select_action", "td_targets", "Batch", "ReplayBuffer", "Transition",
    "CURVE_COLUMNS", "CurveRow", "EvalEpisode", "Task", "TrainConfig",
    "TrainResult", "epsilon_at", "evaluate", "train", "write_curve_csv",
]
