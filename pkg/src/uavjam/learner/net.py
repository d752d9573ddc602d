"""Dense action-value network.

Architecture: a trunk of fully-connected layers, each affine ->
batch-normalization -> ReLU, followed by either a single affine head
producing one value per action, or (dueling mode) separate state-value
and advantage heads combined as ``Q = V + A - mean(A)``.

Normalization semantics:

* training forwards (the loss pass) normalize with the statistics of the
  current minibatch and may fold them into the running estimates;
* evaluation forwards (action selection, bootstrap targets) always use
  the running estimates.

All math runs in float64 through the selected kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .backends import ops


def _he_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass
class _LayerCache:
    x_in: np.ndarray
    xhat: np.ndarray
    inv_std: np.ndarray
    mask: np.ndarray


@dataclass
class ForwardCache:
    layers: list[_LayerCache] = field(default_factory=list)
    trunk_out: Optional[np.ndarray] = None


class QNetwork:
    """Action-value network with He-uniform init and copyable state."""

    def __init__(self, input_dim: int, action_count: int,
                 hidden: tuple[int, ...] = (256, 256, 128),
                 dueling: bool = True,
                 rng: Optional[np.random.Generator] = None,
                 bn_eps: float = 1e-5, bn_momentum: float = 0.01) -> None:
        if input_dim <= 0 or action_count <= 0 or not hidden:
            raise ValueError("input_dim, action_count and hidden must be positive")
        if rng is None:
            rng = np.random.default_rng()
        self.input_dim = int(input_dim)
        self.action_count = int(action_count)
        self.hidden = tuple(int(h) for h in hidden)
        self.dueling = bool(dueling)
        self.bn_eps = float(bn_eps)
        self.bn_momentum = float(bn_momentum)

        self.params: dict[str, np.ndarray] = {}
        self.stats: dict[str, np.ndarray] = {}
        sizes = (self.input_dim,) + self.hidden
        for i in range(len(self.hidden)):
            fan_in, fan_out = sizes[i], sizes[i + 1]
            self.params[f"W{i}"] = _he_uniform(rng, fan_in, fan_out)
            self.params[f"b{i}"] = np.zeros(fan_out)
            self.params[f"g{i}"] = np.ones(fan_out)
            self.params[f"be{i}"] = np.zeros(fan_out)
            self.stats[f"rm{i}"] = np.zeros(fan_out)
            self.stats[f"rv{i}"] = np.ones(fan_out)
        top = self.hidden[-1]
        if self.dueling:
            self.params["Wv"] = _he_uniform(rng, top, 1)
            self.params["bv"] = np.zeros(1)
            self.params["Wa"] = _he_uniform(rng, top, self.action_count)
            self.params["ba"] = np.zeros(self.action_count)
        else:
            self.params["Wq"] = _he_uniform(rng, top, self.action_count)
            self.params["bq"] = np.zeros(self.action_count)

    # -- weight bookkeeping -------------------------------------------------

    def l2_param_names(self) -> tuple[str, ...]:
        """Affine weight matrices (penalized); biases and norm gain/shift
        are not."""
        names = [f"W{i}" for i in range(len(self.hidden))]
        names += ["Wv", "Wa"] if self.dueling else ["Wq"]
        return tuple(names)

    def copy_from(self, other: "QNetwork") -> None:
        if (other.input_dim, other.action_count, other.hidden, other.dueling) != \
                (self.input_dim, self.action_count, self.hidden, self.dueling):
            raise ValueError("network shapes differ")
        for k, v in other.params.items():
            self.params[k][...] = v
        for k, v in other.stats.items():
            self.stats[k][...] = v

    def clone(self) -> "QNetwork":
        twin = QNetwork(self.input_dim, self.action_count, self.hidden,
                        self.dueling, rng=np.random.default_rng(0),
                        bn_eps=self.bn_eps, bn_momentum=self.bn_momentum)
        twin.copy_from(self)
        return twin

    # -- forward / backward ---------------------------------------------------

    def forward(self, x: np.ndarray, train: bool = False,
                update_stats: bool = False) -> tuple[np.ndarray, Optional[ForwardCache]]:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.input_dim:
            raise ValueError(
                f"feature length {x.shape[1]} != network input {self.input_dim}")
        cache = ForwardCache() if train else None
        h = x
        for i in range(len(self.hidden)):
            lin = ops.add_bias(ops.gemm(h, self.params[f"W{i}"]), self.params[f"b{i}"])
            if train:
                out, xhat, mean, inv_std = ops.bn_train(
                    lin, self.params[f"g{i}"], self.params[f"be{i}"], self.bn_eps)
                if update_stats:
                    var = 1.0 / (np.asarray(inv_std) ** 2) - self.bn_eps
                    m = self.bn_momentum
                    self.stats[f"rm{i}"] *= 1.0 - m
                    self.stats[f"rm{i}"] += m * np.asarray(mean)
                    self.stats[f"rv{i}"] *= 1.0 - m
                    self.stats[f"rv{i}"] += m * var
                act, mask = ops.relu(out)
                assert cache is not None
                cache.layers.append(_LayerCache(h, np.asarray(xhat),
                                                np.asarray(inv_std), mask))
            else:
                out = ops.bn_eval(lin, self.params[f"g{i}"], self.params[f"be{i}"],
                                  self.stats[f"rm{i}"], self.stats[f"rv{i}"],
                                  self.bn_eps)
                act, _ = ops.relu(out)
            h = np.asarray(act)
        if cache is not None:
            cache.trunk_out = h
        if self.dueling:
            v = ops.add_bias(ops.gemm(h, self.params["Wv"]), self.params["bv"])
            a = ops.add_bias(ops.gemm(h, self.params["Wa"]), self.params["ba"])
            q = np.asarray(v) + np.asarray(a) - np.asarray(a).mean(axis=1, keepdims=True)
        else:
            q = np.asarray(ops.add_bias(ops.gemm(h, self.params["Wq"]),
                                        self.params["bq"]))
        return q, cache

    def q_values(self, features: np.ndarray) -> np.ndarray:
        """Evaluation-mode action values for a single feature vector."""
        q, _ = self.forward(features, train=False)
        return q[0]

    def backward(self, cache: ForwardCache, d_q: np.ndarray) -> dict[str, np.ndarray]:
        if cache.trunk_out is None:
            raise ValueError("cache does not come from a training forward")
        grads: dict[str, np.ndarray] = {}
        h = cache.trunk_out
        d_q = np.ascontiguousarray(d_q, dtype=np.float64)
        if self.dueling:
            d_v = np.ascontiguousarray(d_q.sum(axis=1, keepdims=True))
            d_a = np.ascontiguousarray(d_q - d_q.mean(axis=1, keepdims=True))
            grads["Wv"] = np.asarray(ops.gemm_tn(h, d_v))
            grads["bv"] = d_v.sum(axis=0)
            grads["Wa"] = np.asarray(ops.gemm_tn(h, d_a))
            grads["ba"] = d_a.sum(axis=0)
            dh = np.asarray(ops.gemm_nt(d_v, self.params["Wv"])) + \
                np.asarray(ops.gemm_nt(d_a, self.params["Wa"]))
        else:
            grads["Wq"] = np.asarray(ops.gemm_tn(h, d_q))
            grads["bq"] = d_q.sum(axis=0)
            dh = np.asarray(ops.gemm_nt(d_q, self.params["Wq"]))
        for i in reversed(range(len(self.hidden))):
            layer = cache.layers[i]
            d_act = ops.relu_grad(np.ascontiguousarray(dh), layer.mask)
            d_lin, d_gamma, d_beta = ops.bn_grad(
                np.ascontiguousarray(d_act), layer.xhat, layer.inv_std,
                self.params[f"g{i}"])
            d_lin = np.asarray(d_lin)
            grads[f"W{i}"] = np.asarray(ops.gemm_tn(layer.x_in, d_lin))
            grads[f"b{i}"] = d_lin.sum(axis=0)
            grads[f"g{i}"] = np.asarray(d_gamma)
            grads[f"be{i}"] = np.asarray(d_beta)
            dh = np.asarray(ops.gemm_nt(d_lin, self.params[f"W{i}"]))
        return grads
