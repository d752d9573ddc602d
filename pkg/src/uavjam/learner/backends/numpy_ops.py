"""Reference implementations of the dense-net kernels, pure numpy.

The compiled backend mirrors this module exactly; parity tests compare
the two op by op.  All arrays are float64, C-contiguous.
"""

from __future__ import annotations

import numpy as np

NAME = "py"


def gemm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b


def gemm_tn(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a.T @ b without materializing the transpose."""
    return a.T @ b


def gemm_nt(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ b.T without materializing the transpose."""
    return a @ b.T


def add_bias(x: np.ndarray, b: np.ndarray) -> np.ndarray:
    return x + b


def relu(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mask = x > 0.0
    return np.where(mask, x, 0.0), mask


def relu_grad(dout: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, dout, 0.0)


def bn_train(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Batch-statistics normalization.  Returns (out, xhat, mean, inv_std);
    variance is the biased batch variance."""
    mean = x.mean(axis=0)
    var = x.var(axis=0)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean) * inv_std
    return gamma * xhat + beta, xhat, mean, inv_std


def bn_eval(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray,
            mean: np.ndarray, var: np.ndarray, eps: float) -> np.ndarray:
    """Running-statistics normalization (policy/target forwards)."""
    return gamma * (x - mean) / np.sqrt(var + eps) + beta


def bn_grad(dout: np.ndarray, xhat: np.ndarray, inv_std: np.ndarray,
            gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = dout.shape[0]
    dbeta = dout.sum(axis=0)
    dgamma = (dout * xhat).sum(axis=0)
    dx = (gamma * inv_std / n) * (n * dout - dbeta - xhat * dgamma)
    return dx, dgamma, dbeta


def adam(p: np.ndarray, g: np.ndarray, m: np.ndarray, v: np.ndarray,
         lr: float, beta1: float, beta2: float, eps: float, t: int) -> None:
    """In-place Adam step with bias correction; t is 1-based."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * g * g
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    p -= lr * m_hat / (np.sqrt(v_hat) + eps)
