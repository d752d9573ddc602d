"""Compare the pure-numpy and compiled kernel backends.

Runs each backend in a subprocess (the backend is chosen at import time
via the UAVJAM_BACKEND environment variable) and reports per-op
microbenchmarks plus the end-to-end minibatch update step the training
loop spends its time in.

Usage: python3 benchmarks/bench_backends.py [--steps N] [--batch N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, min_seconds: float = 0.2) -> float:
    """Best-of-3 mean seconds per call."""
    fn()  # warm up
    best = float("inf")
    for _ in range(3):
        n = 0
        t0 = time.perf_counter()
        while True:
            fn()
            n += 1
            dt = time.perf_counter() - t0
            if dt >= min_seconds:
                break
        best = min(best, dt / n)
    return best


def run_worker(batch: int, steps: int) -> None:
    import numpy as np

    from uavjam.learner.backends import BACKEND_NAME, ops
    from uavjam.learner.net import QNetwork
    from uavjam.learner.optim import AdamOptimizer, sgd_step

    want = os.environ.get("UAVJAM_BACKEND")
    assert BACKEND_NAME == want, f"loaded {BACKEND_NAME}, wanted {want}"

    rng = np.random.default_rng(0)
    results: dict[str, float] = {}

    a = rng.standard_normal((batch, 98))
    w = rng.standard_normal((98, 256))
    g = rng.standard_normal((batch, 256))
    gamma = np.ones(256)
    beta = np.zeros(256)
    p = rng.standard_normal((256, 256))
    grad = rng.standard_normal((256, 256))
    m = np.zeros_like(p)
    v = np.zeros_like(p)

    results["gemm_us"] = _time(lambda: ops.gemm(a, w)) * 1e6
    results["gemm_tn_us"] = _time(lambda: ops.gemm_tn(a, g)) * 1e6
    results["relu_us"] = _time(lambda: ops.relu(g)) * 1e6
    results["bn_train_us"] = _time(lambda: ops.bn_train(g, gamma, beta, 1e-5)) * 1e6
    results["adam_us"] = _time(
        lambda: ops.adam(p.reshape(-1), grad.reshape(-1), m.reshape(-1),
                         v.reshape(-1), 1e-3, 0.9, 0.999, 1e-8, 1)) * 1e6

    for label, hidden in (("small", (128, 64)), ("full", (256, 256, 128))):
        net = QNetwork(98, 22, hidden=hidden, rng=np.random.default_rng(1))
        opt = AdamOptimizer(net, lr=1e-4)
        states = rng.standard_normal((batch, 98))
        actions = rng.integers(0, 22, size=batch)
        targets = rng.standard_normal(batch)
        first_loss = sgd_step(net, opt, states, actions, targets, 1e-4)
        t0 = time.perf_counter()
        for _ in range(steps):
            sgd_step(net, opt, states, actions, targets, 1e-4)
        results[f"update_{label}_ms"] = (time.perf_counter() - t0) / steps * 1e3
        results[f"first_loss_{label}"] = first_loss

    print(json.dumps({"backend": BACKEND_NAME, **results}))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=300,
                        help="update steps per end-to-end timing")
    parser.add_argument("--batch", type=int, default=128)
    parser.add_argument("--worker", choices=("py", "ext"), default=None,
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        run_worker(args.batch, args.steps)
        return 0

    rows = {}
    for backend in ("py", "ext"):
        env = dict(os.environ, UAVJAM_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker", backend,
             "--steps", str(args.steps), "--batch", str(args.batch)],
            capture_output=True, text=True, env=env)
        if proc.returncode != 0:
            print(f"{backend}: failed\n{proc.stderr}", file=sys.stderr)
            if backend == "ext":
                print("(compiled extension unavailable; nothing to compare)")
                continue
            return 1
        rows[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    if not rows:
        return 1
    metrics = [k for k in rows["py"] if k.endswith(("_us", "_ms"))]
    print(f"{'metric':<20}" + "".join(f"{b:>12}" for b in rows)
          + ("     speedup" if len(rows) == 2 else ""))
    for key in metrics:
        line = f"{key:<20}" + "".join(f"{rows[b][key]:12.3f}" for b in rows)
        if len(rows) == 2:
            line += f"{rows['py'][key] / rows['ext'][key]:11.2f}x"
        print(line)

    if len(rows) == 2:
        for label in ("small", "full"):
            a = rows["py"][f"first_loss_{label}"]
            b = rows["ext"][f"first_loss_{label}"]
            rel = abs(a - b) / max(abs(a), 1e-12)
            print(f"first-update loss parity ({label}): "
                  f"py {a:.12g}  ext {b:.12g}  rel.diff {rel:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
