"""Compiled kernels vs the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Prints the median wall time of each kernel under both backends and the
speedup. Exits early with a note when the extension is not built.
"""

import argparse
import statistics
import time

import numpy as np

from moefs import _fallback

try:
    from moefs import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def cases(rng):
    objs = rng.random((800, 2))
    yield "nd_rank n=800", lambda b: b.nd_rank(objs)

    n, k, h, epochs = 160, 12, 15, 10
    X = rng.standard_normal((n, k))
    y = (X[:, 0] > 0).astype(np.float64)
    Xv, yv = X[:40].copy(), y[:40].copy()
    order = np.stack([rng.permutation(n) for _ in range(epochs)]).astype(np.int64)
    W1, W2 = rng.uniform(-0.5, 0.5, (h, k)), rng.uniform(-0.5, 0.5, h)

    def mlp(b):
        b.train_mlp(X, y, Xv, yv, W1.copy(), np.zeros(h), W2.copy(), np.zeros(1),
                    order, 0.1, 0.9, 32, 0.01)

    yield f"train_mlp n={n} k={k} h={h}", mlp

    ys = np.where(y > 0, 1.0, -1.0)
    sv_order = np.stack([rng.permutation(n) for _ in range(100)]).astype(np.int64)
    yield "train_pegasos 100 epochs", lambda b: b.train_pegasos(X, ys, sv_order, 1e-4)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return
    print(f"{'kernel':32s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for name, fn in cases(np.random.default_rng(0)):
        fast = _time(lambda: fn(_kernels), args.repeat)
        slow = _time(lambda: fn(_fallback), args.repeat)
        print(f"{name:32s} {fast * 1e3:10.3f} {slow * 1e3:10.3f} {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
