"""Pure numpy implementations of the kernels in ``_kernels.pyx``.

Signatures and semantics match the compiled module exactly; only the
floating-point summation order inside matrix products may differ.
"""

import numpy as np

NAME = "python"


def nd_rank(objs):
    objs = np.asarray(objs, dtype=np.float64)
    n = objs.shape[0]
    rank = np.zeros(n, dtype=np.int64)
    if n == 0:
        return rank
    le = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    lt = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dom = le & lt  # dom[p, q]: p dominates q
    count = dom.sum(axis=0)
    current = np.flatnonzero(count == 0)
    front = 1
    while current.size:
        rank[current] = front
        count = count - dom[current].sum(axis=0)
        count[rank > 0] = -1
        current = np.flatnonzero(count == 0)
        front += 1
    return rank


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _forward(X, W1, b1, W2, b2, slope):
    z1 = X @ W1.T + b1
    a1 = np.where(z1 > 0, z1, slope * z1)
    return z1, a1, _sigmoid(a1 @ W2 + b2)


def train_mlp(Xf, yf, Xv, yv, W1, b1, W2, b2, order, lr, momentum, batch, slope):
    epochs, m = order.shape
    val_mse = np.zeros(epochs)
    train_loss = np.zeros(epochs)
    vW1 = np.zeros_like(W1)
    vb1 = np.zeros_like(b1)
    vW2 = np.zeros_like(W2)
    vb2 = 0.0
    for e in range(epochs):
        loss_sum = 0.0
        for start in range(0, m, batch):
            rows = order[e, start:start + batch]
            X = Xf[rows]
            y = yf[rows]
            z1, a1, yhat = _forward(X, W1, b1, W2, b2[0], slope)
            clipped = np.clip(yhat, 1e-7, 1.0 - 1e-7)
            loss_sum += float(-(y * np.log(clipped) + (1.0 - y) * np.log(1.0 - clipped)).sum())
            g2 = (yhat - y) / len(rows)
            gW2 = a1.T @ g2
            gb2 = g2.sum()
            dz1 = np.outer(g2, W2) * np.where(z1 > 0, 1.0, slope)
            gW1 = dz1.T @ X
            gb1 = dz1.sum(axis=0)
            vW1 *= momentum
            vW1 -= lr * gW1
            W1 += vW1
            vb1 *= momentum
            vb1 -= lr * gb1
            b1 += vb1
            vW2 *= momentum
            vW2 -= lr * gW2
            W2 += vW2
            vb2 = momentum * vb2 - lr * gb2
            b2[0] += vb2
        train_loss[e] = loss_sum / m
        _, _, yhat = _forward(Xv, W1, b1, W2, b2[0], slope)
        val_mse[e] = float(np.mean((yv - yhat) ** 2))
    return val_mse, train_loss


def train_pegasos(X, y, order, lam):
    epochs, m = order.shape
    k = X.shape[1]
    w = np.zeros(k + 1)
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    radius2 = 1.0 / lam
    t = 0
    for e in range(epochs):
        for r in order[e]:
            t += 1
            eta = 1.0 / (lam * t)
            margin = y[r] * float(Xa[r] @ w)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += (eta * y[r]) * Xa[r]
            norm2 = float(w @ w)
            if norm2 > radius2:
                w *= np.sqrt(radius2 / norm2)
    return w
