# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: dominance ranking, MLP training, Pegasos SVM.

Every function here has a numpy twin in ``_fallback`` with the same
signature. Callers precompute all randomness (initial weights, epoch
orderings) so both backends consume identical streams.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt

cnp.import_array()

NAME = "cython"


def nd_rank(const double[:, ::1] objs):
    """Front number (1-based) of every row under Pareto dominance."""
    cdef Py_ssize_t n = objs.shape[0]
    cdef Py_ssize_t m = objs.shape[1]
    cdef Py_ssize_t p, q, j, i, head, tail, nxt
    cdef bint le_pq, lt_pq, le_qp, lt_qp
    cdef double a, b
    rank_arr = np.zeros(n, dtype=np.int64)
    if n == 0:
        return rank_arr
    dom_arr = np.zeros((n, n), dtype=np.uint8)
    count_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.uint8_t[:, ::1] dom = dom_arr
    cdef cnp.int64_t[::1] count = count_arr
    cdef cnp.int64_t[::1] rank = rank_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.int64_t front

    with nogil:
        for p in range(n):
            for q in range(p + 1, n):
                le_pq = True
                lt_pq = False
                le_qp = True
                lt_qp = False
                for j in range(m):
                    a = objs[p, j]
                    b = objs[q, j]
                    if a > b:
                        le_pq = False
                        lt_qp = True
                    elif a < b:
                        le_qp = False
                        lt_pq = True
                if le_pq and lt_pq:
                    dom[p, q] = 1
                    count[q] += 1
                elif le_qp and lt_qp:
                    dom[q, p] = 1
                    count[p] += 1

        tail = 0
        for p in range(n):
            if count[p] == 0:
                rank[p] = 1
                queue[tail] = p
                tail += 1
        head = 0
        front = 1
        while head < tail:
            nxt = tail
            front += 1
            for i in range(head, tail):
                p = queue[i]
                for q in range(n):
                    if dom[p, q]:
                        count[q] -= 1
                        if count[q] == 0:
                            rank[q] = front
                            queue[nxt] = q
                            nxt += 1
            head = tail
            tail = nxt
    return rank_arr


cdef inline double _sigmoid(double z) nogil:
    cdef double e
    if z >= 0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef inline double _xent(double y, double yhat) nogil:
    if yhat < 1e-7:
        yhat = 1e-7
    elif yhat > 1.0 - 1e-7:
        yhat = 1.0 - 1e-7
    return -(y * log(yhat) + (1.0 - y) * log(1.0 - yhat))


cdef double _forward_row(const double[:, ::1] X, Py_ssize_t r,
                         double[:, ::1] W1, double[::1] b1, double[::1] W2,
                         double b2, double slope, double[::1] z1) nogil:
    cdef Py_ssize_t h = W1.shape[0]
    cdef Py_ssize_t k = W1.shape[1]
    cdef Py_ssize_t u, c
    cdef double s, out = b2
    for u in range(h):
        s = b1[u]
        for c in range(k):
            s += W1[u, c] * X[r, c]
        z1[u] = s
        if s > 0:
            out += W2[u] * s
        else:
            out += W2[u] * slope * s
    return _sigmoid(out)


def train_mlp(const double[:, ::1] Xf, const double[::1] yf,
              const double[:, ::1] Xv, const double[::1] yv,
              double[:, ::1] W1, double[::1] b1, double[::1] W2, double[::1] b2,
              const cnp.int64_t[:, ::1] order, double lr, double momentum,
              Py_ssize_t batch, double slope):
    """Mini-batch momentum descent on mean cross-entropy; updates weights in place.

    Returns ``(val_mse, train_loss)``, one entry per epoch. ``train_loss`` is
    the mean per-sample loss seen during the epoch (pre-update per batch).
    """
    cdef Py_ssize_t h = W1.shape[0]
    cdef Py_ssize_t k = W1.shape[1]
    cdef Py_ssize_t m = Xf.shape[0]
    cdef Py_ssize_t nv = Xv.shape[0]
    cdef Py_ssize_t epochs = order.shape[0]
    cdef Py_ssize_t e, start, stop, i, r, u, c, bsz
    cdef double yhat, g2, inv_b, da, sq, loss_sum, gb2, vb2 = 0.0

    val_arr = np.zeros(epochs, dtype=np.float64)
    loss_arr = np.zeros(epochs, dtype=np.float64)
    cdef double[::1] val_mse = val_arr
    cdef double[::1] train_loss = loss_arr
    cdef double[::1] z1 = np.zeros(h, dtype=np.float64)
    cdef double[:, ::1] gW1 = np.zeros((h, k), dtype=np.float64)
    cdef double[::1] gb1 = np.zeros(h, dtype=np.float64)
    cdef double[::1] gW2 = np.zeros(h, dtype=np.float64)
    cdef double[:, ::1] vW1 = np.zeros((h, k), dtype=np.float64)
    cdef double[::1] vb1 = np.zeros(h, dtype=np.float64)
    cdef double[::1] vW2 = np.zeros(h, dtype=np.float64)

    with nogil:
        for e in range(epochs):
            loss_sum = 0.0
            start = 0
            while start < m:
                stop = start + batch
                if stop > m:
                    stop = m
                bsz = stop - start
                inv_b = 1.0 / bsz
                for u in range(h):
                    gb1[u] = 0.0
                    gW2[u] = 0.0
                    for c in range(k):
                        gW1[u, c] = 0.0
                gb2 = 0.0
                for i in range(start, stop):
                    r = order[e, i]
                    yhat = _forward_row(Xf, r, W1, b1, W2, b2[0], slope, z1)
                    loss_sum += _xent(yf[r], yhat)
                    g2 = (yhat - yf[r]) * inv_b
                    gb2 += g2
                    for u in range(h):
                        if z1[u] > 0:
                            gW2[u] += g2 * z1[u]
                            da = g2 * W2[u]
                        else:
                            gW2[u] += g2 * slope * z1[u]
                            da = g2 * W2[u] * slope
                        gb1[u] += da
                        for c in range(k):
                            gW1[u, c] += da * Xf[r, c]
                for u in range(h):
                    for c in range(k):
                        vW1[u, c] = momentum * vW1[u, c] - lr * gW1[u, c]
                        W1[u, c] += vW1[u, c]
                    vb1[u] = momentum * vb1[u] - lr * gb1[u]
                    b1[u] += vb1[u]
                    vW2[u] = momentum * vW2[u] - lr * gW2[u]
                    W2[u] += vW2[u]
                vb2 = momentum * vb2 - lr * gb2
                b2[0] += vb2
                start = stop
            train_loss[e] = loss_sum / m
            sq = 0.0
            for r in range(nv):
                yhat = _forward_row(Xv, r, W1, b1, W2, b2[0], slope, z1)
                sq += (yv[r] - yhat) * (yv[r] - yhat)
            val_mse[e] = sq / nv
    return val_arr, loss_arr


def train_pegasos(const double[:, ::1] X, const double[::1] y,
                  const cnp.int64_t[:, ::1] order, double lam):
    """Pegasos on hinge loss + L2 with a regularized bias term.

    Returns the final iterate as an array of length ``k + 1`` (bias last).
    """
    cdef Py_ssize_t m = X.shape[0]
    cdef Py_ssize_t k = X.shape[1]
    cdef Py_ssize_t epochs = order.shape[0]
    cdef Py_ssize_t e, i, r, c
    cdef double t = 0.0, eta, shrink, margin, norm2, radius2, scale
    w_arr = np.zeros(k + 1, dtype=np.float64)
    cdef double[::1] w = w_arr
    radius2 = 1.0 / lam

    with nogil:
        for e in range(epochs):
            for i in range(m):
                r = order[e, i]
                t += 1.0
                eta = 1.0 / (lam * t)
                margin = w[k]
                for c in range(k):
                    margin += w[c] * X[r, c]
                margin *= y[r]
                shrink = 1.0 - eta * lam
                for c in range(k + 1):
                    w[c] *= shrink
                if margin < 1.0:
                    for c in range(k):
                        w[c] += eta * y[r] * X[r, c]
                    w[k] += eta * y[r]
                norm2 = 0.0
                for c in range(k + 1):
                    norm2 += w[c] * w[c]
                if norm2 > radius2:
                    scale = sqrt(radius2 / norm2)
                    for c in range(k + 1):
                        w[c] *= scale
    return w_arr
