"""Compiled inner loops for the sigmoid networks.

Parameters live in one flat float64 buffer. Layer ``k`` owns a row-major
``(sizes[k], sizes[k+1])`` weight block at ``w_off[k]`` followed by its bias
vector at ``b_off[k]``. Activations and deltas share the ``a_off`` layout.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _sig(h, beta):
    return 1.0 / (1.0 + math.exp(-beta * h))


@njit(cache=True)
def forward_layers(params, sizes, w_off, b_off, a_off, acts, beta, first, last):
    """Propagate from layer ``first`` to ``last``; input must already sit in
    ``acts`` at ``a_off[first]``."""
    for k in range(first, last):
        fi = sizes[k]
        fo = sizes[k + 1]
        src = a_off[k]
        dst = a_off[k + 1]
        wo = w_off[k]
        bo = b_off[k]
        for j in range(fo):
            acts[dst + j] = params[bo + j]
        for i in range(fi):
            a = acts[src + i]
            row = wo + i * fo
            for j in range(fo):
                acts[dst + j] += a * params[row + j]
        for j in range(fo):
            acts[dst + j] = _sig(acts[dst + j], beta)


@njit(cache=True)
def gradient(params, sizes, w_off, b_off, a_off, x, t, beta, acts, deltas, grad):
    """Fill ``grad`` with d/dθ of mean_j (y_j - t_j)^2; return that loss."""
    n_layers = sizes.shape[0]
    for i in range(sizes[0]):
        acts[i] = x[i]
    forward_layers(params, sizes, w_off, b_off, a_off, acts, beta, 0, n_layers - 1)

    out = a_off[n_layers - 1]
    m = sizes[n_layers - 1]
    loss = 0.0
    for j in range(m):
        y = acts[out + j]
        r = y - t[j]
        loss += r * r
        deltas[out + j] = (2.0 * r / m) * beta * y * (1.0 - y)
    loss /= m

    for k in range(n_layers - 2, -1, -1):
        fi = sizes[k]
        fo = sizes[k + 1]
        src = a_off[k]
        dst = a_off[k + 1]
        wo = w_off[k]
        bo = b_off[k]
        for j in range(fo):
            grad[bo + j] = deltas[dst + j]
        for i in range(fi):
            a = acts[src + i]
            row = wo + i * fo
            back = 0.0
            for j in range(fo):
                d = deltas[dst + j]
                grad[row + j] = a * d
                back += params[row + j] * d
            if k > 0:
                deltas[src + i] = back * beta * a * (1.0 - a)
    return loss


@njit(cache=True)
def sgd_step(params, sizes, w_off, b_off, a_off, x, t, lr, beta, acts, deltas, grad):
    loss = gradient(params, sizes, w_off, b_off, a_off, x, t, beta, acts, deltas, grad)
    for p in range(params.shape[0]):
        params[p] -= lr * grad[p]
    return loss


@njit(cache=True)
def sgd_epoch(params, sizes, w_off, b_off, a_off, X, T, order, lr, beta):
    """One online pass in the given order; returns the mean pre-update loss."""
    n_act = a_off[sizes.shape[0] - 1] + sizes[sizes.shape[0] - 1]
    acts = np.empty(n_act)
    deltas = np.zeros(n_act)
    grad = np.empty(params.shape[0])
    total = 0.0
    for idx in order:
        total += sgd_step(
            params, sizes, w_off, b_off, a_off, X[idx], T[idx], lr, beta, acts, deltas, grad
        )
    return total / order.shape[0]


@njit(cache=True)
def forward_batch(params, sizes, w_off, b_off, a_off, X, beta, first, last):
    """Row-wise forward from layer ``first`` to ``last`` for every row of X."""
    n = X.shape[0]
    n_act = a_off[sizes.shape[0] - 1] + sizes[sizes.shape[0] - 1]
    acts = np.empty(n_act)
    fo = sizes[last]
    out = np.empty((n, fo))
    src = a_off[first]
    dst = a_off[last]
    for r in range(n):
        for i in range(sizes[first]):
            acts[src + i] = X[r, i]
        forward_layers(params, sizes, w_off, b_off, a_off, acts, beta, first, last)
        for j in range(fo):
            out[r, j] = acts[dst + j]
    return out
