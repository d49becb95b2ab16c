"""Pure-Python kernels, used when the compiled ``_core`` is unavailable.

Every function mirrors the signature and floating-point operation order of
its counterpart in ``_core.pyx``; ``integrate_lv`` is bit-identical between
the two.
"""
from __future__ import annotations

import math

import numpy as np


def integrate_lv(alpha, beta, gamma, delta, x0, y0, dt, n):
    """Fixed-step RK4 over ``n`` steps.

    Returns ``(states, fail_step)`` where ``fail_step`` is -1 on success or the
    1-based index of the first step that left the positive quadrant.
    """
    out = np.empty((n + 1, 2))
    out[0, 0] = x0
    out[0, 1] = y0
    x = float(x0)
    y = float(y0)
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for k in range(1, n + 1):
        k1x = alpha * x - beta * x * y
        k1y = delta * x * y - gamma * y
        xa = x + h2 * k1x
        ya = y + h2 * k1y
        k2x = alpha * xa - beta * xa * ya
        k2y = delta * xa * ya - gamma * ya
        xa = x + h2 * k2x
        ya = y + h2 * k2y
        k3x = alpha * xa - beta * xa * ya
        k3y = delta * xa * ya - gamma * ya
        xa = x + dt * k3x
        ya = y + dt * k3y
        k4x = alpha * xa - beta * xa * ya
        k4y = delta * xa * ya - gamma * ya
        x = x + h6 * (((k1x + 2.0 * k2x) + 2.0 * k3x) + k4x)
        y = y + h6 * (((k1y + 2.0 * k2y) + 2.0 * k3y) + k4y)
        if not (x > 0.0 and y > 0.0 and math.isfinite(x) and math.isfinite(y)):
            return out[:k], k
        out[k, 0] = x
        out[k, 1] = y
    return out, -1


def attention_loss_grad(X, Y, theta):
    """Mean squared reconstruction loss and its gradient.

    ``X`` is (n_windows, window_len, 2), ``Y`` is (n_windows, 2) and ``theta`` is
    the flat parameter vector ``[w0, w1, b, A00, A01, A10, A11, c0, c1]``.
    """
    n = X.shape[0]
    w = theta[0:2]
    A = theta[3:7].reshape(2, 2)
    c = theta[7:9]
    s = X @ w + theta[2]
    s = s - s.max(axis=1, keepdims=True)
    e = np.exp(s)
    attn = e / e.sum(axis=1, keepdims=True)
    ctx = np.einsum("nw,nwd->nd", attn, X)
    pred = ctx @ A.T + c
    err = pred - Y
    loss = float(np.sum(err * err) / n)

    gp = (2.0 / n) * err
    grad = np.empty(9)
    grad[3:7] = (gp.T @ ctx).ravel()
    grad[7:9] = gp.sum(axis=0)
    gctx = gp @ A
    gattn = np.einsum("nwd,nd->nw", X, gctx)
    gs = attn * (gattn - np.sum(attn * gattn, axis=1, keepdims=True))
    grad[0:2] = np.einsum("nw,nwd->d", gs, X)
    grad[2] = gs.sum()
    return loss, grad
