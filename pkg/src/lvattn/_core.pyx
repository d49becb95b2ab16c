# cython: language_level=3
"""Compiled kernels: RK4 integration of the LV field and the attention loss/gradient."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, isfinite

cnp.import_array()


def integrate_lv(double alpha, double beta, double gamma, double delta,
                 double x0, double y0, double dt, Py_ssize_t n):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.empty((n + 1, 2))
    cdef double[:, ::1] out = arr
    cdef double x = x0, y = y0
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, xa, ya
    cdef Py_ssize_t k
    out[0, 0] = x0
    out[0, 1] = y0
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
        if not (x > 0.0 and y > 0.0 and isfinite(x) and isfinite(y)):
            return arr[:k], k
        out[k, 0] = x
        out[k, 1] = y
    return arr, -1


def attention_loss_grad(const double[:, :, ::1] X, const double[:, ::1] Y,
                        const double[::1] theta):
    cdef Py_ssize_t n = X.shape[0], W = X.shape[1]
    cdef Py_ssize_t i, j
    cdef double w0 = theta[0], w1 = theta[1], b = theta[2]
    cdef double a00 = theta[3], a01 = theta[4], a10 = theta[5], a11 = theta[6]
    cdef double c0 = theta[7], c1 = theta[8]
    cdef double[::1] attn = np.empty(W)
    cdef double smax, s, z, cx, cy, px, py, ex, ey, gx, gy, hx, hy, ga, sbar, gsj
    cdef double loss = 0.0, inv = 2.0 / n
    cdef double gw0 = 0.0, gw1 = 0.0, gb = 0.0
    cdef double ga00 = 0.0, ga01 = 0.0, ga10 = 0.0, ga11 = 0.0, gc0 = 0.0, gc1 = 0.0
    for i in range(n):
        smax = w0 * X[i, 0, 0] + w1 * X[i, 0, 1] + b
        for j in range(W):
            s = w0 * X[i, j, 0] + w1 * X[i, j, 1] + b
            attn[j] = s
            if s > smax:
                smax = s
        z = 0.0
        for j in range(W):
            attn[j] = exp(attn[j] - smax)
            z += attn[j]
        cx = 0.0
        cy = 0.0
        for j in range(W):
            attn[j] = attn[j] / z
            cx += attn[j] * X[i, j, 0]
            cy += attn[j] * X[i, j, 1]
        px = a00 * cx + a01 * cy + c0
        py = a10 * cx + a11 * cy + c1
        ex = px - Y[i, 0]
        ey = py - Y[i, 1]
        loss += ex * ex + ey * ey
        gx = inv * ex
        gy = inv * ey
        ga00 += gx * cx
        ga01 += gx * cy
        ga10 += gy * cx
        ga11 += gy * cy
        gc0 += gx
        gc1 += gy
        hx = gx * a00 + gy * a10
        hy = gx * a01 + gy * a11
        sbar = 0.0
        for j in range(W):
            sbar += attn[j] * (X[i, j, 0] * hx + X[i, j, 1] * hy)
        for j in range(W):
            ga = X[i, j, 0] * hx + X[i, j, 1] * hy
            gsj = attn[j] * (ga - sbar)
            gw0 += gsj * X[i, j, 0]
            gw1 += gsj * X[i, j, 1]
            gb += gsj
    grad = np.array([gw0, gw1, gb, ga00, ga01, ga10, ga11, gc0, gc1])
    return loss / n, grad
