"""Straight-line transcription of FORMDA, FORMDA-NS and SGDA on a box-constrained quadratic saddle.

Deliberately free of the library's abstractions (no oracle, schedule or
geometry objects) so the solver can be checked against it bit for bit. The
random stream follows the quadratic oracle's convention: each iteration draws
one ``(b, d_x + d_y)`` standard normal block, shared by both gradient
evaluations of that iteration.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

__all__ = ["reference_trajectory"]


def _clip(p, r):
    return np.minimum(np.maximum(p, -r), r)


def _shrink(p, t):
    return np.where(p > t, p - t, np.where(p < -t, p + t, 0.0))


def reference_trajectory(A, B, C, noise, x_radius, y_radius, x1, y1, steps, seed, algorithm="formda",
                         a4=0.1, a5=1.0, a6=1.0, L=1.0, beta=0.1, b=1, l1_x=0.0, l1_y=0.0,
                         sgda_alpha=0.01, sgda_beta=0.01) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Iterates ``(x_1, y_1), ..., (x_{steps+1}, y_{steps+1})`` under the theorem-mode schedule.

    ``A`` must already be symmetric. ``l1_x``/``l1_y`` are the L1 weights of
    the nonsmooth terms (FORMDA-NS only).
    """
    A, B, C = (np.asarray(M, dtype=float) for M in (A, B, C))
    dx = B.shape[0]
    rng = np.random.default_rng(seed)
    x = _clip(np.asarray(x1, dtype=float), x_radius)
    y = _clip(np.asarray(y1, dtype=float), y_radius)
    out = [(x.copy(), y.copy())]
    v = w = x_old = y_old = None
    gamma_old = theta_old = rho_old = None
    for k in range(1, steps + 1):
        z = rng.standard_normal((b, dx + B.shape[1])).mean(axis=0)
        gx = A @ x + B @ y + noise * z[:dx]
        gy = B.T @ x - C @ y + noise * z[dx:]
        if algorithm == "sgda":
            x, y = _clip(x - sgda_alpha * gx, x_radius), _clip(y + sgda_beta * gy, y_radius)
            out.append((x.copy(), y.copy()))
            continue
        eta = min((k + 2) ** (-5 / 13), 1.0)
        alpha = a4 * (k + 2) ** (-4 / 13)
        rho = L * (k + 1) ** (-2 / 13)
        gamma = min(a5 * (k + 2) ** (-12 / 13), 1.0)
        theta = min(a6 * (k + 2) ** (-8 / 13), 1.0)
        gy = gy - rho * y
        if k == 1:
            v, w = gx, gy
        else:
            hx = A @ x_old + B @ y_old + noise * z[:dx]
            hy = B.T @ x_old - C @ y_old + noise * z[dx:]
            hy = hy - rho_old * y_old
            v = gx + (1.0 - gamma_old) * (v - hx)
            w = gy + (1.0 - theta_old) * (w - hy)
        ux = x - alpha * v
        uy = y + beta * w
        if algorithm == "formda-ns":
            ux = _shrink(ux, l1_x / (1.0 / alpha))
            uy = _shrink(uy, l1_y / (1.0 / beta))
        xt, yt = _clip(ux, x_radius), _clip(uy, y_radius)
        x_old, y_old = x, y
        x = x + eta * (xt - x)
        y = y + eta * (yt - y)
        gamma_old, theta_old, rho_old = gamma, theta, rho
        out.append((x.copy(), y.copy()))
    return out
