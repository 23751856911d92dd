"""Stationarity gaps, brute-force envelopes and numerical checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .geometry import Ball, Box, ProxTerm, Simplex, Zero, contains, project, prox
from .oracle import RegularizedView, StochasticOracle

__all__ = [
    "StationarityGap",
    "gap_from_gradients",
    "stationarity_gap",
    "gap_decomposition_check",
    "BruteForceEnvelope",
    "brute_force_phi",
    "DriftCheck",
    "lemma_ystar_drift_check",
    "finite_difference_check",
    "direct_worst_case",
    "is_feasible",
]


@dataclass(frozen=True)
class StationarityGap:
    x_block: np.ndarray
    y_block: np.ndarray
    variant: str

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.x_block, self.x_block) + np.dot(self.y_block, self.y_block)))


def gap_from_gradients(gx, gy, x, y, alpha: float, beta: float,
                       x_map: Callable, y_map: Callable, variant: str = "true") -> StationarityGap:
    """Gap from given gradients; ``x_map``/``y_map`` are the projection or prox maps."""
    xb = (x - x_map(x - alpha * gx)) / alpha
    yb = (y - y_map(y + beta * gy)) / beta
    return StationarityGap(xb, yb, variant)


def _maps(oracle, alpha, beta, prox_x: Optional[ProxTerm], prox_y: Optional[ProxTerm]):
    px = Zero() if prox_x is None else prox_x
    py = Zero() if prox_y is None else prox_y
    return (lambda p: prox(px, oracle.x_set, 1.0 / alpha, p),
            lambda p: prox(py, oracle.y_set, 1.0 / beta, p))


def _gradients(oracle: StochasticOracle, x, y, eval_batch, rng):
    if oracle.has_exact:
        return oracle.exact_gradients(x, y)
    if eval_batch is None or rng is None:
        raise ValueError("oracle has no exact gradients; pass eval_batch and rng")
    return oracle.sample_gradients(x, y, eval_batch, rng)


def stationarity_gap(oracle: StochasticOracle, x, y, alpha: float, beta: float, variant: str = "true",
                     rho: Optional[float] = None, prox_x: Optional[ProxTerm] = None,
                     prox_y: Optional[ProxTerm] = None, grads: Optional[Tuple] = None,
                     eval_batch: Optional[int] = None, rng=None) -> StationarityGap:
    """Projected (or proximal) gradient residual at ``(x, y)``.

    ``variant`` is ``"true"`` (gradients of g), ``"regularized"`` (gradients of
    ``g - rho/2 ||y||^2``) or ``"prox"`` (true gradients, prox maps for
    ``prox_x``/``prox_y``). Gradients come from ``grads`` when given, the exact
    oracle otherwise, or an ``eval_batch``-sized sample as a last resort.
    """
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    if variant not in ("true", "regularized", "prox"):
        raise ValueError(f"unknown gap variant {variant!r}")
    if variant == "regularized" and rho is None:
        raise ValueError("regularized gap needs rho")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    gx, gy = grads if grads is not None else _gradients(oracle, x, y, eval_batch, rng)
    if variant == "regularized":
        gy = gy - rho * y
    if variant == "prox":
        x_map, y_map = _maps(oracle, alpha, beta, prox_x, prox_y)
    else:
        x_map, y_map = (lambda p: project(oracle.x_set, p)), (lambda p: project(oracle.y_set, p))
    return gap_from_gradients(gx, gy, x, y, alpha, beta, x_map, y_map, variant)


def gap_decomposition_check(oracle: StochasticOracle, x, y, alpha: float, beta: float, rho: float,
                            tol: float = 1e-10) -> Tuple[float, float, bool]:
    """``||gap(g)|| <= ||gap(g_rho)|| + rho ||y||``; returns ``(lhs, rhs, holds)``."""
    grads = oracle.exact_gradients(x, y)
    lhs = stationarity_gap(oracle, x, y, alpha, beta, "true", grads=grads).norm
    reg = stationarity_gap(oracle, x, y, alpha, beta, "regularized", rho=rho, grads=grads).norm
    rhs = reg + rho * float(np.linalg.norm(y))
    return lhs, rhs, bool(lhs <= rhs + tol)


@dataclass(frozen=True)
class BruteForceEnvelope:
    phi: float
    y_star: np.ndarray
    spacing: float
    value_bound: float
    argmax_bound: float


def _axis_bounds(y_set):
    if isinstance(y_set, Box):
        return y_set.lower, y_set.upper
    if isinstance(y_set, Ball):
        return y_set.center - y_set.radius, y_set.center + y_set.radius
    if isinstance(y_set, Simplex):
        return np.zeros(y_set.dim), np.ones(y_set.dim)
    raise ValueError("brute force needs a bounded dual set")


def _axes(lower, upper, n):
    return [np.linspace(lo, up, n) if up > lo else np.array([lo]) for lo, up in zip(lower, upper)]


def _product(axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _complete(y_set, Y):
    if isinstance(y_set, Simplex):
        # the grid spans the first d - 1 coordinates; the last one is implied
        last = 1.0 - Y.sum(axis=1)
        keep = last >= -1e-12
        return np.column_stack([Y[keep], np.maximum(last[keep], 0.0)])
    if isinstance(y_set, Ball):
        return Y[np.linalg.norm(Y - y_set.center, axis=1) <= y_set.radius + 1e-12]
    return Y


def _grid_argmax(view, x, y_set, lower, upper, n):
    """Best grid point; ties go to the lexicographically smallest grid index."""
    if isinstance(y_set, Simplex):
        lower, upper = lower[:-1], upper[:-1]
        if lower.size == 0:
            y = np.ones(1)
            return y, float(view.values_over_y(x, y[None, :])[0])
    axes = _axes(lower, upper, n)
    chunks = [(axes, None)] if len(axes) <= 2 else [(axes[1:], a) for a in axes[0]]
    best_y, best_v = None, -np.inf
    for sub, head in chunks:
        Y = _product(sub)
        if head is not None:
            Y = np.column_stack([np.full(len(Y), head), Y])
        Y = _complete(y_set, Y)
        if len(Y) == 0:
            continue
        v = view.values_over_y(x, Y)
        i = int(np.flatnonzero(v == v.max())[0])
        if v[i] > best_v:
            best_y, best_v = Y[i].copy(), float(v[i])
    return best_y, best_v


_MAX_FINE = 601


def brute_force_phi(oracle: StochasticOracle, x, rho: float, resolution: int = 201,
                    refine: int = 10) -> BruteForceEnvelope:
    """Grid search for ``max_{y in Y} g(x, y) - rho/2 ||y||^2`` (``d_y <= 3``).

    A coarse grid of ``resolution`` points per axis is followed by one local
    grid ``refine`` times finer around the coarse argmax. The local window is
    wide enough to contain the true maximizer, and the reported argmax bound
    follows from strong concavity:
    ``||y_hat - y*|| <= sqrt(L_y / rho) * sqrt(d) * h / 2`` with ``L_y`` the
    smoothness constant in y and ``h`` the final spacing. The bound assumes a
    box (grid endpoints sit on the faces); for other sets it is indicative.
    """
    if oracle.d_y > 3:
        raise ValueError("brute-force envelope supports d_y <= 3 only")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    view = RegularizedView(oracle, rho)
    x = np.asarray(x, dtype=float)
    lower, upper = _axis_bounds(oracle.y_set)
    d = oracle.d_y
    width = float(np.max(upper - lower))
    y0, _ = _grid_argmax(view, x, oracle.y_set, lower, upper, resolution)
    h = width / (resolution - 1)
    Ly = oracle.lipschitz + rho
    kappa = Ly / rho if rho > 0 else np.inf
    reach = max(h, np.sqrt(kappa) * np.sqrt(d) * h / 2) if np.isfinite(kappa) else h
    reach = min(reach, width)
    n_fine = min(2 * int(np.ceil(reach * refine / h)) + 1, _MAX_FINE)
    lo_f = np.maximum(y0 - reach, lower)
    up_f = np.minimum(y0 + reach, upper)
    y1, v1 = _grid_argmax(view, x, oracle.y_set, lo_f, up_f, n_fine)
    v0 = float(view.values_over_y(x, y0[None, :])[0])
    if y1 is None or v0 > v1:
        y1, v1 = y0, v0
    h_final = float(np.max(up_f - lo_f)) / max(n_fine - 1, 1)
    value_bound = 0.5 * Ly * d * (h_final / 2) ** 2
    argmax_bound = np.sqrt(kappa) * np.sqrt(d) * h_final / 2 if np.isfinite(kappa) else np.inf
    return BruteForceEnvelope(float(v1), y1, h_final, float(value_bound), float(argmax_bound))


@dataclass(frozen=True)
class DriftCheck:
    lhs: float
    rhs: float
    slack: float
    holds: bool


def lemma_ystar_drift_check(oracle: StochasticOracle, x, x_bar, rho_k: float, rho_next: float,
                            resolution: int = 201, L: Optional[float] = None) -> DriftCheck:
    """Drift of the regularized maximizer between ``(x, rho_k)`` and ``(x_bar, rho_next)``.

    Checks ``||y1 - y0||^2 <= L^2/rho_next^2 ||x_bar - x||^2
    + (rho_k - rho_next)/rho_next (||y1||^2 - ||y0||^2)`` with
    ``y0 = y*_{rho_k}(x)`` and ``y1 = y*_{rho_next}(x_bar)`` found by grid
    search. ``L`` defaults to ``oracle.lipschitz + rho_k``. The slack covers the
    grid argmax error of both points.
    """
    if not (rho_k >= rho_next > 0):
        raise ValueError("need rho_k >= rho_next > 0")
    L = oracle.lipschitz + rho_k if L is None else L
    e0 = brute_force_phi(oracle, x, rho_k, resolution)
    e1 = brute_force_phi(oracle, x_bar, rho_next, resolution)
    y0, y1 = e0.y_star, e1.y_star
    dx = np.asarray(x_bar, dtype=float) - np.asarray(x, dtype=float)
    lhs = float(np.dot(y1 - y0, y1 - y0))
    ratio = (rho_k - rho_next) / rho_next
    rhs = L**2 / rho_next**2 * float(np.dot(dx, dx)) + ratio * (float(np.dot(y1, y1)) - float(np.dot(y0, y0)))
    r = e0.argmax_bound + e1.argmax_bound
    n0, n1 = np.linalg.norm(y0), np.linalg.norm(y1)
    slack = (np.sqrt(lhs) + r) ** 2 - lhs
    slack += ratio * (2 * n1 * e1.argmax_bound + e1.argmax_bound**2 + 2 * n0 * e0.argmax_bound + e0.argmax_bound**2)
    slack = float(slack)
    return DriftCheck(lhs, rhs, slack, bool(lhs <= rhs + slack))


def finite_difference_check(oracle: StochasticOracle, x, y, h: float = 1e-5) -> float:
    """Max over coordinates of ``|fd - exact| / max(1, |exact|)`` with central differences."""
    if not h > 0:
        raise ValueError("step must be positive")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    gx, gy = oracle.exact_gradients(x, y)
    z = np.concatenate([x, y])
    exact = np.concatenate([gx, gy])
    n = x.size

    def f(v):
        return oracle.value(v[:n], v[n:])

    err = 0.0
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = h
        fd = (f(z + e) - f(z - e)) / (2 * h)
        err = max(err, abs(fd - exact[i]) / max(1.0, abs(exact[i])))
    return float(err)


def is_feasible(oracle: StochasticOracle, x, y, tol: float = 1e-10) -> bool:
    return contains(oracle.x_set, x, tol) and contains(oracle.y_set, y, tol)


def direct_worst_case(oracle, iters: int = 100_000, step: float = 1.0, x0=None) -> Tuple[float, np.ndarray]:
    """Full-batch subgradient descent on ``max_m f_m(x)`` for a multi-domain oracle.

    Steps are ``step / sqrt(t)`` along the gradient of the currently worst
    domain, projected onto the primal set. Returns the best worst-domain loss
    seen and the point attaining it.
    """
    if iters < 1 or not step > 0:
        raise ValueError("need iters >= 1 and a positive step")
    x = np.zeros(oracle.d_x) if x0 is None else np.asarray(x0, dtype=float).copy()
    best, best_x = np.inf, x.copy()
    data = list(zip(oracle.features, oracle.labels))
    for t in range(1, iters + 1):
        worst, grad = -np.inf, None
        for X, lab in data:
            margin = lab * (X @ x)
            loss = float(np.logaddexp(0.0, -margin).mean())
            if loss > worst:
                worst, top = loss, (X, lab, margin)
        if worst < best:
            best, best_x = worst, x.copy()
        X, lab, margin = top
        grad = (-lab * 0.5 * (1.0 - np.tanh(margin / 2)))[:, None] * X
        x = project(oracle.x_set, x - step / np.sqrt(t) * grad.mean(axis=0))
    return float(best), best_x
