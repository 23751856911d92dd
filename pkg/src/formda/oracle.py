"""Stochastic minimax problems ``min_x max_y E[G(x, y; zeta)]``.

An oracle draws a minibatch of samples and evaluates averaged per-sample
gradients on it. Drawing and evaluating are separate calls so the solver can
evaluate the same batch at two different points. Randomness always comes from
an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Box, FeasibleSet, Simplex, max_norm

__all__ = [
    "StochasticOracle",
    "RegularizedView",
    "regularized_sample_gradients",
    "QuadraticSaddle",
    "make_quadratic_saddle",
    "WGANToy",
    "make_wgan_toy",
    "RobustMultiDomain",
    "make_robust_multidomain",
    "synthetic_domains",
    "load_domain_csv",
]


class StochasticOracle:
    """Base class for sampled-gradient minimax problems.

    Subclasses implement :meth:`draw` and :meth:`per_sample_gradients`; those
    with a closed-form expectation also implement :meth:`exact_gradients` and
    :meth:`value` and set ``has_exact = True``.
    """

    has_exact = False

    def __init__(self, d_x: int, d_y: int, x_set: FeasibleSet, y_set: FeasibleSet,
                 lipschitz: float, sigma_y: Optional[float] = None):
        self.d_x = int(d_x)
        self.d_y = int(d_y)
        self.x_set = x_set
        self.y_set = y_set
        self.lipschitz = float(lipschitz)
        self.sigma_y = max_norm(y_set) if sigma_y is None else float(sigma_y)

    def draw(self, b: int, rng: np.random.Generator):
        raise NotImplementedError

    def per_sample_gradients(self, x, y, samples) -> Tuple[np.ndarray, np.ndarray]:
        """Arrays of shape ``(b, d_x)`` and ``(b, d_y)``."""
        raise NotImplementedError

    def batch_gradients(self, x, y, samples) -> Tuple[np.ndarray, np.ndarray]:
        gx, gy = self.per_sample_gradients(x, y, samples)
        return gx.mean(axis=0), gy.mean(axis=0)

    def sample_gradients(self, x, y, b: int, rng: np.random.Generator):
        if b < 1:
            raise ValueError("batch size must be >= 1")
        return self.batch_gradients(x, y, self.draw(b, rng))

    def exact_gradients(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError(f"{type(self).__name__} has no closed-form gradients")

    def value(self, x, y) -> float:
        raise NotImplementedError(f"{type(self).__name__} has no closed-form objective")

    def values_over_y(self, x, Y: np.ndarray) -> np.ndarray:
        """Objective at ``x`` for every row of ``Y``."""
        return np.array([self.value(x, y) for y in Y])

    def initial_point(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.zeros(self.d_x), np.zeros(self.d_y)

    def target_distance(self, x, y) -> Optional[float]:
        return None


@dataclass(frozen=True)
class RegularizedView:
    """``G(x, y; zeta) - (rho / 2) ||y||^2`` on top of a base oracle."""

    base: StochasticOracle
    rho: float

    def batch_gradients(self, x, y, samples):
        gx, gy = self.base.batch_gradients(x, y, samples)
        return gx, gy - self.rho * y

    def sample_gradients(self, x, y, b, rng):
        gx, gy = self.base.sample_gradients(x, y, b, rng)
        return gx, gy - self.rho * y

    def exact_gradients(self, x, y):
        gx, gy = self.base.exact_gradients(x, y)
        return gx, gy - self.rho * y

    def value(self, x, y) -> float:
        return self.base.value(x, y) - 0.5 * self.rho * float(np.dot(y, y))

    def values_over_y(self, x, Y):
        return self.base.values_over_y(x, Y) - 0.5 * self.rho * np.einsum("ij,ij->i", Y, Y)


def regularized_sample_gradients(view: RegularizedView, x, y, b: int, rng: np.random.Generator):
    return view.sample_gradients(x, y, b, rng)


class QuadraticSaddle(StochasticOracle):
    """``g(x, y) = x'Ax/2 + x'By - y'Cy/2`` with additive Gaussian gradient noise.

    One sample is a standard normal vector of length ``d_x + d_y``; the
    per-sample gradient is the exact gradient plus ``noise`` times that vector.
    """

    has_exact = True

    def __init__(self, A, B, C, noise: float = 0.0, x_radius: float = 1.0, y_radius: float = 1.0):
        A, B, C = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, B, C))
        d_x, d_y = B.shape
        if A.shape != (d_x, d_x) or C.shape != (d_y, d_y):
            raise ValueError("inconsistent block shapes")
        if not np.allclose(C, C.T):
            raise ValueError("C must be symmetric")
        if np.linalg.eigvalsh(C).min() < -1e-12:
            raise ValueError("C must be positive semidefinite")
        if noise < 0:
            raise ValueError("noise must be nonnegative")
        self.A, self.B, self.C = 0.5 * (A + A.T), B, C
        self.noise = float(noise)
        H = np.block([[self.A, B], [B.T, -C]])
        ell = max(float(np.linalg.norm(H, 2)), 1e-12)
        super().__init__(d_x, d_y, Box.cube(d_x, x_radius), Box.cube(d_y, y_radius), ell)

    def draw(self, b, rng):
        return rng.standard_normal((b, self.d_x + self.d_y))

    def exact_gradients(self, x, y):
        return self.A @ x + self.B @ y, self.B.T @ x - self.C @ y

    def per_sample_gradients(self, x, y, samples):
        gx, gy = self.exact_gradients(x, y)
        return gx + self.noise * samples[:, : self.d_x], gy + self.noise * samples[:, self.d_x:]

    def batch_gradients(self, x, y, samples):
        gx, gy = self.exact_gradients(x, y)
        m = samples.mean(axis=0)
        return gx + self.noise * m[: self.d_x], gy + self.noise * m[self.d_x:]

    def value(self, x, y):
        return float(0.5 * x @ self.A @ x + x @ self.B @ y - 0.5 * y @ self.C @ y)

    def values_over_y(self, x, Y):
        Y = np.atleast_2d(Y)
        return 0.5 * x @ self.A @ x + Y @ (self.B.T @ x) - 0.5 * np.einsum("ij,jk,ik->i", Y, self.C, Y)

    def ystar_unconstrained(self, x, rho: float) -> np.ndarray:
        """Maximizer of the rho-regularized objective over all of R^{d_y}."""
        return np.linalg.solve(self.C + rho * np.eye(self.d_y), self.B.T @ x)

    def initial_point(self):
        x = np.clip(0.5 * np.ones(self.d_x), self.x_set.lower, self.x_set.upper)
        return x, np.zeros(self.d_y)


def _random_symmetric(d, lo, hi, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return (Q * rng.uniform(lo, hi, size=d)) @ Q.T


def make_quadratic_saddle(d_x: int, d_y: int, a_range=(-1.0, 1.0), c_range=(0.0, 1.0),
                          coupling: float = 1.0, noise: float = 0.0, x_radius: float = 1.0,
                          y_radius: float = 1.0, seed: int = 0, A=None, B=None, C=None) -> QuadraticSaddle:
    """Random quadratic saddle; explicit ``A``, ``B``, ``C`` override the random draw.

    ``a_range`` may straddle zero (nonconvex in x); ``c_range`` must be nonnegative.
    """
    rng = np.random.default_rng(seed)
    if C is None:
        if min(c_range) < 0:
            raise ValueError("c_range must be nonnegative")
        C = _random_symmetric(d_y, *c_range, rng)
        C = 0.5 * (C + C.T)
    if A is None:
        A = _random_symmetric(d_x, *a_range, rng)
    if B is None:
        B = coupling * rng.standard_normal((d_x, d_y)) / np.sqrt(max(d_x, d_y))
    return QuadraticSaddle(A, B, C, noise=noise, x_radius=x_radius, y_radius=y_radius)


class WGANToy(StochasticOracle):
    """Moment-matching WGAN with generator ``p1 + p2 z`` and critic ``q1 t + q2 t^2``.

    x is the generator pair, y the critic pair. A sample is a pair
    ``(x_real, z)`` with ``x_real ~ N(real_mean, real_std^2)`` and
    ``z ~ N(0, z_std^2)``.
    """

    has_exact = True

    def __init__(self, real_mean=0.0, real_std=0.1, z_std=1.0,
                 phi_set: Optional[FeasibleSet] = None, psi_set: Optional[FeasibleSet] = None):
        if not (real_std > 0 and z_std > 0):
            raise ValueError("real_std and z_std must be positive")
        self.real_mean, self.real_std, self.z_std = float(real_mean), float(real_std), float(z_std)
        phi_set = Box.cube(2, 2.0) if phi_set is None else phi_set
        psi_set = Box.cube(2, 2.0) if psi_set is None else psi_set
        super().__init__(2, 2, phi_set, psi_set, self._lipschitz_bound(phi_set, psi_set))

    def _lipschitz_bound(self, phi_set, psi_set) -> float:
        rp, rq = max_norm(phi_set), max_norm(psi_set)
        s2 = self.z_std**2
        # Frobenius bound on the Hessian over the feasible sets
        return float(np.sqrt((2 * rq) ** 2 + (2 * rq * s2) ** 2 + 2.0 + 2 * (2 * rp) ** 2 + 2 * (2 * rp * s2) ** 2))

    def draw(self, b, rng):
        e = rng.standard_normal((b, 2))
        return np.column_stack([self.real_mean + self.real_std * e[:, 0], self.z_std * e[:, 1]])

    def per_sample_gradients(self, x, y, samples):
        p1, p2 = x
        q1, q2 = y
        xr, z = samples[:, 0], samples[:, 1]
        fake = p1 + p2 * z
        dfake = -q1 - 2 * q2 * fake
        gx = np.column_stack([dfake, dfake * z])
        gy = np.column_stack([xr - fake, xr**2 - fake**2])
        return gx, gy

    def _second_moment_gap(self, x):
        p1, p2 = x
        return self.real_mean**2 + self.real_std**2 - p1**2 - p2**2 * self.z_std**2

    def exact_gradients(self, x, y):
        p1, p2 = x
        q1, q2 = y
        gx = np.array([-q1 - 2 * q2 * p1, -2 * q2 * p2 * self.z_std**2])
        gy = np.array([self.real_mean - p1, self._second_moment_gap(x)])
        return gx, gy

    def value(self, x, y):
        return float(y[0] * (self.real_mean - x[0]) + y[1] * self._second_moment_gap(x))

    def values_over_y(self, x, Y):
        Y = np.atleast_2d(Y)
        return Y[:, 0] * (self.real_mean - x[0]) + Y[:, 1] * self._second_moment_gap(x)

    def target(self) -> np.ndarray:
        return np.array([self.real_mean, self.real_std / self.z_std])

    def target_distance(self, x, y):
        return float(np.linalg.norm(np.asarray(x) - self.target()))

    def initial_point(self):
        return np.array([0.0, 1.0]), np.zeros(2)


def make_wgan_toy(real_mean=0.0, real_std=0.1, z_std=1.0, phi_set=None, psi_set=None) -> WGANToy:
    return WGANToy(real_mean, real_std, z_std, phi_set, psi_set)


def _sigmoid(t):
    return 0.5 * (1.0 + np.tanh(0.5 * t))


class RobustMultiDomain(StochasticOracle):
    """``min_x max_{y in simplex} sum_m y_m f_m(x)`` with logistic losses.

    One sample is one example index per domain, so a batch of size ``b`` holds
    ``b`` examples from every domain.
    """

    has_exact = True

    def __init__(self, datasets: Sequence[Tuple[np.ndarray, np.ndarray]], x_radius: float = 1e3):
        if len(datasets) < 2:
            raise ValueError("need at least two domains")
        feats, labels = [], []
        for X, lab in datasets:
            X = np.atleast_2d(np.asarray(X, dtype=float))
            lab = np.asarray(lab, dtype=float).ravel()
            if X.shape[0] == 0:
                raise ValueError("empty domain dataset")
            if lab.shape[0] != X.shape[0]:
                raise ValueError("features and labels have different lengths")
            feats.append(X)
            labels.append(np.where(lab > 0, 1.0, -1.0))
        d = feats[0].shape[1]
        if any(X.shape[1] != d for X in feats):
            raise ValueError("all domains must share the feature dimension")
        self.features, self.labels = feats, labels
        self.M = len(feats)
        R = max(float(np.linalg.norm(X, axis=1).max()) for X in feats)
        ell = 0.25 * R**2 + np.sqrt(self.M) * R
        super().__init__(d, self.M, Box.cube(d, x_radius), Simplex(self.M), ell, sigma_y=1.0)

    def draw(self, b, rng):
        return np.column_stack([rng.integers(0, X.shape[0], size=b) for X in self.features])

    def _loss_and_grad(self, x, X, lab):
        margin = lab * (X @ x)
        loss = np.logaddexp(0.0, -margin)
        coef = -lab * _sigmoid(-margin)
        return loss, coef[:, None] * X

    def per_sample_gradients(self, x, y, samples):
        gx = np.zeros((samples.shape[0], self.d_x))
        gy = np.empty((samples.shape[0], self.M))
        for m in range(self.M):
            idx = samples[:, m]
            loss, grad = self._loss_and_grad(x, self.features[m][idx], self.labels[m][idx])
            gx += y[m] * grad
            gy[:, m] = loss
        return gx, gy

    def domain_losses(self, x) -> np.ndarray:
        return np.array([np.logaddexp(0.0, -lab * (X @ x)).mean() for X, lab in zip(self.features, self.labels)])

    def domain_gradients(self, x) -> np.ndarray:
        """Rows are full-data gradients of each domain loss."""
        return np.array([self._loss_and_grad(x, X, lab)[1].mean(axis=0) for X, lab in zip(self.features, self.labels)])

    def exact_gradients(self, x, y):
        return np.asarray(y) @ self.domain_gradients(x), self.domain_losses(x)

    def value(self, x, y):
        return float(np.dot(y, self.domain_losses(x)))

    def values_over_y(self, x, Y):
        return np.atleast_2d(Y) @ self.domain_losses(x)

    def initial_point(self):
        return np.zeros(self.d_x), np.full(self.M, 1.0 / self.M)


def make_robust_multidomain(datasets, loss: str = "logistic", model_dim: Optional[int] = None,
                            x_radius: float = 1e3) -> RobustMultiDomain:
    if loss != "logistic":
        raise ValueError(f"unsupported loss {loss!r}")
    oracle = RobustMultiDomain(datasets, x_radius=x_radius)
    if model_dim is not None and model_dim != oracle.d_x:
        raise ValueError(f"model_dim {model_dim} does not match feature dimension {oracle.d_x}")
    return oracle


def synthetic_domains(n_domains: int = 3, n_points: int = 500, n_features: int = 5,
                      label_noise: float = 0.1, shift: float = 1.0, seed: int = 0) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Gaussian two-class domains sharing a feature space, with flipped labels.

    Each domain has its own class separation direction and offset, so no
    single linear model is best for all of them. The last feature is a
    constant intercept column.
    """
    rng = np.random.default_rng(seed)
    base = rng.standard_normal(n_features - 1)
    base /= np.linalg.norm(base)
    out = []
    for m in range(n_domains):
        direction = base + shift * rng.standard_normal(n_features - 1) / np.sqrt(n_features - 1)
        direction /= np.linalg.norm(direction)
        lab = rng.integers(0, 2, size=n_points) * 2 - 1
        center = rng.normal(scale=0.5, size=n_features - 1)
        X = center + rng.standard_normal((n_points, n_features - 1)) + 1.0 * lab[:, None] * direction
        flip = rng.random(n_points) < label_noise
        lab = np.where(flip, -lab, lab)
        out.append((np.column_stack([X, np.ones(n_points)]), lab.astype(float)))
    return out


def load_domain_csv(paths: Sequence[str]) -> List[Tuple[np.ndarray, np.ndarray]]:
    """One CSV file per domain, label in the last column; a header row is skipped."""
    out = []
    for path in paths:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        try:
            data = np.array(rows, dtype=float)
        except ValueError:
            data = np.array(rows[1:], dtype=float)
        if data.size == 0:
            raise ValueError(f"empty domain dataset: {path}")
        data = np.atleast_2d(data)
        out.append((data[:, :-1], data[:, -1]))
    return out
