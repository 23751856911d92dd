"""Euclidean projections and proximity operators.

Feasible sets are small frozen dataclasses; ``project`` and ``prox`` dispatch on
their type. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Box",
    "Ball",
    "Simplex",
    "Unbounded",
    "FeasibleSet",
    "Zero",
    "L1",
    "IndicatorOf",
    "ProxTerm",
    "project",
    "prox",
    "simplex_project",
    "soft_threshold",
    "contains",
    "max_norm",
]


def _vec(a) -> np.ndarray:
    return np.atleast_1d(np.asarray(a, dtype=float))


@dataclass(frozen=True, eq=False)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, up = _vec(self.lower), _vec(self.upper)
        if lo.shape != up.shape or lo.ndim != 1:
            raise ValueError("box bounds must be 1-D vectors of equal length")
        if np.any(lo > up):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def cube(cls, dim: int, radius: float) -> "Box":
        return cls(-radius * np.ones(dim), radius * np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.size


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _vec(self.center)
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class Simplex:
    """Probability simplex ``{y >= 0, sum(y) = 1}``."""

    dimension: int

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ValueError("simplex dimension must be >= 1")

    @property
    def dim(self) -> int:
        return int(self.dimension)


@dataclass(frozen=True)
class Unbounded:
    """Whole space; ``radius`` is bookkeeping for the dual norm bound only."""

    dimension: int
    radius: float = np.inf

    @property
    def dim(self) -> int:
        return int(self.dimension)


FeasibleSet = Union[Box, Ball, Simplex, Unbounded]


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class L1:
    weight: float

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("L1 weight must be nonnegative")


@dataclass(frozen=True)
class IndicatorOf:
    set: FeasibleSet


ProxTerm = Union[Zero, L1, IndicatorOf]


def _check_dim(s: FeasibleSet, p: np.ndarray) -> None:
    if p.ndim != 1 or p.size != s.dim:
        raise ValueError(f"point has shape {p.shape}, set has dimension {s.dim}")


def simplex_project(dimension: int, point) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    if dimension < 1:
        raise ValueError("simplex dimension must be >= 1")
    v = _vec(point)
    if v.size != dimension:
        raise ValueError(f"point has length {v.size}, expected {dimension}")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, dimension + 1)
    r = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[r] / (r + 1)
    return np.maximum(v - tau, 0.0)


def project(s: FeasibleSet, point) -> np.ndarray:
    p = _vec(point)
    _check_dim(s, p)
    if isinstance(s, Box):
        return np.clip(p, s.lower, s.upper)
    if isinstance(s, Ball):
        d = p - s.center
        n = np.linalg.norm(d)
        if n <= s.radius:
            return p.copy()
        return s.center + d * (s.radius / n)
    if isinstance(s, Simplex):
        return simplex_project(s.dim, p)
    if isinstance(s, Unbounded):
        return p.copy()
    raise TypeError(f"unknown feasible set {s!r}")


def contains(s: FeasibleSet, point, tol: float = 1e-10) -> bool:
    p = _vec(point)
    _check_dim(s, p)
    if isinstance(s, Box):
        return bool(np.all(p >= s.lower - tol) and np.all(p <= s.upper + tol))
    if isinstance(s, Ball):
        return bool(np.linalg.norm(p - s.center) <= s.radius + tol)
    if isinstance(s, Simplex):
        return bool(np.all(p >= -tol) and abs(p.sum() - 1.0) <= tol)
    return bool(np.all(np.isfinite(p)))


def max_norm(s: FeasibleSet) -> float:
    """``max ||y||`` over the set (sigma_y)."""
    if isinstance(s, Box):
        return float(np.linalg.norm(np.maximum(np.abs(s.lower), np.abs(s.upper))))
    if isinstance(s, Ball):
        return float(np.linalg.norm(s.center) + s.radius)
    if isinstance(s, Simplex):
        return 1.0
    return float(s.radius)


def soft_threshold(p: np.ndarray, t: float) -> np.ndarray:
    return np.sign(p) * np.maximum(np.abs(p) - t, 0.0)


def _same_set(a: FeasibleSet, b: FeasibleSet) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Box):
        return np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)
    if isinstance(a, Ball):
        return np.array_equal(a.center, b.center) and a.radius == b.radius
    return a == b


def prox(term: ProxTerm, s: FeasibleSet, stepsize: float, point) -> np.ndarray:
    """``argmin_{z in s} h(z) + (stepsize / 2) * ||z - point||^2``.

    ``stepsize`` is the weight on the quadratic, so an L1 term of weight ``w``
    shrinks by ``w / stepsize``.
    """
    if not stepsize > 0:
        raise ValueError("prox stepsize must be positive")
    p = _vec(point)
    _check_dim(s, p)
    if isinstance(term, Zero):
        return project(s, p)
    if isinstance(term, L1):
        t = term.weight / stepsize
        if isinstance(s, Unbounded):
            return soft_threshold(p, t)
        if isinstance(s, Box):
            return np.clip(soft_threshold(p, t), s.lower, s.upper)
        if isinstance(s, Simplex):
            # ||z||_1 == 1 on the simplex
            return project(s, p)
        if isinstance(s, Ball) and s.radius == 0:
            return s.center.copy()
        raise NotImplementedError("L1 prox over a ball has no closed form")
    if isinstance(term, IndicatorOf):
        inner = term.set
        if inner.dim != s.dim:
            raise ValueError("indicator set and feasible set dimensions differ")
        if isinstance(s, Unbounded) or _same_set(inner, s):
            return project(inner, p)
        if isinstance(inner, Unbounded):
            return project(s, p)
        if isinstance(inner, Box) and isinstance(s, Box):
            lo, up = np.maximum(inner.lower, s.lower), np.minimum(inner.upper, s.upper)
            if np.any(lo > up):
                raise ValueError("indicator set does not meet the feasible set")
            return np.clip(p, lo, up)
        raise NotImplementedError("projection onto this set intersection is not supported")
    raise TypeError(f"unknown prox term {term!r}")
