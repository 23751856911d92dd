"""FORMDA, FORMDA-NS and SGDA iterations and the run loop that drives them."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from .geometry import ProxTerm, Zero, project, prox
from .metrics import gap_from_gradients, stationarity_gap
from .oracle import StochasticOracle
from .schedules import ScheduleAt, ScheduleConfig, schedule_at, validate_constraints

__all__ = [
    "NumericFailure",
    "IteratePair",
    "MomentumState",
    "SGDAParams",
    "SolverSpec",
    "RunRecord",
    "RunResult",
    "formda_step",
    "formda_ns_step",
    "sgda_step",
    "run",
    "solve",
]

ALGORITHMS = ("formda", "formda-ns", "sgda")


class NumericFailure(FloatingPointError):
    def __init__(self, k: int, what: str):
        super().__init__(f"non-finite {what} at iteration {k}")
        self.k = k


@dataclass
class IteratePair:
    x: np.ndarray
    y: np.ndarray
    k: int = 1


@dataclass
class MomentumState:
    v: np.ndarray
    w: np.ndarray
    prev_x: np.ndarray
    prev_y: np.ndarray


@dataclass(frozen=True)
class SGDAParams:
    alpha: float
    beta: float
    batch: int

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("SGDA stepsizes must be positive")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")


@dataclass
class SolverSpec:
    algorithm: str = "formda"
    schedule: Optional[ScheduleConfig] = None
    sgda: Optional[SGDAParams] = None
    prox_x: ProxTerm = field(default_factory=Zero)
    prox_y: ProxTerm = field(default_factory=Zero)
    max_iters: int = 1000
    stop_tolerance: float = 0.0
    gap_eval_stride: int = 10
    eval_batch: int = 10000
    allow_unvalidated: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.stop_tolerance < 0:
            raise ValueError("stop_tolerance must be >= 0")
        if self.gap_eval_stride < 1:
            raise ValueError("gap_eval_stride must be >= 1")
        if self.algorithm == "sgda" and self.sgda is None:
            raise ValueError("SGDA needs SGDAParams")
        if self.algorithm != "sgda" and self.schedule is None:
            raise ValueError(f"{self.algorithm} needs a schedule")

    @property
    def batch(self) -> int:
        return self.sgda.batch if self.algorithm == "sgda" else self.schedule.batch


def _finite(k, what, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericFailure(k, what)


def _momentum_step(oracle, it: IteratePair, state: Optional[MomentumState], cur: ScheduleAt,
                   prev: Optional[ScheduleAt], beta: float, b: int, rng, x_map, y_map):
    k = it.k
    batch = oracle.draw(b, rng)
    gx, gy = oracle.batch_gradients(it.x, it.y, batch)
    gy = gy - cur.rho * it.y
    _finite(k, "gradient", gx, gy)
    if state is None:
        # gamma_0 = theta_0 = 1: the correction term vanishes at k = 1
        v, w = gx, gy
    else:
        px, py = oracle.batch_gradients(state.prev_x, state.prev_y, batch)
        py = py - prev.rho * state.prev_y
        _finite(k, "gradient", px, py)
        v = gx + (1.0 - prev.gamma) * (state.v - px)
        w = gy + (1.0 - prev.theta) * (state.w - py)
    x_tilde = x_map(it.x - cur.alpha * v)
    y_tilde = y_map(it.y + beta * w)
    x_new = it.x + cur.eta * (x_tilde - it.x)
    y_new = it.y + cur.eta * (y_tilde - it.y)
    _finite(k, "iterate", x_new, y_new)
    return IteratePair(x_new, y_new, k + 1), MomentumState(v, w, it.x, it.y)


def formda_step(oracle: StochasticOracle, it: IteratePair, state: Optional[MomentumState],
                cur: ScheduleAt, prev: Optional[ScheduleAt], beta: float, b: int,
                rng: np.random.Generator) -> Tuple[IteratePair, MomentumState]:
    """One FORMDA iteration.

    ``cur`` holds the parameters at ``k = it.k`` and ``prev`` those at ``k - 1``
    (ignored when ``state`` is ``None``, i.e. at the first iteration). A single
    minibatch is drawn and evaluated at both the current and the previous
    iterate; the previous-point gradient uses the previous ``rho``.
    """
    return _momentum_step(oracle, it, state, cur, prev, beta, b, rng,
                          lambda p: project(oracle.x_set, p), lambda p: project(oracle.y_set, p))


def formda_ns_step(oracle: StochasticOracle, it: IteratePair, state: Optional[MomentumState],
                   cur: ScheduleAt, prev: Optional[ScheduleAt], beta: float, b: int,
                   rng: np.random.Generator, prox_x: ProxTerm, prox_y: ProxTerm):
    """FORMDA with the projections replaced by prox maps of ``prox_x``/``prox_y``.

    The x-prox uses quadratic weight ``1/alpha_k`` and the y-prox ``1/beta``.
    """
    return _momentum_step(oracle, it, state, cur, prev, beta, b, rng,
                          lambda p: prox(prox_x, oracle.x_set, 1.0 / cur.alpha, p),
                          lambda p: prox(prox_y, oracle.y_set, 1.0 / beta, p))


def sgda_step(oracle: StochasticOracle, it: IteratePair, alpha: float, beta: float, b: int,
              rng: np.random.Generator, grads: Optional[Tuple] = None) -> IteratePair:
    """Projected simultaneous stochastic gradient descent ascent on g."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("stepsizes must be positive")
    gx, gy = oracle.sample_gradients(it.x, it.y, b, rng) if grads is None else grads
    _finite(it.k, "gradient", gx, gy)
    x_new = project(oracle.x_set, it.x - alpha * gx)
    y_new = project(oracle.y_set, it.y + beta * gy)
    return IteratePair(x_new, y_new, it.k + 1)


@dataclass
class RunRecord:
    iter: int
    gap_surrogate: float
    rho: float
    grad_calls: int
    gap_true: Optional[float] = None
    gap_regularized: Optional[float] = None
    estimator_err_x: Optional[float] = None
    estimator_err_y: Optional[float] = None
    dist_to_target: Optional[float] = None
    wall_ms: Optional[float] = None
    stop_reason: Optional[str] = None
    x: Optional[np.ndarray] = field(default=None, repr=False)
    y: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass
class RunResult:
    records: List[RunRecord]
    x: np.ndarray
    y: np.ndarray
    stop_reason: str


def _check_schedule(spec: SolverSpec) -> None:
    if spec.algorithm == "sgda":
        return
    sched = spec.schedule
    if sched.mode == "manual":
        if not spec.allow_unvalidated:
            raise ValueError("manual schedules lie outside the theorem's family; set allow_unvalidated")
        warnings.warn("running a manual schedule without constraint validation", stacklevel=3)
        return
    report = validate_constraints(sched)
    if not report.passed:
        if not spec.allow_unvalidated:
            raise ValueError("schedule constraints violated:\n" + str(report))
        warnings.warn("schedule constraints violated; continuing on override", stacklevel=3)


def run(spec: SolverSpec, oracle: StochasticOracle, seed, x1=None, y1=None,
        record_time: bool = False, clock: Callable[[], float] = time.perf_counter) -> Iterator[RunRecord]:
    """Iterate ``spec.algorithm`` and yield one :class:`RunRecord` per iteration.

    Record ``k`` describes the point ``(x_k, y_k)`` at which the k-th estimator
    was formed. The surrogate gap (estimators in place of gradients) is
    computed every iteration; true and regularized gaps and estimator errors
    every ``gap_eval_stride`` iterations and at the last one. The final record
    carries ``stop_reason`` in ``{"tolerance", "max_iters", "numeric-failure"}``.
    """
    _check_schedule(spec)
    rng = np.random.default_rng(seed)
    eval_rng = np.random.default_rng([np.random.SeedSequence(seed).entropy, 1])
    x0, y0 = oracle.initial_point()
    x = np.asarray(x0 if x1 is None else x1, dtype=float).copy()
    y = np.asarray(y0 if y1 is None else y1, dtype=float).copy()
    it = IteratePair(project(oracle.x_set, x), project(oracle.y_set, y), 1)
    state: Optional[MomentumState] = None
    prev: Optional[ScheduleAt] = None
    b = spec.batch
    calls = 0
    t0 = clock()
    prox_variant = spec.algorithm == "formda-ns"
    for k in range(1, spec.max_iters + 1):
        try:
            if spec.algorithm == "sgda":
                alpha, beta, rho = spec.sgda.alpha, spec.sgda.beta, 0.0
                grads = oracle.sample_gradients(it.x, it.y, b, rng)
                calls += 2 * b
                est = grads
                nxt = sgda_step(oracle, it, alpha, beta, b, rng, grads=grads)
                x_map = lambda p: project(oracle.x_set, p)  # noqa: E731
                y_map = lambda p: project(oracle.y_set, p)  # noqa: E731
            else:
                cur = schedule_at(spec.schedule, k)
                alpha, beta, rho = cur.alpha, spec.schedule.beta, cur.rho
                if spec.algorithm == "formda":
                    nxt, new_state = formda_step(oracle, it, state, cur, prev, beta, b, rng)
                    x_map = lambda p: project(oracle.x_set, p)  # noqa: E731
                    y_map = lambda p: project(oracle.y_set, p)  # noqa: E731
                else:
                    nxt, new_state = formda_ns_step(oracle, it, state, cur, prev, beta, b, rng,
                                                    spec.prox_x, spec.prox_y)
                    x_map = lambda p, a=alpha: prox(spec.prox_x, oracle.x_set, 1.0 / a, p)  # noqa: E731
                    y_map = lambda p: prox(spec.prox_y, oracle.y_set, 1.0 / beta, p)  # noqa: E731
                # two batch gradients at each of two points; at k = 1 the second pair is
                # weighted by (1 - gamma_0) = 0 but still counted
                calls += 4 * b
                est = (new_state.v, new_state.w)
        except NumericFailure:
            yield RunRecord(iter=k, gap_surrogate=float("nan"), rho=float("nan"), grad_calls=calls,
                            stop_reason="numeric-failure", x=it.x.copy(), y=it.y.copy())
            return
        surrogate = gap_from_gradients(est[0], est[1], it.x, it.y, alpha, beta, x_map, y_map).norm
        rec = RunRecord(iter=k, gap_surrogate=surrogate, rho=rho, grad_calls=calls,
                        dist_to_target=oracle.target_distance(it.x, it.y))
        evaluate = k % spec.gap_eval_stride == 0 or k == spec.max_iters or k == 1
        if evaluate:
            if oracle.has_exact:
                gx, gy = oracle.exact_gradients(it.x, it.y)
            else:
                gx, gy = oracle.sample_gradients(it.x, it.y, spec.eval_batch, eval_rng)
            variant = "prox" if prox_variant else "true"
            rec.gap_true = stationarity_gap(oracle, it.x, it.y, alpha, beta, variant, prox_x=spec.prox_x,
                                            prox_y=spec.prox_y, grads=(gx, gy)).norm
            rgy = gy - rho * it.y
            rec.gap_regularized = gap_from_gradients(gx, rgy, it.x, it.y, alpha, beta, x_map, y_map).norm
            if oracle.has_exact:
                rec.estimator_err_x = float(np.linalg.norm(est[0] - gx))
                rec.estimator_err_y = float(np.linalg.norm(est[1] - (rgy if spec.algorithm != "sgda" else gy)))
        if record_time:
            rec.wall_ms = (clock() - t0) * 1e3
        rec.x, rec.y = it.x.copy(), it.y.copy()
        stop_gap = (rec.gap_true if rec.gap_true is not None else np.inf) if oracle.has_exact else surrogate
        it = nxt
        if spec.algorithm != "sgda":
            state, prev = new_state, cur
        if stop_gap <= spec.stop_tolerance:
            rec.stop_reason = "tolerance"
            yield rec
            return
        if k == spec.max_iters:
            rec.stop_reason = "max_iters"
        yield rec


def solve(spec: SolverSpec, oracle: StochasticOracle, seed, x1=None, y1=None, **kw) -> RunResult:
    """Consume :func:`run`; the returned iterate is the last recorded point."""
    records = list(run(spec, oracle, seed, x1, y1, **kw))
    final = records[-1]
    return RunResult(records, final.x, final.y, final.stop_reason)
