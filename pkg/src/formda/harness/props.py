"""Randomized invariant checks over every module, runnable from the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from ..geometry import L1, Ball, Box, Simplex, Unbounded, Zero, project, prox
from ..metrics import finite_difference_check, gap_decomposition_check, lemma_ystar_drift_check
from ..oracle import RegularizedView, make_quadratic_saddle, make_robust_multidomain, make_wgan_toy, synthetic_domains
from ..reference import reference_trajectory
from ..schedules import schedule_at, theorem_schedule, validate_constraints
from ..solver import SGDAParams, SolverSpec, solve

__all__ = ["PropertyResult", "PropertyReport", "property_suite"]


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class PropertyReport:
    results: List[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def passed_names(self):
        return frozenset(r.name for r in self.results if r.passed)

    def __str__(self) -> str:
        lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f"  ({r.detail})" if r.detail else "")
                 for r in self.results]
        n = sum(r.passed for r in self.results)
        lines.append(f"{n}/{len(self.results)} properties passed")
        return "\n".join(lines)


def _random_sets(rng):
    d = int(rng.integers(1, 6))
    lo = rng.uniform(-2, 0, d)
    return [
        ("box", Box(lo, lo + rng.uniform(0.1, 3, d))),
        ("ball", Ball(rng.normal(size=d), float(rng.uniform(0.1, 2)))),
        ("simplex", Simplex(d + 1)),
        ("unbounded", Unbounded(d)),
    ]


def _geometry(rng, n, proj) -> List[PropertyResult]:
    worst = {"idempotence": 0.0, "nonexpansiveness": 0.0, "variational inequality": 0.0}
    for _ in range(n):
        for _, s in _random_sets(rng):
            a, b = rng.normal(scale=3, size=(2, s.dim))
            pa, pb = proj(s, a), proj(s, b)
            z = project(s, rng.normal(scale=3, size=s.dim))
            worst["idempotence"] = max(worst["idempotence"], float(np.abs(proj(s, pa) - pa).max()))
            worst["nonexpansiveness"] = max(worst["nonexpansiveness"],
                                            float(np.linalg.norm(pa - pb) - np.linalg.norm(a - b)))
            worst["variational inequality"] = max(worst["variational inequality"], float(np.dot(a - pa, z - pa)))
    tol = {"idempotence": 1e-12, "nonexpansiveness": 1e-12, "variational inequality": 1e-10}
    return [PropertyResult(f"geometry: {k}", v <= tol[k], f"worst {v:.3g}") for k, v in worst.items()]


def _prox(rng, n) -> List[PropertyResult]:
    zero_err, firm = 0.0, 0.0
    for _ in range(n):
        d = int(rng.integers(1, 6))
        s = Box.cube(d, float(rng.uniform(0.5, 2)))
        t = float(rng.uniform(0.1, 10))
        a, b = rng.normal(scale=2, size=(2, d))
        zero_err = max(zero_err, float(np.abs(prox(Zero(), s, t, a) - project(s, a)).max()))
        term = L1(float(rng.uniform(0, 1)))
        pa, pb = prox(term, s, t, a), prox(term, s, t, b)
        firm = max(firm, float(np.dot(pa - pb, pa - pb) - np.dot(pa - pb, a - b)))
    return [PropertyResult("prox: zero term equals projection", zero_err == 0.0, f"worst {zero_err:.3g}"),
            PropertyResult("prox: firm nonexpansiveness", firm <= 1e-12, f"worst {firm:.3g}")]


def _schedules(rng, n) -> List[PropertyResult]:
    ks = np.unique(np.logspace(0, 6, 60).astype(int))
    bad = []
    for _ in range(n):
        cfg = theorem_schedule(float(rng.uniform(0.1, 20)), int(rng.integers(1, 200)), slack=float(rng.uniform(0.3, 1)))
        if not validate_constraints(cfg).passed:
            bad.append("invalid generated config")
            continue
        at = [schedule_at(cfg, int(k)) for k in ks]
        nxt = [schedule_at(cfg, int(k) + 1) for k in ks]
        for a, b in zip(at, nxt):
            if not (b.rho <= a.rho and 0 < a.eta <= 1 and 0 < a.gamma <= 1 and 0 < a.theta <= 1
                    and a.eta * cfg.beta * a.rho < 1):
                bad.append("range/monotonicity")
        ratios = [a.alpha / b.rho for a, b in zip(at, nxt)]
        if any(r2 > r1 for r1, r2 in zip(ratios, ratios[1:])):
            bad.append("alpha_k/rho_(k+1) monotonicity")
    return [PropertyResult("schedules: ranges and monotonicity", not bad, "; ".join(sorted(set(bad))))]


def _problems(rng):
    return [
        ("quadratic", make_quadratic_saddle(3, 2, noise=0.5, seed=int(rng.integers(2**31)))),
        ("wgan", make_wgan_toy()),
        ("robust", make_robust_multidomain(synthetic_domains(3, 60, 4, seed=int(rng.integers(2**31))))),
    ]


def _random_point(rng, oracle):
    x = project(oracle.x_set, rng.uniform(-2, 2, oracle.d_x))
    y = project(oracle.y_set, rng.uniform(-2, 2, oracle.d_y))
    return x, y


def _oracles(rng, n_points, n_draws) -> List[PropertyResult]:
    out = []
    for name, o in _problems(rng):
        worst = 0.0
        for _ in range(n_points):
            x, y = _random_point(rng, o)
            gx, gy = o.per_sample_gradients(x, y, o.draw(n_draws, rng))
            ex, ey = o.exact_gradients(x, y)
            for g, e in ((gx, ex), (gy, ey)):
                se = g.std(axis=0, ddof=1) / math.sqrt(n_draws)
                z = np.abs(g.mean(axis=0) - e) / np.maximum(se, 1e-300)
                z[se == 0] = np.where(np.abs(g.mean(axis=0) - e)[se == 0] <= 1e-12, 0.0, np.inf)
                worst = max(worst, float(z.max()))
        out.append(PropertyResult(f"oracle: unbiasedness ({name})", worst <= 4.0, f"max z {worst:.2f}"))
        x, y = _random_point(rng, o)
        rho = float(rng.uniform(0, 2))
        view = RegularizedView(o, rho)
        gx, gy = view.exact_gradients(x, y)
        ex, ey = o.exact_gradients(x, y)
        err = float(max(np.abs(gx - ex).max(), np.abs(gy - (ey - rho * y)).max()))
        out.append(PropertyResult(f"oracle: regularized view identity ({name})", err <= 1e-15, f"err {err:.3g}"))
        if name != "robust":
            fd = max(finite_difference_check(o, *_random_point(rng, o)) for _ in range(n_points))
            out.append(PropertyResult(f"oracle: finite differences ({name})", fd <= 1e-6, f"max rel err {fd:.3g}"))
    return out


def _gaps(rng, n) -> List[PropertyResult]:
    out = []
    for name, o in _problems(rng):
        holds, eq = True, 0.0
        for _ in range(n):
            x, y = _random_point(rng, o)
            a, b = float(rng.uniform(0.01, 1)), float(rng.uniform(0.01, 1))
            holds &= gap_decomposition_check(o, x, y, a, b, float(rng.uniform(0, 2)))[2]
            lhs, rhs, _ = gap_decomposition_check(o, x, y, a, b, 0.0)
            eq = max(eq, abs(lhs - rhs))
        out.append(PropertyResult(f"metrics: gap decomposition ({name})", bool(holds and eq <= 1e-12),
                                  f"rho=0 mismatch {eq:.3g}"))
    return out


def _drift(rng, n) -> List[PropertyResult]:
    violations = 0
    for _ in range(n):
        o = make_quadratic_saddle(int(rng.integers(1, 4)), int(rng.integers(1, 3)), c_range=(0.0, 1.0),
                                  seed=int(rng.integers(2**31)))
        x, xb = (project(o.x_set, rng.uniform(-1, 1, o.d_x)) for _ in range(2))
        k = int(rng.integers(1, 1000))
        s = theorem_schedule(o.lipschitz)
        r0, r1 = schedule_at(s, k).rho, schedule_at(s, k + 1).rho
        violations += not lemma_ystar_drift_check(o, x, xb, r0, r1, resolution=101).holds
    return [PropertyResult("metrics: maximizer drift inequality", violations == 0, f"{violations}/{n} violations")]


def _transcription(rng, n) -> List[PropertyResult]:
    mismatches = 0
    for _ in range(n):
        seed = int(rng.integers(2**31))
        o = make_quadratic_saddle(3, 2, noise=0.3, seed=seed)
        sched = theorem_schedule(o.lipschitz, 4)
        sg = SGDAParams(0.05, 0.1, 4)
        for alg in ("formda", "formda-ns", "sgda"):
            kw = {"prox_x": L1(0.05), "prox_y": L1(0.02)} if alg == "formda-ns" else {}
            spec = SolverSpec(alg, schedule=None if alg == "sgda" else sched, sgda=sg, max_iters=11, **kw)
            recs = solve(spec, o, seed).records
            ref = reference_trajectory(o.A, o.B, o.C, o.noise, 1.0, 1.0, *o.initial_point(), 10, seed, alg,
                                       a4=sched.a4, a5=sched.a5, a6=sched.a6, L=sched.L, beta=sched.beta, b=4,
                                       l1_x=0.05, l1_y=0.02, sgda_alpha=sg.alpha, sgda_beta=sg.beta)
            mismatches += any(not (np.array_equal(r.x, x) and np.array_equal(r.y, y)) for r, (x, y) in zip(recs, ref))
    return [PropertyResult("solver: transcription equivalence", mismatches == 0, f"{mismatches} mismatching runs")]


def property_suite(seed: int = 0, projector: Optional[Callable] = None, size: int = 200) -> PropertyReport:
    """Run every invariant family once with randomness drawn from ``seed``.

    ``projector`` replaces :func:`project` in the geometry checks (a fault
    injection hook). ``size`` scales the number of random trials.
    """
    rng = np.random.default_rng(seed)
    proj = project if projector is None else projector
    results = []
    results += _geometry(rng, size, proj)
    results += _prox(rng, size)
    results += _schedules(rng, max(size // 20, 2))
    results += _oracles(rng, 3, 4000)
    results += _gaps(rng, size)
    results += _drift(rng, max(size // 20, 2))
    results += _transcription(rng, 3)
    return PropertyReport(results)
