"""Experiment configuration: TOML parsing, problem/solver resolution, validation.

Example::

    seeds = [0, 1, 2, 3, 4]
    max_iters = 2000
    gap_eval_stride = 10
    output_dir = "runs/wgan"
    override = true

    [problem]
    name = "wgan"
    x_init = [0.0, 1.0]

    [[solvers]]
    label = "FORMDA"
    algorithm = "formda"
    schedule = { preset = "wgan", batch = 100 }

    [[solvers]]
    label = "SGDA"
    algorithm = "sgda"
    alpha = 0.001
    beta = 0.01
    batch = 100

Unknown keys anywhere are errors.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import tomli

from ..geometry import L1, Box, Zero
from ..oracle import (
    StochasticOracle,
    load_domain_csv,
    make_quadratic_saddle,
    make_robust_multidomain,
    make_wgan_toy,
    synthetic_domains,
)
from ..schedules import ScheduleConfig, robust_schedule, validate_constraints, wgan_schedule
from ..solver import ALGORITHMS, SGDAParams, SolverSpec

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ProblemSpec",
    "PROBLEMS",
    "load_config",
    "parse_config",
    "validate_config",
    "ConfigReport",
]


class ConfigError(ValueError):
    pass


def _quadratic(p):
    return make_quadratic_saddle(**p)


def _wgan(p):
    p = dict(p)
    rp = p.pop("phi_radius", 2.0)
    rq = p.pop("psi_radius", 2.0)
    return make_wgan_toy(phi_set=Box.cube(2, rp), psi_set=Box.cube(2, rq), **p)


def _robust(p):
    p = dict(p)
    paths = p.pop("csv", None)
    x_radius = p.pop("x_radius", 1e3)
    if paths:
        if p:
            raise ConfigError(f"csv datasets take no synthetic parameters: {sorted(p)}")
        datasets = load_domain_csv(paths)
    else:
        if "data_seed" in p:
            p["seed"] = p.pop("data_seed")
        datasets = synthetic_domains(**p)
    return make_robust_multidomain(datasets, x_radius=x_radius)


# name -> (factory, allowed parameter names, description)
PROBLEMS: Dict[str, Tuple[Callable[[Dict], StochasticOracle], Tuple[str, ...], str]] = {
    "quadratic": (_quadratic, ("d_x", "d_y", "a_range", "c_range", "coupling", "noise", "x_radius",
                               "y_radius", "seed"),
                  "random quadratic saddle x'Ax/2 + x'By - y'Cy/2 with Gaussian gradient noise"),
    "wgan": (_wgan, ("real_mean", "real_std", "z_std", "phi_radius", "psi_radius"),
             "WGAN moment-matching toy: linear generator, quadratic critic"),
    "robust_multidomain": (_robust, ("n_domains", "n_points", "n_features", "label_noise", "shift",
                                     "data_seed", "csv", "x_radius"),
                           "worst-case logistic regression over domains, dual on the simplex"),
}

_TOP_KEYS = {"name", "seeds", "max_iters", "gap_eval_stride", "eval_batch", "output_dir", "override",
             "record_wall_time", "problem", "solvers"}
_SOLVER_KEYS = {"label", "algorithm", "schedule", "alpha", "beta", "batch", "stop_tolerance",
                "prox_x", "prox_y"}
_PRESETS = {"wgan": wgan_schedule, "robust": robust_schedule}


@dataclass
class ProblemSpec:
    name: str
    params: Dict[str, Any] = field(default_factory=dict)
    x_init: Optional[List[float]] = None
    y_init: Optional[List[float]] = None

    def build(self) -> StochasticOracle:
        factory, allowed, _ = PROBLEMS[self.name]
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise ConfigError(f"unknown parameters for problem {self.name!r}: {sorted(unknown)}")
        return factory(self.params)

    def initial_point(self, oracle: StochasticOracle):
        x0, y0 = oracle.initial_point()
        x = x0 if self.x_init is None else np.asarray(self.x_init, dtype=float)
        y = y0 if self.y_init is None else np.asarray(self.y_init, dtype=float)
        return x, y


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    solvers: List[Tuple[str, SolverSpec]]
    seeds: List[int]
    max_iters: int
    gap_eval_stride: int = 10
    eval_batch: int = 10000
    output_dir: str = "runs"
    override: bool = False
    record_wall_time: bool = False
    name: str = "experiment"
    raw: Dict[str, Any] = field(default_factory=dict)


def _prox_term(d):
    if d is None:
        return Zero()
    if isinstance(d, str):
        d = {"type": d}
    d = dict(d)
    kind = d.pop("type", "zero")
    if kind == "zero" and not d:
        return Zero()
    if kind == "l1" and set(d) <= {"weight"}:
        return L1(float(d.get("weight", 0.0)))
    raise ConfigError(f"bad prox term {d!r} (type {kind!r})")


def _schedule(d) -> ScheduleConfig:
    if isinstance(d, str):
        d = {"preset": d}
    d = dict(d)
    preset = d.pop("preset", None)
    if preset is not None:
        if preset not in _PRESETS:
            raise ConfigError(f"unknown schedule preset {preset!r}; known: {sorted(_PRESETS)}")
        kw = {}
        for k in ("batch", "L", "beta"):
            if k in d:
                kw[k] = d.pop(k)
        if d:
            raise ConfigError(f"unknown keys for preset schedule: {sorted(d)}")
        return _PRESETS[preset](**kw)
    try:
        return ScheduleConfig.from_dict(d)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _solver(d: Dict, top: Dict) -> Tuple[str, SolverSpec]:
    unknown = set(d) - _SOLVER_KEYS
    if unknown:
        raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
    alg = d.get("algorithm")
    if alg not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {alg!r}; known: {list(ALGORITHMS)}")
    label = d.get("label", alg)
    common = dict(max_iters=int(top["max_iters"]), stop_tolerance=float(d.get("stop_tolerance", 0.0)),
                  gap_eval_stride=int(top.get("gap_eval_stride", 10)),
                  eval_batch=int(top.get("eval_batch", 10000)), allow_unvalidated=bool(top.get("override", False)))
    if alg == "sgda":
        extra = set(d) & {"schedule", "prox_x", "prox_y"}
        if extra:
            raise ConfigError(f"SGDA does not take {sorted(extra)}")
        try:
            params = SGDAParams(float(d["alpha"]), float(d["beta"]), int(d.get("batch", 1)))
        except KeyError as e:
            raise ConfigError(f"SGDA needs {e.args[0]!r}") from None
        return label, SolverSpec("sgda", sgda=params, **common)
    extra = set(d) & {"alpha", "beta", "batch"}
    if extra:
        raise ConfigError(f"{alg} takes stepsizes from its schedule, not {sorted(extra)}")
    if "schedule" not in d:
        raise ConfigError(f"{alg} needs a schedule")
    if alg == "formda" and ("prox_x" in d or "prox_y" in d):
        raise ConfigError("prox terms need algorithm = 'formda-ns'")
    return label, SolverSpec(alg, schedule=_schedule(d["schedule"]), prox_x=_prox_term(d.get("prox_x")),
                             prox_y=_prox_term(d.get("prox_y")), **common)


def parse_config(raw: Dict[str, Any]) -> ExperimentConfig:
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    for key in ("seeds", "max_iters", "problem", "solvers"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    seeds = raw["seeds"]
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
        raise ConfigError("seeds must be a non-empty list of integers")
    prob = dict(raw["problem"])
    name = prob.pop("name", None)
    if name not in PROBLEMS:
        raise ConfigError(f"unknown problem {name!r}; known: {sorted(PROBLEMS)}")
    x_init, y_init = prob.pop("x_init", None), prob.pop("y_init", None)
    unknown = set(prob) - set(PROBLEMS[name][1])
    if unknown:
        raise ConfigError(f"unknown parameters for problem {name!r}: {sorted(unknown)}")
    solvers_raw = raw["solvers"]
    if not isinstance(solvers_raw, list) or not solvers_raw:
        raise ConfigError("solvers must be a non-empty array of tables")
    try:
        solvers = [_solver(s, raw) for s in solvers_raw]
    except ValueError as e:
        raise ConfigError(str(e)) from e
    labels = [lab for lab, _ in solvers]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"solver labels must be unique: {labels}")
    return ExperimentConfig(
        problem=ProblemSpec(name, prob, x_init, y_init),
        solvers=solvers,
        seeds=list(seeds),
        max_iters=int(raw["max_iters"]),
        gap_eval_stride=int(raw.get("gap_eval_stride", 10)),
        eval_batch=int(raw.get("eval_batch", 10000)),
        output_dir=str(raw.get("output_dir", "runs")),
        override=bool(raw.get("override", False)),
        record_wall_time=bool(raw.get("record_wall_time", False)),
        name=str(raw.get("name", "experiment")),
        raw=copy.deepcopy(raw),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        return parse_config(tomli.load(fh))


@dataclass
class ConfigReport:
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors

    def __str__(self) -> str:
        lines = [f"error: {e}" for e in self.errors] + [f"warning: {w}" for w in self.warnings]
        lines.append("config OK" if self.passed else "config INVALID")
        return "\n".join(lines)


def validate_config(raw) -> ConfigReport:
    """Full resolvability and schedule-constraint report for a raw config dict or path."""
    report = ConfigReport()
    try:
        if isinstance(raw, str):
            with open(raw, "rb") as fh:
                raw = tomli.load(fh)
        cfg = parse_config(raw)
    except (ConfigError, OSError, tomli.TOMLDecodeError) as e:
        report.errors.append(str(e))
        return report
    try:
        oracle = cfg.problem.build()
        x, y = cfg.problem.initial_point(oracle)
        if x.shape != (oracle.d_x,) or y.shape != (oracle.d_y,):
            report.errors.append(f"initial point shapes {x.shape}, {y.shape} do not match "
                                 f"problem dimensions ({oracle.d_x},), ({oracle.d_y},)")
    except (ValueError, OSError) as e:
        report.errors.append(f"problem {cfg.problem.name!r}: {e}")
    for label, spec in cfg.solvers:
        if spec.algorithm == "sgda":
            continue
        sched = spec.schedule
        if sched.mode == "manual":
            msg = f"solver {label!r}: manual schedule lies outside the theorem's parameter family"
            (report.warnings if cfg.override else report.errors).append(
                msg + ("" if cfg.override else "; set override = true to run it"))
            continue
        check = validate_constraints(sched)
        for c in check.failures():
            msg = f"solver {label!r}: constraint {c.name} violated ({c.lhs:.6g} {c.relation} {c.rhs:.6g} is false)"
            (report.warnings if cfg.override else report.errors).append(msg)
    return report
