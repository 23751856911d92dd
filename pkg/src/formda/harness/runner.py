"""Run every (solver, seed) pair of an experiment and persist the results."""

from __future__ import annotations

import json
import os
import re
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from .. import __version__
from ..solver import run
from .config import ConfigError, ExperimentConfig, parse_config, validate_config
from .io import aggregate_rows, read_run_csv, write_aggregate_csv, write_run_csv

__all__ = ["WORKERS_ENV", "ExperimentSummary", "run_experiment", "run_filename", "aggregate_filename"]

WORKERS_ENV = "FORMDA_WORKERS"


def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


def run_filename(label: str, seed: int) -> str:
    return f"{_safe(label)}_seed{seed}.csv"


def aggregate_filename(label: str) -> str:
    return f"{_safe(label)}_aggregate.csv"


def _maybe(v):
    return None if v is None else float(v)


def _run_one(raw: Dict, solver_index: int, seed: int, out_dir: str) -> Dict:
    cfg = parse_config(raw)
    label, spec = cfg.solvers[solver_index]
    oracle = cfg.problem.build()
    x1, y1 = cfg.problem.initial_point(oracle)
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        # the override was already reported by validation
        warnings.simplefilter("ignore")
        records = list(run(spec, oracle, seed, x1, y1, record_time=cfg.record_wall_time))
    elapsed = time.perf_counter() - t0
    path = os.path.join(out_dir, run_filename(label, seed))
    write_run_csv(path, records)
    last = records[-1]
    evaluated = [r for r in records if r.gap_true is not None]
    final_eval = evaluated[-1] if evaluated else None
    return {
        "solver": label,
        "algorithm": spec.algorithm,
        "seed": seed,
        "csv": os.path.basename(path),
        "iterations": last.iter,
        "stop_reason": last.stop_reason,
        "final_gap_surrogate": _maybe(last.gap_surrogate),
        "final_gap_true": _maybe(final_eval.gap_true) if final_eval else None,
        "final_gap_regularized": _maybe(final_eval.gap_regularized) if final_eval else None,
        "final_checkpoint": final_eval.iter if final_eval else None,
        "final_dist_to_target": _maybe(last.dist_to_target),
        "final_x": last.x.tolist(),
        "final_y": last.y.tolist(),
        "wall_seconds": elapsed,
    }


@dataclass
class ExperimentSummary:
    output_dir: str
    runs: List[Dict]
    aggregates: Dict[str, str]
    summary_path: str
    warnings: List[str]

    def run_csv(self, label: str, seed: int) -> str:
        return os.path.join(self.output_dir, run_filename(label, seed))

    def aggregate_csv(self, label: str) -> str:
        return os.path.join(self.output_dir, self.aggregates[label])


def _workers(workers: Optional[int]) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1")
    return workers


def run_experiment(config: Union[ExperimentConfig, Dict, str], output_dir: Optional[str] = None,
                   workers: Optional[int] = None) -> ExperimentSummary:
    """Execute every (solver, seed) pair, then aggregate per iteration.

    Writes ``<label>_seed<seed>.csv`` per run, ``<label>_aggregate.csv`` per
    solver and ``summary.json`` into the output directory. The worker count
    comes from ``workers`` or the ``FORMDA_WORKERS`` environment variable.
    """
    if isinstance(config, ExperimentConfig):
        raw = config.raw
    elif isinstance(config, str):
        from .config import load_config

        raw = load_config(config).raw
    else:
        raw = config
    report = validate_config(raw)
    if not report.passed:
        raise ConfigError("; ".join(report.errors))
    cfg = parse_config(raw)
    out_dir = output_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    jobs = [(i, seed) for i in range(len(cfg.solvers)) for seed in cfg.seeds]
    n = _workers(workers)
    t0 = time.perf_counter()
    if n == 1 or len(jobs) == 1:
        runs = [_run_one(raw, i, seed, out_dir) for i, seed in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            futures = [pool.submit(_run_one, raw, i, seed, out_dir) for i, seed in jobs]
            runs = [f.result() for f in futures]
    aggregates = {}
    for label, _ in cfg.solvers:
        rows = [read_run_csv(os.path.join(out_dir, r["csv"])) for r in runs if r["solver"] == label]
        name = aggregate_filename(label)
        write_aggregate_csv(os.path.join(out_dir, name), aggregate_rows(rows))
        aggregates[label] = name
    summary = {
        "name": cfg.name,
        "library_version": __version__,
        "numpy_version": np.__version__,
        "master_seeds": list(cfg.seeds),
        "workers": n,
        "total_wall_seconds": time.perf_counter() - t0,
        "warnings": report.warnings,
        "config": raw,
        "aggregates": aggregates,
        "runs": runs,
    }
    path = os.path.join(out_dir, "summary.json")
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return ExperimentSummary(out_dir, runs, aggregates, path, report.warnings)
