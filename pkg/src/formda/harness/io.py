"""Per-run and aggregate CSV files."""

from __future__ import annotations

import csv
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..solver import RunRecord

__all__ = ["FIELDS", "format_value", "write_run_csv", "read_run_csv", "aggregate_rows", "write_aggregate_csv",
           "read_aggregate_csv"]

FIELDS = ("iter", "gap_true", "gap_regularized", "gap_surrogate", "rho", "estimator_err_x", "estimator_err_y",
          "dist_to_target", "grad_calls", "wall_ms")
_INT_FIELDS = ("iter", "grad_calls")


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _parse(name: str, s: str):
    if s == "":
        return None
    return int(s) if name in _INT_FIELDS else float(s)


def write_run_csv(path: str, records: Sequence[RunRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIELDS)
        for r in records:
            w.writerow([format_value(getattr(r, f)) for f in FIELDS])


def read_run_csv(path: str) -> List[Dict[str, Optional[float]]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [{k: _parse(k, row[k]) for k in FIELDS} for row in reader]


def aggregate_rows(runs: Sequence[Sequence[Dict]]) -> List[Dict[str, Optional[float]]]:
    """Mean and population std per iteration over the runs that report a value there."""
    by_iter: Dict[int, List[Dict]] = {}
    for rows in runs:
        for row in rows:
            by_iter.setdefault(int(row["iter"]), []).append(row)
    out = []
    for k in sorted(by_iter):
        agg = {"iter": k}
        for f in FIELDS[1:]:
            vals = [row[f] for row in by_iter[k] if row[f] is not None]
            if vals:
                a = np.asarray(vals, dtype=float)
                agg[f + "_mean"], agg[f + "_std"] = float(a.mean()), float(a.std())
            else:
                agg[f + "_mean"] = agg[f + "_std"] = None
        out.append(agg)
    return out


def _agg_header():
    return ["iter"] + [f + s for f in FIELDS[1:] for s in ("_mean", "_std")]


def write_aggregate_csv(path: str, rows: Sequence[Dict]) -> None:
    header = _agg_header()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(row[h]) for h in header])


def read_aggregate_csv(path: str) -> List[Dict[str, Optional[float]]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: (int(v) if k == "iter" else (None if v == "" else float(v))) for k, v in row.items()}
                for row in reader]
