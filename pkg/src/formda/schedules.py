"""Closed-form parameter sequences and the constant constraints they must meet.

In theorem mode the sequences are

    eta_k   = (k + 2)^(-5/13)
    alpha_k = a4 (k + 2)^(-4/13)
    rho_k   = L (k + 1)^(-2/13)
    gamma_k = a5 (k + 2)^(-12/13)
    theta_k = a6 (k + 2)^(-8/13)

Manual mode replaces each with a :class:`PowerSequence`
``scale / ((k + shift)^power + offset)``, which covers every variant used in the
experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

__all__ = [
    "PowerSequence",
    "ScheduleConfig",
    "ScheduleAt",
    "Constraint",
    "ValidationReport",
    "schedule_at",
    "validate_constraints",
    "complexity_target",
    "ComplexityTarget",
    "wgan_schedule",
    "robust_schedule",
    "theorem_schedule",
]


def _as_float(v) -> float:
    if isinstance(v, str):
        return float(Fraction(v.strip()))
    return float(v)


@dataclass(frozen=True)
class PowerSequence:
    """``scale / ((k + shift) ** power + offset)``."""

    scale: float
    shift: float = 0.0
    power: float = 1.0
    offset: float = 0.0

    def __call__(self, k: int) -> float:
        return self.scale / ((k + self.shift) ** self.power + self.offset)

    @classmethod
    def from_dict(cls, d: Dict) -> "PowerSequence":
        unknown = set(d) - {"scale", "shift", "power", "offset"}
        if unknown:
            raise ValueError(f"unknown sequence keys: {sorted(unknown)}")
        return cls(**{k: _as_float(v) for k, v in d.items()})

    def to_dict(self) -> Dict[str, float]:
        return {"scale": self.scale, "shift": self.shift, "power": self.power, "offset": self.offset}


_SEQ_NAMES = ("eta", "alpha", "rho", "gamma", "theta")


@dataclass(frozen=True)
class ScheduleConfig:
    a1: float = 0.1
    a2: float = 0.1
    a4: float = 0.1
    a5: float = 1.0
    a6: float = 1.0
    L: float = 1.0
    beta: float = 0.1
    batch: int = 1
    mode: str = "theorem"
    sequences: Dict[str, PowerSequence] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("theorem", "manual"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if int(self.batch) < 1:
            raise ValueError("batch must be >= 1")
        if self.mode == "manual":
            missing = set(_SEQ_NAMES) - set(self.sequences)
            if missing:
                raise ValueError(f"manual schedule is missing sequences {sorted(missing)}")

    def to_dict(self) -> Dict:
        d = {k: getattr(self, k) for k in ("a1", "a2", "a4", "a5", "a6", "L", "beta", "batch", "mode")}
        if self.mode == "manual":
            d["sequences"] = {k: self.sequences[k].to_dict() for k in _SEQ_NAMES}
        return d

    @classmethod
    def from_dict(cls, d: Dict) -> "ScheduleConfig":
        d = dict(d)
        unknown = set(d) - {"a1", "a2", "a4", "a5", "a6", "L", "beta", "batch", "mode", "sequences"}
        if unknown:
            raise ValueError(f"unknown schedule keys: {sorted(unknown)}")
        seqs = {k: PowerSequence.from_dict(v) for k, v in d.pop("sequences", {}).items()}
        bad = set(seqs) - set(_SEQ_NAMES)
        if bad:
            raise ValueError(f"unknown sequence names: {sorted(bad)}")
        kw = {k: _as_float(v) for k, v in d.items() if k not in ("mode", "batch")}
        if "batch" in d:
            kw["batch"] = int(d["batch"])
        if "mode" in d:
            kw["mode"] = d["mode"]
        return cls(sequences=seqs, **kw)


@dataclass(frozen=True)
class ScheduleAt:
    eta: float
    alpha: float
    rho: float
    gamma: float
    theta: float


def schedule_at(config: ScheduleConfig, k: int) -> ScheduleAt:
    """Parameters at iteration ``k >= 1``; eta, gamma and theta are clipped to 1."""
    if k < 1:
        raise ValueError("schedules start at k = 1")
    if config.mode == "theorem":
        eta = (k + 2) ** (-5 / 13)
        alpha = config.a4 * (k + 2) ** (-4 / 13)
        rho = config.L * (k + 1) ** (-2 / 13)
        gamma = config.a5 * (k + 2) ** (-12 / 13)
        theta = config.a6 * (k + 2) ** (-8 / 13)
    else:
        s = config.sequences
        eta, alpha, rho, gamma, theta = (s[n](k) for n in _SEQ_NAMES)
    return ScheduleAt(eta=min(eta, 1.0), alpha=alpha, rho=rho, gamma=min(gamma, 1.0), theta=min(theta, 1.0))


@dataclass(frozen=True)
class Constraint:
    name: str
    lhs: float
    rhs: float
    relation: str
    passed: bool


@dataclass
class ValidationReport:
    constraints: List[Constraint]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.constraints)

    def failures(self) -> List[Constraint]:
        return [c for c in self.constraints if not c.passed]

    def __str__(self) -> str:
        lines = []
        for c in self.constraints:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"{mark} {c.name}: {c.lhs:.6g} {c.relation} {c.rhs:.6g}")
        return "\n".join(lines)


def validate_constraints(config: ScheduleConfig) -> ValidationReport:
    L, beta, b, a4 = config.L, config.beta, config.batch, config.a4
    ab_bound = min(b / (32 * a4 * L**2), b * a4 / (2 * L * beta)) if a4 > 0 else math.inf
    rows = [
        ("0 < a1", 0.0, config.a1, "<", 0.0 < config.a1),
        ("a1 <= min{b/(32 a4 L^2), b a4/(2 L beta)}", config.a1, ab_bound, "<=", config.a1 <= ab_bound),
        ("0 < a2", 0.0, config.a2, "<", 0.0 < config.a2),
        ("a2 <= min{b/(32 a4 L^2), b a4/(2 L beta)}", config.a2, ab_bound, "<=", config.a2 <= ab_bound),
        ("0 < a4", 0.0, a4, "<", 0.0 < a4),
        ("a4 <= min{1/(8L), beta/(8 sqrt5)}", a4, min(1 / (8 * L), beta / (8 * math.sqrt(5))), "<=",
         a4 <= min(1 / (8 * L), beta / (8 * math.sqrt(5)))),
    ]
    a5_rhs = 4 * a4 / config.a1 + 12 / 13 if config.a1 > 0 else math.inf
    a6_rhs = 80 * a4 / config.a2 + 12 / 13 if config.a2 > 0 else math.inf
    rows += [
        ("a5 >= 4 a4/a1 + 12/13", config.a5, a5_rhs, ">=", config.a5 >= a5_rhs),
        ("a6 >= 80 a4/a2 + 12/13", config.a6, a6_rhs, ">=", config.a6 >= a6_rhs),
        ("0 < beta", 0.0, beta, "<", 0.0 < beta),
        ("beta <= 1/(6L)", beta, 1 / (6 * L), "<=", beta <= 1 / (6 * L)),
    ]
    return ValidationReport([Constraint(*r) for r in rows])


@dataclass(frozen=True)
class ComplexityTarget:
    rho_branch: float
    exponent: float = 6.5


def complexity_target(epsilon: float, sigma_y: float, L: float) -> ComplexityTarget:
    """Explicit branch ``(2 L sigma_y / epsilon)^(13/2) - 1`` of the iteration bound, clamped at 0."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return ComplexityTarget(rho_branch=max(0.0, (2 * L * sigma_y / epsilon) ** 6.5 - 1.0))


def wgan_schedule(batch: int = 100, L: float = 1.0) -> ScheduleConfig:
    """Manual schedule used for the WGAN experiment."""
    return ScheduleConfig(
        L=L,
        beta=0.005,
        batch=batch,
        mode="manual",
        sequences={
            "eta": PowerSequence(1.0, 2, 5 / 13),
            "alpha": PowerSequence(0.5, 2, 4 / 13),
            "rho": PowerSequence(1.0, 1, 2 / 13),
            "gamma": PowerSequence(3.0, 2, 12 / 13),
            "theta": PowerSequence(2.0, 2, 8 / 13),
        },
    )


def robust_schedule(batch: int = 32, L: float = 1.0, beta: float = 0.001) -> ScheduleConfig:
    """Manual schedule used for robust learning over multiple domains."""
    return ScheduleConfig(
        L=L,
        beta=beta,
        batch=batch,
        mode="manual",
        sequences={
            "eta": PowerSequence(1.0, 12, 5 / 13, 1.0),
            "alpha": PowerSequence(0.5, 12, 2 / 13, 1.0),
            "rho": PowerSequence(8.0, 11, 2 / 13, 2.0),
            "gamma": PowerSequence(3.0, 12, 8 / 13, 1.0),
            "theta": PowerSequence(2.0, 12, 8 / 13, 1.0),
        },
    )


def theorem_schedule(L: float, batch: int = 1, beta: Optional[float] = None, slack: float = 1.0) -> ScheduleConfig:
    """Theorem-mode config meeting every constraint, built from ``L`` and ``b``.

    ``beta`` defaults to its upper bound ``1/(6L)``. ``a4`` takes its upper
    bound, ``a1 = a2`` theirs, and ``a5``/``a6`` their lower bounds, each
    scaled by ``slack`` (``<= 1`` shrinks the upper bounds, ``>= 1`` enlarges
    the lower bounds).
    """
    if not (L > 0 and slack > 0):
        raise ValueError("L and slack must be positive")
    beta = 1.0 / (6 * L) if beta is None else beta
    shrink = min(slack, 1.0)
    a4 = shrink * min(1 / (8 * L), beta / (8 * math.sqrt(5)))
    a12 = shrink * min(batch / (32 * a4 * L**2), batch * a4 / (2 * L * beta))
    grow = max(slack, 1.0)
    return ScheduleConfig(a1=a12, a2=a12, a4=a4, a5=grow * (4 * a4 / a12 + 12 / 13),
                          a6=grow * (80 * a4 / a12 + 12 / 13), L=L, beta=beta, batch=batch)
