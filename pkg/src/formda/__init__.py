"""Regularized momentum descent-ascent for stochastic nonconvex-concave minimax problems."""

from .geometry import Ball, Box, IndicatorOf, L1, Simplex, Unbounded, Zero, project, prox, simplex_project
from .metrics import (
    brute_force_phi,
    finite_difference_check,
    gap_decomposition_check,
    lemma_ystar_drift_check,
    stationarity_gap,
)
from .oracle import (
    RegularizedView,
    StochasticOracle,
    make_quadratic_saddle,
    make_robust_multidomain,
    make_wgan_toy,
    regularized_sample_gradients,
    synthetic_domains,
)
from .schedules import (
    PowerSequence,
    ScheduleConfig,
    complexity_target,
    robust_schedule,
    schedule_at,
    theorem_schedule,
    validate_constraints,
    wgan_schedule,
)
from .solver import SGDAParams, SolverSpec, formda_ns_step, formda_step, run, sgda_step, solve

__version__ = "0.1.0"
