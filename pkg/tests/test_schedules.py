import math

import mpmath
import numpy as np
import pytest

from formda.schedules import (
    PowerSequence,
    ScheduleConfig,
    complexity_target,
    robust_schedule,
    schedule_at,
    theorem_schedule,
    validate_constraints,
    wgan_schedule,
)

mpmath.mp.dps = 50


def _mp(x):
    return float(mpmath.mpf(x))


def test_theorem_k1_matches_high_precision():
    at = schedule_at(ScheduleConfig(a4=0.1, a5=1.0, a6=1.0, L=1.0), 1)
    three, two = mpmath.mpf(3), mpmath.mpf(2)
    expected = {
        "eta": three ** (-mpmath.mpf(5) / 13),
        "alpha": mpmath.mpf("0.1") * three ** (-mpmath.mpf(4) / 13),
        "rho": two ** (-mpmath.mpf(2) / 13),
        "gamma": three ** (-mpmath.mpf(12) / 13),
        "theta": three ** (-mpmath.mpf(8) / 13),
    }
    for name, v in expected.items():
        assert abs(getattr(at, name) - _mp(v)) <= 1e-12
    # commonly quoted five-digit roundings are only good to a few 1e-4
    assert at.eta == pytest.approx(0.65527, abs=5e-4)
    assert at.alpha == pytest.approx(0.07133, abs=5e-4)
    assert at.rho == pytest.approx(0.89890, abs=5e-4)
    assert at.gamma == pytest.approx(0.36291, abs=5e-4)
    assert at.theta == pytest.approx(0.50873, abs=5e-4)


def test_wgan_k1_clipped():
    at = schedule_at(wgan_schedule(), 1)
    three = mpmath.mpf(3)
    assert abs(at.eta - _mp(three ** (-mpmath.mpf(5) / 13))) <= 1e-12
    assert abs(at.alpha - _mp(mpmath.mpf("0.5") * three ** (-mpmath.mpf(4) / 13))) <= 1e-12
    assert abs(at.rho - _mp(mpmath.mpf(2) ** (-mpmath.mpf(2) / 13))) <= 1e-12
    # 3 * 3^(-12/13) > 1 and 2 * 3^(-8/13) > 1, both clipped
    assert at.gamma == 1.0 and at.theta == 1.0
    assert 3 * 3 ** (-12 / 13) > 1 and 2 * 3 ** (-8 / 13) > 1


def test_robust_k1():
    at = schedule_at(robust_schedule(), 1)
    assert abs(at.eta - _mp(1 / (mpmath.mpf(13) ** (mpmath.mpf(5) / 13) + 1))) <= 1e-12
    assert abs(at.rho - _mp(8 / (mpmath.mpf(12) ** (mpmath.mpf(2) / 13) + 2))) <= 1e-12


def test_k_zero_rejected():
    with pytest.raises(ValueError):
        schedule_at(ScheduleConfig(), 0)


def test_values_vanish_monotonically():
    cfg = ScheduleConfig()
    seq = [schedule_at(cfg, k) for k in (1, 10, 100, 10**4, 10**6, 10**9)]
    for name in ("eta", "alpha", "rho", "gamma", "theta"):
        vals = [getattr(s, name) for s in seq]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.05 * vals[0]


def test_constraint_examples():
    a4 = min(1 / 8, (1 / 6) / (8 * math.sqrt(5)))
    assert a4 == pytest.approx(1 / (48 * math.sqrt(5)))
    assert a4 == pytest.approx(0.009317, abs=1e-6)
    good = ScheduleConfig(a1=0.1, a2=0.1, a4=a4, a5=4 * a4 / 0.1 + 12 / 13, a6=80 * a4 / 0.1 + 12 / 13,
                          L=1.0, beta=1 / 6, batch=100)
    assert validate_constraints(good).passed
    bad_beta = ScheduleConfig(**{**good.to_dict(), "beta": 1 / 3})
    fails = [c.name for c in validate_constraints(bad_beta).failures()]
    assert "beta <= 1/(6L)" in fails
    bad_a5 = ScheduleConfig(**{**good.to_dict(), "a5": 0.0})
    assert [c.name for c in validate_constraints(bad_a5).failures()] == ["a5 >= 4 a4/a1 + 12/13"]


def test_report_lists_both_sides():
    rep = validate_constraints(ScheduleConfig(beta=1.0))
    row = next(c for c in rep.constraints if c.name == "beta <= 1/(6L)")
    assert (row.lhs, row.rhs, row.passed) == (1.0, pytest.approx(1 / 6), False)
    assert "FAIL beta <= 1/(6L)" in str(rep)


def test_theorem_schedule_is_valid():
    for L in (0.3, 1.0, 9.2, 50.0):
        for b in (1, 32, 100):
            assert validate_constraints(theorem_schedule(L, b)).passed


def test_complexity_examples():
    assert complexity_target(2.0, 1.0, 1.0).rho_branch == 0.0
    assert complexity_target(1.0, 1.0, 1.0).rho_branch == pytest.approx(_mp(mpmath.mpf(2) ** 6.5 - 1), abs=1e-12)
    assert complexity_target(1.0, 1.0, 1.0).rho_branch == pytest.approx(89.51, abs=5e-3)
    assert complexity_target(1.0, 0.0, 1.0).rho_branch == 0.0
    assert complexity_target(1.0, 1.0, 1.0).exponent == 6.5
    with pytest.raises(ValueError):
        complexity_target(0.0, 1.0, 1.0)


def test_round_trip_dict():
    for cfg in (ScheduleConfig(a1=0.2, batch=7), wgan_schedule(), robust_schedule()):
        assert ScheduleConfig.from_dict(cfg.to_dict()) == cfg


def test_unknown_keys_rejected():
    with pytest.raises(ValueError):
        ScheduleConfig.from_dict({"a3": 1.0})
    with pytest.raises(ValueError):
        PowerSequence.from_dict({"scale": 1, "exponent": 2})


def test_fraction_strings():
    assert PowerSequence.from_dict({"scale": 1, "power": "5/13"}).power == 5 / 13


def test_manual_requires_all_sequences():
    with pytest.raises(ValueError):
        ScheduleConfig(mode="manual", sequences={"eta": PowerSequence(1.0)})


def test_validated_configs_keep_invariants():
    rng = np.random.default_rng(0)
    ks = np.unique(np.logspace(0, 6, 80).astype(int))
    for _ in range(20):
        cfg = theorem_schedule(rng.uniform(0.1, 20), int(rng.integers(1, 200)), slack=rng.uniform(0.2, 1))
        prev_ratio = np.inf
        for k in ks:
            a, b = schedule_at(cfg, int(k)), schedule_at(cfg, int(k) + 1)
            assert b.rho <= a.rho <= cfg.L
            assert 0 < a.eta <= 1 and 0 < a.gamma <= 1 and 0 < a.theta <= 1
            assert a.eta * cfg.beta * a.rho < 1
            assert a.alpha / b.rho <= prev_ratio
            prev_ratio = a.alpha / b.rho
