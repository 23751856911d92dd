import numpy as np
import pytest

from formda.geometry import L1, Box, Simplex, project
from formda.metrics import (
    brute_force_phi,
    direct_worst_case,
    gap_decomposition_check,
    gap_from_gradients,
    lemma_ystar_drift_check,
    stationarity_gap,
)
from formda.oracle import make_quadratic_saddle, make_robust_multidomain, make_wgan_toy, synthetic_domains
from formda.schedules import schedule_at, theorem_schedule


def _interval_gap(g):
    box = Box([0.0], [1.0])
    proj = lambda p: project(box, p)  # noqa: E731
    return gap_from_gradients(np.array([g]), np.zeros(1), np.zeros(1), np.zeros(1), 0.5, 1.0, proj, proj)


def test_interval_examples():
    assert np.array_equal(_interval_gap(1.0).x_block, [0.0])
    assert np.array_equal(_interval_gap(-1.0).x_block, [-1.0])


def test_zero_gradient_interior():
    o = make_quadratic_saddle(3, 2, seed=1)
    gap = stationarity_gap(o, np.zeros(3), np.zeros(2), 0.3, 0.7)
    assert gap.norm == 0.0


def test_norm_definition():
    o = make_wgan_toy()
    gap = stationarity_gap(o, np.array([0.5, 1.5]), np.array([1.0, -0.5]), 0.1, 0.2)
    assert gap.norm**2 == pytest.approx(np.sum(gap.x_block**2) + np.sum(gap.y_block**2), rel=1e-15)


def test_regularized_variant_rho_zero_equals_true():
    o = make_quadratic_saddle(3, 2, seed=2)
    x, y = np.full(3, 0.4), np.array([0.9, -0.2])
    a = stationarity_gap(o, x, y, 0.2, 0.3, "true")
    b = stationarity_gap(o, x, y, 0.2, 0.3, "regularized", rho=0.0)
    assert a.norm == b.norm


def test_argument_errors():
    o = make_wgan_toy()
    x, y = o.initial_point()
    with pytest.raises(ValueError):
        stationarity_gap(o, x, y, 0.1, 0.1, "regularized")
    with pytest.raises(ValueError):
        stationarity_gap(o, x, y, 0.0, 0.1)
    with pytest.raises(ValueError):
        stationarity_gap(o, x, y, 0.1, 0.1, "bogus")


def test_prox_variant_uses_prox_maps():
    o = make_quadratic_saddle(2, 1, seed=0, x_radius=5.0)
    x, y = np.array([0.01, -0.02]), np.zeros(1)
    plain = stationarity_gap(o, x, y, 0.5, 0.5, "true")
    shrunk = stationarity_gap(o, x, y, 0.5, 0.5, "prox", prox_x=L1(100.0))
    # heavy shrinkage sends the prox step to 0, so the x block is x / alpha
    np.testing.assert_allclose(shrunk.x_block, x / 0.5, atol=1e-15)
    assert not np.allclose(plain.x_block, shrunk.x_block)


def test_saddle_point_gap_vanishes():
    o = make_quadratic_saddle(3, 3, A=np.diag([1.0, 2.0, 0.5]), C=np.diag([1.0, 0.3, 2.0]), seed=3)
    assert stationarity_gap(o, np.zeros(3), np.zeros(3), 0.1, 0.1).norm <= 1e-8


@pytest.mark.parametrize("make", [lambda: make_quadratic_saddle(3, 2, seed=5), make_wgan_toy,
                                  lambda: make_robust_multidomain(synthetic_domains(3, 50, 3, seed=0))])
def test_decomposition_sweep(make):
    o = make()
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = project(o.x_set, rng.uniform(-2, 2, o.d_x))
        y = project(o.y_set, rng.uniform(-2, 2, o.d_y))
        a, b, rho = rng.uniform(0.01, 1), rng.uniform(0.01, 1), rng.uniform(0, 3)
        assert gap_decomposition_check(o, x, y, a, b, rho)[2]
        lhs, rhs, _ = gap_decomposition_check(o, x, y, a, b, 0.0)
        assert abs(lhs - rhs) <= 1e-12
        if not isinstance(o.y_set, Simplex):
            assert gap_decomposition_check(o, x, np.zeros(o.d_y), a, b, rho)[2]


def test_brute_force_matches_closed_form():
    o = make_quadratic_saddle(2, 2, seed=4, y_radius=5.0)
    x = np.array([0.3, -0.6])
    for rho in (0.5, 1.0, 3.0):
        env = brute_force_phi(o, x, rho)
        ystar = o.ystar_unconstrained(x, rho)
        assert np.linalg.norm(env.y_star - ystar) <= max(env.spacing, env.argmax_bound)
        phi = o.value(x, ystar) - 0.5 * rho * ystar @ ystar
        assert phi - env.value_bound - 1e-12 <= env.phi <= phi + 1e-12


def test_brute_force_constant_in_y_takes_first_grid_point():
    o = make_quadratic_saddle(1, 2, A=[[1.0]], B=np.zeros((1, 2)), C=np.zeros((2, 2)))
    env = brute_force_phi(o, np.array([0.5]), 0.0, resolution=11)
    assert env.phi == pytest.approx(0.125)
    assert np.array_equal(env.y_star, o.y_set.lower)


def test_brute_force_large_rho_goes_to_projection_of_zero():
    o = make_quadratic_saddle(2, 2, seed=1)
    env = brute_force_phi(o, np.array([1.0, -1.0]), 1e6)
    assert np.linalg.norm(env.y_star - project(o.y_set, np.zeros(2))) <= 1e-5


def test_brute_force_monotone_in_rho():
    o = make_quadratic_saddle(2, 2, seed=6)
    x = np.array([0.9, 0.2])
    phis = [brute_force_phi(o, x, rho).phi for rho in (0.0, 0.1, 0.5, 1.0, 4.0)]
    assert all(b <= a + 1e-12 for a, b in zip(phis, phis[1:]))


def test_brute_force_refinement_stable():
    o = make_wgan_toy()
    x = np.array([0.2, 0.5])
    coarse = brute_force_phi(o, x, 0.7, resolution=101)
    fine = brute_force_phi(o, x, 0.7, resolution=401)
    assert abs(coarse.phi - fine.phi) <= coarse.value_bound + fine.value_bound + 1e-12


def test_brute_force_simplex_and_dimension_limit():
    o = make_robust_multidomain(synthetic_domains(3, 40, 3, seed=2))
    env = brute_force_phi(o, np.zeros(3), 0.5)
    assert env.y_star.sum() == pytest.approx(1.0) and np.all(env.y_star >= 0)
    with pytest.raises(ValueError):
        brute_force_phi(make_quadratic_saddle(2, 4, seed=0), np.zeros(2), 1.0)


def test_drift_trivial_cases():
    o = make_quadratic_saddle(2, 2, seed=3)
    x = np.array([0.4, -0.2])
    chk = lemma_ystar_drift_check(o, x, x, 0.8, 0.8)
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.holds
    tiny = lemma_ystar_drift_check(o, x, x + 0.1, 0.8, 1e-6)
    assert tiny.rhs > 1e6 and tiny.holds
    with pytest.raises(ValueError):
        lemma_ystar_drift_check(o, x, x, 0.5, 0.8)


def test_drift_randomized():
    rng = np.random.default_rng(42)
    for _ in range(100):
        o = make_quadratic_saddle(int(rng.integers(1, 4)), int(rng.integers(1, 3)), seed=int(rng.integers(2**31)))
        x, xb = (project(o.x_set, rng.uniform(-1, 1, o.d_x)) for _ in range(2))
        s = theorem_schedule(o.lipschitz)
        k = int(rng.integers(1, 10**4))
        chk = lemma_ystar_drift_check(o, x, xb, schedule_at(s, k).rho, schedule_at(s, k + 1).rho)
        assert chk.holds, chk


def test_direct_worst_case_matches_constrained_solver():
    scipy_opt = pytest.importorskip("scipy.optimize")
    o = make_robust_multidomain(synthetic_domains(3, 200, 4, seed=3))
    best, _ = direct_worst_case(o, iters=20_000)
    cons = [{"type": "ineq", "fun": (lambda z, m=m: z[-1] - o.domain_losses(z[:-1])[m])} for m in range(3)]
    res = scipy_opt.minimize(lambda z: z[-1], np.r_[np.zeros(o.d_x), 1.0], constraints=cons, method="SLSQP",
                             options={"ftol": 1e-12, "maxiter": 500})
    assert best == pytest.approx(res.fun, rel=1e-3)
